#include "v2xsched/mobility.hpp"

#include <cmath>

namespace v2xsched {

namespace {

double wrap_position(double x, double road_length_m) {
  x = std::fmod(x, road_length_m);
  if (x < 0) x += road_length_m;
  // fmod of a tiny negative can round back up to L
  if (x >= road_length_m) x = 0;
  return x;
}

}  // namespace

Fleet init_fleet(const SimConfig& config, Rng& rng) {
  std::uniform_real_distribution<double> pos(0.0, config.road_length_m);
  Fleet fleet;
  fleet.reserve(static_cast<std::size_t>(config.num_vehicles));
  const int forward_lanes = config.num_lanes / 2;
  for (int i = 0; i < config.num_vehicles; ++i) {
    VehicleKinematics v;
    v.vehicle_id = i;
    v.lane = i % config.num_lanes;
    v.direction = v.lane < forward_lanes ? +1 : -1;
    v.speed_mps = config.speed_mps;
    v.longitudinal_pos_m = wrap_position(pos(rng), config.road_length_m);
    fleet.push_back(v);
  }
  return fleet;
}

void advance(Fleet& fleet, double dt_s, const SimConfig& config) {
  if (dt_s == 0) return;
  for (auto& v : fleet) {
    v.longitudinal_pos_m =
        wrap_position(v.longitudinal_pos_m + v.direction * v.speed_mps * dt_s, config.road_length_m);
  }
}

double wrapped_offset_m(double from_m, double to_m, double road_length_m) {
  double dx = std::fmod(to_m - from_m, road_length_m);
  const double half = road_length_m / 2;
  if (dx >= half) dx -= road_length_m;
  if (dx < -half) dx += road_length_m;
  return dx;
}

double distance(const VehicleKinematics& a, const VehicleKinematics& b, const SimConfig& config) {
  const double dx = std::abs(a.longitudinal_pos_m - b.longitudinal_pos_m);
  const double along = std::min(dx, config.road_length_m - dx);
  const double across = config.lane_width_m * std::abs(a.lane - b.lane);
  return std::sqrt(along * along + across * across);
}

}  // namespace v2xsched
