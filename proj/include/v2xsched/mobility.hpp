#pragma once

#include <random>
#include <span>
#include <vector>

#include "v2xsched/config.hpp"

namespace v2xsched {

using Rng = std::mt19937_64;

struct VehicleKinematics {
  int vehicle_id = 0;
  double longitudinal_pos_m = 0;  // in [0, road_length)
  int lane = 0;
  int direction = +1;             // lanes below num_lanes/2 drive +1, the rest -1
  double speed_mps = 0;
};

using Fleet = std::vector<VehicleKinematics>;

// Lanes assigned round-robin, positions i.i.d. uniform over the loop,
// constant configured speed.
Fleet init_fleet(const SimConfig& config, Rng& rng);

// Constant-speed move on the wrap-around loop.
void advance(Fleet& fleet, double dt_s, const SimConfig& config);

// Signed longitudinal offset b - a, wrapped into [-L/2, L/2).
double wrapped_offset_m(double from_m, double to_m, double road_length_m);

// Euclidean distance with wrap-around longitudinal separation.
double distance(const VehicleKinematics& a, const VehicleKinematics& b, const SimConfig& config);

}  // namespace v2xsched
