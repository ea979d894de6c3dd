#include "v2xsched/channel.hpp"

#include <cmath>
#include <numbers>

namespace v2xsched {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kThermalNoiseDbmPerHz = -174.0;
constexpr double kResourceBlockHz = 180000.0;
// Round-off allowance on the inclusive SINR threshold.
constexpr double kThresholdSlackDb = 1e-9;

}  // namespace

double pathloss_db(double distance_m, const SimConfig& config) {
  const double d0 = config.pathloss_ref_dist_m;
  const double ref_loss =
      20.0 * std::log10(4.0 * std::numbers::pi * d0 * config.carrier_freq_hz / kSpeedOfLight);
  const double d = std::max(distance_m, d0);
  return ref_loss + 10.0 * config.pathloss_exponent * std::log10(d / d0);
}

double noise_power_dbm(const SimConfig& config) {
  return kThermalNoiseDbmPerHz + 10.0 * std::log10(config.rbs_per_subchannel * kResourceBlockHz) +
         config.noise_figure_db;
}

double rx_power_dbm(double tx_dbm, double pathloss, double shadow_db, const SimConfig& config) {
  return tx_dbm + config.antenna_gain_tx_db + config.antenna_gain_rx_db - pathloss - shadow_db;
}

LinkBudget::LinkBudget(const SimConfig& config)
    : ref_dist_m_(config.pathloss_ref_dist_m),
      exponent_(config.pathloss_exponent),
      log_gain_at_ref_(kNepersPerDb *
                       rx_power_dbm(config.tx_power_dbm, pathloss_db(config.pathloss_ref_dist_m, config), 0.0,
                                    config)) {}

RelativeGeometry relative_geometry(const VehicleKinematics& a, const VehicleKinematics& b,
                                   const SimConfig& config) {
  const VehicleKinematics& lo = a.vehicle_id <= b.vehicle_id ? a : b;
  const VehicleKinematics& hi = a.vehicle_id <= b.vehicle_id ? b : a;
  return {wrapped_offset_m(lo.longitudinal_pos_m, hi.longitudinal_pos_m, config.road_length_m),
          config.lane_width_m * (hi.lane - lo.lane)};
}

void update_shadowing(LinkShadowing& link, const RelativeGeometry& geometry, Rng& rng,
                      const SimConfig& config) {
  if (!link.initialized) {
    link.shadow_db = config.shadow_std_db * std::normal_distribution<double>(0.0, 1.0)(rng);
    link.last_geometry = geometry;
    link.initialized = true;
    return;
  }
  const double da = geometry.along_m - link.last_geometry.along_m;
  const double dc = geometry.across_m - link.last_geometry.across_m;
  const double moved = std::sqrt(da * da + dc * dc);
  if (moved == 0) return;
  const double rho = std::exp(-moved / config.shadow_corr_dist_m);
  const double innovation = std::normal_distribution<double>(0.0, 1.0)(rng);
  link.shadow_db = rho * link.shadow_db + std::sqrt(1.0 - rho * rho) * config.shadow_std_db * innovation;
  link.last_geometry = geometry;
}

ShadowingTable::ShadowingTable(int num_vehicles)
    : n_(num_vehicles),
      links_(static_cast<std::size_t>(num_vehicles) * static_cast<std::size_t>(num_vehicles - 1) / 2) {
  for (int a = 0; a < n_; ++a) {
    for (int b = a + 1; b < n_; ++b) {
      auto& l = links_[index(a, b)];
      l.vehicle_a = a;
      l.vehicle_b = b;
    }
  }
}

std::size_t ShadowingTable::index(int a, int b) const {
  if (a > b) std::swap(a, b);
  const auto i = static_cast<std::size_t>(a);
  const auto n = static_cast<std::size_t>(n_);
  return i * n - i * (i + 1) / 2 + static_cast<std::size_t>(b - a - 1);
}

double ShadowingTable::sample(const VehicleKinematics& a, const VehicleKinematics& b, Rng& rng,
                              const SimConfig& config) {
  auto& link = links_[index(a.vehicle_id, b.vehicle_id)];
  update_shadowing(link, relative_geometry(a, b, config), rng, config);
  return link.shadow_db;
}

namespace {

ReceptionOutcome decide(double sinr_db, bool blocked, const SimConfig& config) {
  ReceptionOutcome out;
  out.sinr_db = sinr_db;
  out.blocked_half_duplex = blocked;
  out.received = !blocked && sinr_db >= config.sinr_threshold_db - kThresholdSlackDb;
  return out;
}

}  // namespace

ReceptionOutcome evaluate_reception_mw(double signal_mw, double interference_mw, double noise_mw,
                                       bool rx_is_transmitting_this_subframe, const SimConfig& config) {
  return decide(mw_to_dbm(signal_mw) - mw_to_dbm(noise_mw + interference_mw),
                rx_is_transmitting_this_subframe, config);
}

ReceptionOutcome evaluate_reception(double signal_dbm, std::span<const double> interferer_dbms,
                                    bool rx_is_transmitting_this_subframe, const SimConfig& config) {
  double interference = 0;
  for (double i : interferer_dbms) interference += dbm_to_mw(i);
  const double noise = dbm_to_mw(noise_power_dbm(config));
  return decide(signal_dbm - mw_to_dbm(noise + interference), rx_is_transmitting_this_subframe, config);
}

}  // namespace v2xsched
