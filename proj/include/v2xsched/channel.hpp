#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "v2xsched/config.hpp"
#include "v2xsched/mobility.hpp"

namespace v2xsched {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// Log-distance pathloss anchored at free-space loss at the reference distance.
// Distances below the reference distance clamp to it.
double pathloss_db(double distance_m, const SimConfig& config);

// Thermal noise over the subchannel bandwidth (rbs x 180 kHz) plus noise figure.
double noise_power_dbm(const SimConfig& config);

double rx_power_dbm(double tx_dbm, double pathloss_db, double shadow_db, const SimConfig& config);

// Received power in mW for a given distance and shadowing sample, with the
// distance-independent terms folded once. Agrees with
// dbm_to_mw(rx_power_dbm(...)) up to rounding.
class LinkBudget {
 public:
  explicit LinkBudget(const SimConfig& config);
  double rx_mw(double distance_m, double shadow_db) const {
    const double d = distance_m > ref_dist_m_ ? distance_m : ref_dist_m_;
    return std::exp(log_gain_at_ref_ - exponent_ * std::log(d / ref_dist_m_) - kNepersPerDb * shadow_db);
  }

 private:
  static constexpr double kNepersPerDb = 0.23025850929940458;  // ln(10) / 10
  double ref_dist_m_;
  double exponent_;
  double log_gain_at_ref_;
};

// Separation vector of a vehicle pair: wrapped longitudinal offset and
// lateral offset, both from the lower id to the higher id.
struct RelativeGeometry {
  double along_m = 0;
  double across_m = 0;
};

RelativeGeometry relative_geometry(const VehicleKinematics& a, const VehicleKinematics& b,
                                   const SimConfig& config);

// Shadowing state of one unordered vehicle pair.
struct LinkShadowing {
  int vehicle_a = 0;
  int vehicle_b = 0;
  double shadow_db = 0;
  RelativeGeometry last_geometry;
  bool initialized = false;
};

// First call draws N(0, sigma^2). Afterwards AR(1) in the displacement of the
// pair geometry: rho = exp(-dd / corr_dist), s' = rho s + sqrt(1 - rho^2) N(0, sigma^2).
// No random draw is consumed when the geometry has not moved.
void update_shadowing(LinkShadowing& link, const RelativeGeometry& geometry, Rng& rng,
                      const SimConfig& config);

// Lazily updated shadowing for every unordered pair of a fleet.
class ShadowingTable {
 public:
  explicit ShadowingTable(int num_vehicles);

  // Brings the (a, b) link up to the current geometry and returns its sample.
  // Symmetric: sample(a, b) and sample(b, a) address the same state.
  double sample(const VehicleKinematics& a, const VehicleKinematics& b, Rng& rng,
                const SimConfig& config);

  const LinkShadowing& link(int a, int b) const { return links_[index(a, b)]; }

 private:
  std::size_t index(int a, int b) const;
  int n_;
  std::vector<LinkShadowing> links_;
};

struct ReceptionOutcome {
  bool received = false;
  double sinr_db = 0;
  bool blocked_half_duplex = false;
};

// SINR computed in linear mW; reception iff not half-duplex blocked and
// SINR_dB >= threshold (inclusive).
ReceptionOutcome evaluate_reception(double signal_dbm, std::span<const double> interferer_dbms,
                                    bool rx_is_transmitting_this_subframe, const SimConfig& config);

// Same decision with powers already in mW; used on the engine's hot path.
ReceptionOutcome evaluate_reception_mw(double signal_mw, double interference_mw, double noise_mw,
                                       bool rx_is_transmitting_this_subframe, const SimConfig& config);

}  // namespace v2xsched
