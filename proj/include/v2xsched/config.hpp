#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace v2xsched {

// Every tunable of a simulation run. Defaults reproduce the reference freeway
// scenario (600 vehicles, 300 subchannels, 10 Hz CAMs).
struct SimConfig {
  // Resource grid
  int num_subframes = 100;
  int num_subbands = 3;
  int rbs_per_subchannel = 30;
  double cam_rate_hz = 10.0;

  // Radio
  double tx_power_dbm = 23.0;
  double antenna_gain_tx_db = 3.0;
  double antenna_gain_rx_db = 3.0;
  double sinr_threshold_db = 3.98;
  double sps_period_min_s = 0.5;
  double sps_period_max_s = 1.5;
  double shadow_std_db = 7.0;
  double shadow_corr_dist_m = 10.0;
  double noise_figure_db = 9.0;
  double pathloss_exponent = 3.55;
  double pathloss_ref_dist_m = 10.0;
  double carrier_freq_hz = 5.9e9;

  // Freeway
  double road_length_m = 5000.0;
  int num_lanes = 6;
  double lane_width_m = 4.0;
  double speed_mps = 27.78;
  int num_vehicles = 600;

  // Run and metrics
  long sim_duration_ms = 40000;
  std::vector<double> prr_bin_centers_m{50, 100, 150, 200, 250, 300};
  double prr_bin_halfwidth_m = 25.0;

  // Mode-4 sensing
  double mode4_rsrp_threshold_init_dbm = -110.0;
  double mode4_threshold_step_db = 3.0;
  double mode4_candidate_fraction = 0.2;
  int sensing_window_ms = 1000;
  double mode4_keep_probability = 0.0;

  // Mode-3 requests are collected and served by one matching call every
  // this many subframes (at the last subframe of each period).
  int mode3_batch_period_ms = 100;

  double ci_z_score = 4.417;

  int num_subchannels() const { return num_subframes * num_subbands; }
  // Receivers farther than this are not tracked for PRR.
  double evaluation_range_m() const;

  bool operator==(const SimConfig&) const = default;
};

// Thrown by validate() and the config parser. Carries one message per
// violated rule; what() joins them with newlines.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

// A SimConfig that passed validate(). Immutable; share freely across runs.
class ValidatedConfig {
 public:
  const SimConfig& get() const { return config_; }
  const SimConfig* operator->() const { return &config_; }
  const SimConfig& operator*() const { return config_; }

 private:
  friend ValidatedConfig validate(const SimConfig& config);
  explicit ValidatedConfig(SimConfig c) : config_(std::move(c)) {}
  SimConfig config_;
};

// Returns every violated invariant, naming the offending field. Empty means valid.
std::vector<std::string> check(const SimConfig& config);
ValidatedConfig validate(const SimConfig& config);

// Time-frequency subchannel: one subframe by one sub-band.
struct ResourceId {
  int subframe = 0;
  int subband = 0;
  bool operator==(const ResourceId&) const = default;
};

// Subframe-major: resources sharing a subframe are adjacent.
int flat_index(ResourceId r, const SimConfig& config);
ResourceId from_flat(int index, const SimConfig& config);

// Flat "key = value" text, '#' starts a comment. Every SimConfig field is a
// key; unknown or repeated keys are errors. Missing keys keep their default.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::string& path);
std::string serialize_config(const SimConfig& config);

// Sets one field from its textual form. Throws ConfigError on an unknown key
// or an unparsable value.
void set_config_value(SimConfig& config, std::string_view key, std::string_view value);
std::vector<std::string> config_keys();

// Shortest round-trip decimal form; used for every numeric output.
std::string format_double(double value);

}  // namespace v2xsched
