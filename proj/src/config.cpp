#include "v2xsched/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace v2xsched {

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError({std::string(key) + ": not a number: '" + std::string(text) + "'"});
  }
  return v;
}

long parse_long(std::string_view key, std::string_view text) {
  text = trim(text);
  long v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError({std::string(key) + ": not an integer: '" + std::string(text) + "'"});
  }
  return v;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    out.push_back(parse_double(key, text.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

struct Field {
  const char* key;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

template <typename T>
Field number(const char* key, T SimConfig::*member) {
  return Field{
      key,
      [key, member](SimConfig& c, std::string_view v) {
        if constexpr (std::is_integral_v<T>) {
          const long parsed = parse_long(key, v);
          if (parsed < std::numeric_limits<T>::min() || parsed > std::numeric_limits<T>::max()) {
            throw ConfigError({std::string(key) + ": out of range"});
          }
          c.*member = static_cast<T>(parsed);
        } else {
          c.*member = parse_double(key, v);
        }
      },
      [member](const SimConfig& c) {
        if constexpr (std::is_integral_v<T>) {
          return std::to_string(c.*member);
        } else {
          return format_double(c.*member);
        }
      }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t{
        number("num_subframes", &SimConfig::num_subframes),
        number("num_subbands", &SimConfig::num_subbands),
        number("rbs_per_subchannel", &SimConfig::rbs_per_subchannel),
        number("cam_rate_hz", &SimConfig::cam_rate_hz),
        number("tx_power_dbm", &SimConfig::tx_power_dbm),
        number("antenna_gain_tx_db", &SimConfig::antenna_gain_tx_db),
        number("antenna_gain_rx_db", &SimConfig::antenna_gain_rx_db),
        number("sinr_threshold_db", &SimConfig::sinr_threshold_db),
        Field{"sps_period_range_s",
              [](SimConfig& c, std::string_view v) {
                const auto range = parse_list("sps_period_range_s", v);
                if (range.size() != 2) {
                  throw ConfigError({"sps_period_range_s: expected 'min,max'"});
                }
                c.sps_period_min_s = range[0];
                c.sps_period_max_s = range[1];
              },
              [](const SimConfig& c) {
                return format_list({c.sps_period_min_s, c.sps_period_max_s});
              }},
        number("shadow_std_db", &SimConfig::shadow_std_db),
        number("shadow_corr_dist_m", &SimConfig::shadow_corr_dist_m),
        number("noise_figure_db", &SimConfig::noise_figure_db),
        number("pathloss_exponent", &SimConfig::pathloss_exponent),
        number("pathloss_ref_dist_m", &SimConfig::pathloss_ref_dist_m),
        number("carrier_freq_hz", &SimConfig::carrier_freq_hz),
        number("road_length_m", &SimConfig::road_length_m),
        number("num_lanes", &SimConfig::num_lanes),
        number("lane_width_m", &SimConfig::lane_width_m),
        number("speed_mps", &SimConfig::speed_mps),
        number("num_vehicles", &SimConfig::num_vehicles),
        number("sim_duration_ms", &SimConfig::sim_duration_ms),
        Field{"prr_bin_centers_m",
              [](SimConfig& c, std::string_view v) {
                c.prr_bin_centers_m = parse_list("prr_bin_centers_m", v);
              },
              [](const SimConfig& c) { return format_list(c.prr_bin_centers_m); }},
        number("prr_bin_halfwidth_m", &SimConfig::prr_bin_halfwidth_m),
        number("mode4_rsrp_threshold_init_dbm", &SimConfig::mode4_rsrp_threshold_init_dbm),
        number("mode4_threshold_step_db", &SimConfig::mode4_threshold_step_db),
        number("mode4_candidate_fraction", &SimConfig::mode4_candidate_fraction),
        number("sensing_window_ms", &SimConfig::sensing_window_ms),
        number("mode4_keep_probability", &SimConfig::mode4_keep_probability),
        number("mode3_batch_period_ms", &SimConfig::mode3_batch_period_ms),
        number("ci_z_score", &SimConfig::ci_z_score),
    };
    return t;
  }();
  return table;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

double SimConfig::evaluation_range_m() const {
  double max_center = 0;
  for (double c : prr_bin_centers_m) max_center = std::max(max_center, c);
  return max_center + prr_bin_halfwidth_m;
}

std::vector<std::string> check(const SimConfig& c) {
  std::vector<std::string> errs;
  auto positive = [&](const char* name, double v) {
    if (!(v > 0) || !std::isfinite(v)) errs.push_back(std::string(name) + ": must be positive and finite");
  };
  auto finite = [&](const char* name, double v) {
    if (!std::isfinite(v)) errs.push_back(std::string(name) + ": must be finite");
  };

  positive("num_subframes", c.num_subframes);
  positive("num_subbands", c.num_subbands);
  positive("rbs_per_subchannel", c.rbs_per_subchannel);
  positive("cam_rate_hz", c.cam_rate_hz);
  if (c.num_subframes > 0 && c.cam_rate_hz > 0 &&
      std::abs(c.cam_rate_hz * c.num_subframes * 1e-3 - 1.0) > 1e-9) {
    errs.push_back("cam_rate_hz: rate/subframe mismatch (cam_rate_hz x num_subframes x 1 ms must equal 1 s)");
  }

  finite("tx_power_dbm", c.tx_power_dbm);
  finite("antenna_gain_tx_db", c.antenna_gain_tx_db);
  finite("antenna_gain_rx_db", c.antenna_gain_rx_db);
  finite("sinr_threshold_db", c.sinr_threshold_db);
  finite("noise_figure_db", c.noise_figure_db);

  if (!std::isfinite(c.sps_period_min_s) || !std::isfinite(c.sps_period_max_s) ||
      c.sps_period_min_s > c.sps_period_max_s) {
    errs.push_back("sps_period_range_s: need finite min <= max");
  } else if (c.cam_rate_hz > 0 && c.sps_period_min_s < 1.0 / c.cam_rate_hz - 1e-12) {
    errs.push_back("sps_period_range_s: lower bound below one CAM period");
  }

  if (!(c.shadow_std_db >= 0) || !std::isfinite(c.shadow_std_db)) {
    errs.push_back("shadow_std_db: must be finite and >= 0");
  }
  positive("shadow_corr_dist_m", c.shadow_corr_dist_m);
  positive("pathloss_exponent", c.pathloss_exponent);
  positive("pathloss_ref_dist_m", c.pathloss_ref_dist_m);
  positive("carrier_freq_hz", c.carrier_freq_hz);

  positive("road_length_m", c.road_length_m);
  positive("num_lanes", c.num_lanes);
  if (!(c.lane_width_m >= 0) || !std::isfinite(c.lane_width_m)) {
    errs.push_back("lane_width_m: must be finite and >= 0");
  }
  positive("speed_mps", c.speed_mps);
  if (c.num_vehicles < 1) errs.push_back("num_vehicles: need at least one vehicle");
  positive("sim_duration_ms", static_cast<double>(c.sim_duration_ms));

  positive("prr_bin_halfwidth_m", c.prr_bin_halfwidth_m);
  if (c.prr_bin_centers_m.empty()) {
    errs.push_back("prr_bin_centers_m: need at least one bin");
  } else {
    auto centers = c.prr_bin_centers_m;
    std::sort(centers.begin(), centers.end());
    bool ok = std::all_of(centers.begin(), centers.end(), [](double x) { return std::isfinite(x) && x >= 0; });
    if (!ok) errs.push_back("prr_bin_centers_m: centers must be finite and >= 0");
    for (std::size_t i = 1; ok && i < centers.size(); ++i) {
      if (c.prr_bin_halfwidth_m > (centers[i] - centers[i - 1]) / 2 + 1e-12) {
        errs.push_back("prr_bin_halfwidth_m: bins overlap (halfwidth exceeds half the gap between centers)");
        break;
      }
    }
  }

  finite("mode4_rsrp_threshold_init_dbm", c.mode4_rsrp_threshold_init_dbm);
  positive("mode4_threshold_step_db", c.mode4_threshold_step_db);
  if (!(c.mode4_candidate_fraction > 0 && c.mode4_candidate_fraction <= 1)) {
    errs.push_back("mode4_candidate_fraction: must lie in (0, 1]");
  }
  if (c.sensing_window_ms <= 0 || (c.num_subframes > 0 && c.sensing_window_ms % c.num_subframes != 0)) {
    errs.push_back("sensing_window_ms: must be a positive multiple of num_subframes");
  }
  if (!(c.mode4_keep_probability >= 0 && c.mode4_keep_probability <= 1)) {
    errs.push_back("mode4_keep_probability: must lie in [0, 1]");
  }
  if (c.mode3_batch_period_ms < 1) errs.push_back("mode3_batch_period_ms: must be >= 1");
  positive("ci_z_score", c.ci_z_score);
  return errs;
}

ValidatedConfig validate(const SimConfig& config) {
  auto errs = check(config);
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return ValidatedConfig(config);
}

int flat_index(ResourceId r, const SimConfig& config) {
  if (r.subframe < 0 || r.subframe >= config.num_subframes || r.subband < 0 ||
      r.subband >= config.num_subbands) {
    throw std::out_of_range("resource (" + std::to_string(r.subframe) + ", " +
                            std::to_string(r.subband) + ") outside the grid");
  }
  return r.subframe * config.num_subbands + r.subband;
}

ResourceId from_flat(int index, const SimConfig& config) {
  if (index < 0 || index >= config.num_subchannels()) {
    throw std::out_of_range("flat index " + std::to_string(index) + " outside the grid");
  }
  return {index / config.num_subbands, index % config.num_subbands};
}

void set_config_value(SimConfig& config, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(config, value);
      return;
    }
  }
  throw ConfigError({"unknown key '" + std::string(key) + "'"});
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

SimConfig parse_config(std::string_view text) {
  SimConfig config;
  std::vector<std::string> errs;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) {
      errs.push_back(where + "expected 'key = value'");
      continue;
    }
    const auto key = trim(line.substr(0, eq));
    if (!seen.insert(std::string(key)).second) {
      errs.push_back(where + "duplicate key '" + std::string(key) + "'");
      continue;
    }
    try {
      set_config_value(config, key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      for (const auto& d : e.diagnostics()) errs.push_back(where + d);
    }
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return config;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const SimConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += '\n';
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

}  // namespace v2xsched
