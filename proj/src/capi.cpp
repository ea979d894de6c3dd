#include "v2xsched/v2xsched.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "v2xsched/config.hpp"
#include "v2xsched/engine.hpp"
#include "v2xsched/metrics.hpp"
#include "v2xsched/schedulers.hpp"

struct v2x_config {
  v2xsched::SimConfig config;
};

struct v2x_result {
  v2xsched::SimResult result;
  v2x_run_stats stats{};
};

namespace {

thread_local std::string g_last_error;

v2x_status fail(v2x_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

v2x_status ok() {
  g_last_error.clear();
  return V2X_OK;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
v2x_status guarded(F&& body) {
  try {
    return body();
  } catch (const v2xsched::ConfigError& e) {
    return fail(V2X_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(V2X_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(V2X_ERR_INTERNAL, e.what());
  }
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> n = v2xsched::scheduler_names();
  return n;
}

}  // namespace

extern "C" {

const char* v2x_last_error(void) { return g_last_error.c_str(); }

const char* v2x_status_name(v2x_status status) {
  switch (status) {
    case V2X_OK: return "ok";
    case V2X_ERR_ARGUMENT: return "invalid argument";
    case V2X_ERR_CONFIG: return "configuration error";
    case V2X_ERR_IO: return "i/o error";
    case V2X_ERR_SCHEDULER: return "unknown scheduler";
    case V2X_ERR_FORMAT: return "malformed input";
    case V2X_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

v2x_status v2x_config_new(v2x_config** out) {
  if (!out) return fail(V2X_ERR_ARGUMENT, "out is null");
  return guarded([&] {
    *out = new v2x_config{};
    return ok();
  });
}

v2x_status v2x_config_parse(const char* text, v2x_config** out) {
  if (!text || !out) return fail(V2X_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto parsed = v2xsched::parse_config(text);
    *out = new v2x_config{std::move(parsed)};
    return ok();
  });
}

v2x_status v2x_config_load(const char* path, v2x_config** out) {
  if (!path || !out) return fail(V2X_ERR_ARGUMENT, "null argument");
  std::ifstream in(path);
  if (!in) return fail(V2X_ERR_IO, std::string("cannot open ") + path);
  std::stringstream text;
  text << in.rdbuf();
  return guarded([&] {
    try {
      auto parsed = v2xsched::parse_config(text.str());
      *out = new v2x_config{std::move(parsed)};
      return ok();
    } catch (const v2xsched::ConfigError& e) {
      return fail(V2X_ERR_CONFIG, std::string(path) + ": " + e.what());
    }
  });
}

v2x_status v2x_config_set(v2x_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(V2X_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    v2xsched::set_config_value(config->config, key, value);
    return ok();
  });
}

v2x_status v2x_config_validate(const v2x_config* config) {
  if (!config) return fail(V2X_ERR_ARGUMENT, "config is null");
  return guarded([&] {
    v2xsched::validate(config->config);
    return ok();
  });
}

v2x_status v2x_config_serialize(const v2x_config* config, char* buf, size_t cap, size_t* needed) {
  if (!config || (!buf && cap > 0)) return fail(V2X_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string text = v2xsched::serialize_config(config->config);
    if (needed) *needed = text.size() + 1;
    if (cap > 0) {
      const std::size_t n = std::min(cap - 1, text.size());
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
    return ok();
  });
}

v2x_status v2x_config_write(const v2x_config* config, const char* path) {
  if (!config || !path) return fail(V2X_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    out << v2xsched::serialize_config(config->config);
    out.close();
    if (!out) return fail(V2X_ERR_IO, std::string("cannot write ") + path);
    return ok();
  });
}

void v2x_config_free(v2x_config* config) { delete config; }

size_t v2x_scheduler_count(void) { return names().size(); }

const char* v2x_scheduler_name(size_t index) {
  return index < names().size() ? names()[index].c_str() : nullptr;
}

v2x_status v2x_run(const v2x_config* config, const char* scheduler, uint64_t seed, const char* trace_path,
                   v2x_result** out) {
  if (!config || !scheduler || !out) return fail(V2X_ERR_ARGUMENT, "null argument");
  if (!v2xsched::is_scheduler_name(scheduler)) {
    std::string valid;
    for (const auto& n : names()) valid += (valid.empty() ? "" : ", ") + n;
    return fail(V2X_ERR_SCHEDULER, std::string("unknown scheduler '") + scheduler + "'; valid names: " + valid);
  }
  return guarded([&] {
    const auto validated = v2xsched::validate(config->config);
    std::ofstream trace;
    v2xsched::RunStats stats;
    v2xsched::RunOptions options;
    options.stats = &stats;
    if (trace_path) {
      trace.open(trace_path, std::ios::binary);
      if (!trace) return fail(V2X_ERR_IO, std::string("cannot write ") + trace_path);
      options.trace = &trace;
    }
    auto handle = std::make_unique<v2x_result>();
    handle->result = v2xsched::run(validated, scheduler, seed, options);
    if (trace_path) {
      trace.close();
      if (!trace) return fail(V2X_ERR_IO, std::string("cannot write ") + trace_path);
    }
    auto& s = handle->stats;
    s.tx_events = stats.tx_events;
    s.rx_records = stats.rx_records;
    s.received_while_transmitting = stats.received_while_transmitting;
    s.reselections = stats.reselections;
    s.mode4_selections = stats.mode4_selections;
    s.candidate_floor_violations = stats.candidate_floor_violations;
    s.min_candidates = stats.min_candidates;
    if (!stats.lifetimes_s.empty()) {
      const auto [lo, hi] = std::minmax_element(stats.lifetimes_s.begin(), stats.lifetimes_s.end());
      s.min_lifetime_s = *lo;
      s.max_lifetime_s = *hi;
    }
    *out = handle.release();
    return ok();
  });
}

const char* v2x_result_scheduler(const v2x_result* result) {
  return result ? result->result.scheduler.c_str() : nullptr;
}

uint64_t v2x_result_seed(const v2x_result* result) { return result ? result->result.seed : 0; }

size_t v2x_result_bin_count(const v2x_result* result) { return result ? result->result.bins.size() : 0; }

v2x_status v2x_result_bin(const v2x_result* result, size_t index, double* center_m, uint64_t* expected,
                          uint64_t* received) {
  if (!result) return fail(V2X_ERR_ARGUMENT, "result is null");
  if (index >= result->result.bins.size()) return fail(V2X_ERR_ARGUMENT, "bin index out of range");
  const auto& b = result->result.bins[index];
  if (center_m) *center_m = b.center_m;
  if (expected) *expected = b.expected;
  if (received) *received = b.received;
  return ok();
}

v2x_status v2x_result_stats(const v2x_result* result, v2x_run_stats* out) {
  if (!result || !out) return fail(V2X_ERR_ARGUMENT, "null argument");
  *out = result->stats;
  return ok();
}

v2x_status v2x_result_write(const v2x_result* result, const char* path) {
  if (!result || !path) return fail(V2X_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) return fail(V2X_ERR_IO, std::string("cannot write ") + path);
    v2xsched::write_run_csv(out, result->result);
    out.close();
    if (!out) return fail(V2X_ERR_IO, std::string("cannot write ") + path);
    return ok();
  });
}

void v2x_result_free(v2x_result* result) { delete result; }

v2x_status v2x_summarize(const v2x_config* config, const char* const* run_paths, size_t count,
                         const char* out_dir) {
  if ((!run_paths && count > 0) || !out_dir) return fail(V2X_ERR_ARGUMENT, "null argument");
  if (count == 0) return fail(V2X_ERR_ARGUMENT, "no run files given");
  namespace fs = std::filesystem;
  return guarded([&] {
    const double z = config ? config->config.ci_z_score : v2xsched::SimConfig{}.ci_z_score;

    // Scheduler name -> results, sorted by name so file order does not matter.
    std::map<std::string, std::vector<v2xsched::SimResult>> by_scheduler;
    std::map<std::pair<std::string, std::uint64_t>, std::string> seen;
    for (size_t i = 0; i < count; ++i) {
      const std::string path = run_paths[i] ? run_paths[i] : "";
      std::ifstream in(path, std::ios::binary);
      if (!in) return fail(V2X_ERR_IO, "cannot open " + path);
      std::vector<v2xsched::SimResult> results;
      try {
        results = v2xsched::read_run_csv(in, path);
      } catch (const std::exception& e) {
        return fail(V2X_ERR_FORMAT, e.what());
      }
      for (auto& r : results) {
        const auto key = std::make_pair(r.scheduler, r.seed);
        if (auto it = seen.find(key); it != seen.end()) {
          return fail(V2X_ERR_FORMAT, path + ": scheduler " + r.scheduler + " seed " + std::to_string(r.seed) +
                                          " already read from " + it->second);
        }
        seen.emplace(key, path);
        by_scheduler[r.scheduler].push_back(std::move(r));
      }
    }
    if (by_scheduler.empty()) return fail(V2X_ERR_FORMAT, "run files contain no results");

    std::vector<v2xsched::AggregateResult> aggregates;
    std::vector<std::pair<fs::path, std::string>> files;
    for (const auto& [name, results] : by_scheduler) {
      try {
        aggregates.push_back(v2xsched::aggregate(results, z));
      } catch (const std::invalid_argument& e) {
        return fail(V2X_ERR_FORMAT, name + ": " + e.what());
      }
      std::ostringstream text;
      v2xsched::write_summary_csv(text, aggregates.back());
      files.emplace_back(fs::path(out_dir) / ("summary_" + name + ".csv"), text.str());
    }
    std::ostringstream comparison;
    v2xsched::write_comparison_csv(comparison, aggregates);
    files.emplace_back(fs::path(out_dir) / "comparison.csv", comparison.str());

    std::vector<fs::path> written;
    for (const auto& [path, text] : files) {
      std::ofstream out(path, std::ios::binary);
      out << text;
      out.close();
      if (!out) {
        std::error_code ec;
        for (const auto& w : written) fs::remove(w, ec);
        fs::remove(path, ec);
        return fail(V2X_ERR_IO, "cannot write " + path.string());
      }
      written.push_back(path);
    }
    return ok();
  });
}

}  // extern "C"
