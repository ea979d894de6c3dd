#include "v2xsched/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "v2xsched/channel.hpp"

namespace v2xsched {

namespace {

constexpr double kUnmeasured = std::numeric_limits<double>::quiet_NaN();

double median_of_measured(const std::vector<double>& values) {
  std::vector<double> m;
  for (double x : values) {
    if (!std::isnan(x)) m.push_back(x);
  }
  if (m.empty()) return 1.0;
  std::sort(m.begin(), m.end());
  const std::size_t mid = m.size() / 2;
  return m.size() % 2 ? m[mid] : 0.5 * (m[mid - 1] + m[mid]);
}

}  // namespace

SensingState::SensingState(int num_subframes, int num_subbands, int window_ms)
    : num_subframes_(num_subframes),
      num_subbands_(num_subbands),
      slots_(std::max(1, window_ms / num_subframes)),
      samples_(static_cast<std::size_t>(num_subframes) * num_subbands * slots_, kUnmeasured) {}

double& SensingState::slot(int flat, long t_ms) {
  const long period = t_ms / num_subframes_;
  return samples_[static_cast<std::size_t>(flat) * slots_ + static_cast<std::size_t>(period % slots_)];
}

void SensingState::record(long t_ms, std::span<const double> subband_power_mw) {
  const int subframe = static_cast<int>(t_ms % num_subframes_);
  for (int b = 0; b < num_subbands_; ++b) {
    slot(subframe * num_subbands_ + b, t_ms) = subband_power_mw[b];
  }
}

void SensingState::mask(long t_ms) {
  const int subframe = static_cast<int>(t_ms % num_subframes_);
  for (int b = 0; b < num_subbands_; ++b) slot(subframe * num_subbands_ + b, t_ms) = kUnmeasured;
}

std::optional<double> SensingState::average_mw(int flat) const {
  if (flat / num_subbands_ == tx_subframe_) return std::nullopt;
  double sum = 0;
  int n = 0;
  const double* s = &samples_[static_cast<std::size_t>(flat) * slots_];
  for (int k = 0; k < slots_; ++k) {
    if (!std::isnan(s[k])) {
      sum += s[k];
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::vector<double> SensingState::averages_mw() const {
  std::vector<double> out(static_cast<std::size_t>(num_subchannels()));
  for (int f = 0; f < num_subchannels(); ++f) out[f] = average_mw(f).value_or(kUnmeasured);
  return out;
}

AllocationDecision make_decision(int vehicle_id, ResourceId resource, double now_ms, Rng& rng,
                                 const SimConfig& config) {
  std::uniform_real_distribution<double> period(config.sps_period_min_s, config.sps_period_max_s);
  AllocationDecision d;
  d.vehicle_id = vehicle_id;
  d.resource = resource;
  d.lifetime_s = period(rng);
  d.sps_expiry_ms = now_ms + 1000.0 * d.lifetime_s;
  return d;
}

std::vector<AllocationDecision> mode3_min_power(std::span<const PowerReport> batch, double now_ms,
                                                Rng& rng, const SimConfig& config) {
  const int m = config.num_subchannels();
  std::vector<const PowerReport*> order;
  for (const auto& r : batch) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(),
                   [](const PowerReport* a, const PowerReport* b) { return a->vehicle_id < b->vehicle_id; });

  std::vector<AllocationDecision> out;
  for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(m)) {
    const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(m));
    const int n = static_cast<int>(end - start);
    CostMatrix cost(n, m);
    for (int r = 0; r < n; ++r) {
      const auto& report = *order[start + r];
      if (static_cast<int>(report.avg_mw.size()) != m) {
        throw std::invalid_argument("power report of vehicle " + std::to_string(report.vehicle_id) +
                                    " does not cover the grid");
      }
      const double fill = median_of_measured(report.avg_mw);
      for (int c = 0; c < m; ++c) {
        const double x = report.avg_mw[c];
        cost(r, c) = std::isnan(x) ? fill : x;
      }
    }
    const Assignment a = solve_min(cost);
    for (int r = 0; r < n; ++r) {
      out.push_back(make_decision(order[start + r]->vehicle_id, from_flat(a.column_of_row[r], config),
                                  now_ms, rng, config));
    }
  }
  return out;
}

std::vector<AllocationDecision> mode3_max_reuse(std::span<const int> batch, const Fleet& fleet,
                                                const HolderMap& holders, double now_ms, Rng& rng,
                                                const SimConfig& config) {
  const int m = config.num_subchannels();
  if (static_cast<int>(holders.size()) != m) throw std::invalid_argument("holder map does not cover the grid");

  std::vector<int> order(batch.begin(), batch.end());
  std::sort(order.begin(), order.end());
  std::vector<char> in_batch(fleet.size(), false);
  for (int v : order) in_batch.at(static_cast<std::size_t>(v)) = true;

  // Batch members' holdings are vacated; chunks decided earlier become holders.
  HolderMap live(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) {
    for (int h : holders[s]) {
      if (!in_batch[static_cast<std::size_t>(h)]) live[s].push_back(h);
    }
  }

  std::vector<AllocationDecision> out;
  for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(m)) {
    const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(m));
    const int n = static_cast<int>(end - start);
    CostMatrix weight(n, m);
    for (int r = 0; r < n; ++r) {
      const auto& me = fleet[static_cast<std::size_t>(order[start + r])];
      for (int s = 0; s < m; ++s) {
        double w = config.road_length_m;
        for (int h : live[s]) {
          if (h == me.vehicle_id) continue;
          w = std::min(w, distance(me, fleet[static_cast<std::size_t>(h)], config));
        }
        weight(r, s) = w;
      }
    }
    const Assignment a = solve_max(weight);
    for (int r = 0; r < n; ++r) {
      const int v = order[start + r];
      const int s = a.column_of_row[r];
      out.push_back(make_decision(v, from_flat(s, config), now_ms, rng, config));
      live[s].push_back(v);
    }
  }
  return out;
}

Mode4Outcome mode4_select(const Mode4View& view, double now_ms, Rng& rng, const SimConfig& config) {
  if (view.sensing == nullptr) throw std::invalid_argument("mode-4 selection needs a sensing state");
  const SensingState& sensing = *view.sensing;
  const int m = sensing.num_subchannels();
  const int subbands = sensing.num_subbands();

  std::vector<int> selectable;
  std::vector<double> avg_dbm;
  for (int f = 0; f < m; ++f) {
    if (f / subbands == view.own_tx_subframe) continue;
    selectable.push_back(f);
    const auto avg = sensing.average_mw(f);
    avg_dbm.push_back(avg ? mw_to_dbm(*avg) : kUnmeasured);
  }

  Mode4Outcome out;
  out.selectable = static_cast<int>(selectable.size());
  const double needed = config.mode4_candidate_fraction * out.selectable;
  double max_measured = -std::numeric_limits<double>::infinity();
  for (double x : avg_dbm) {
    if (!std::isnan(x)) max_measured = std::max(max_measured, x);
  }

  std::vector<int> candidates;
  double threshold = config.mode4_rsrp_threshold_init_dbm;
  while (true) {
    candidates.clear();
    for (std::size_t k = 0; k < selectable.size(); ++k) {
      if (avg_dbm[k] <= threshold) candidates.push_back(selectable[k]);
    }
    if (candidates.size() >= needed || threshold >= max_measured) break;
    threshold += config.mode4_threshold_step_db;
  }
  // Never-measured subchannels are admitted only if measured ones cannot fill the floor.
  if (candidates.size() < needed) {
    for (std::size_t k = 0; k < selectable.size(); ++k) {
      if (std::isnan(avg_dbm[k])) candidates.push_back(selectable[k]);
    }
    std::sort(candidates.begin(), candidates.end());
  }
  if (candidates.empty()) throw std::logic_error("mode-4 selection found no selectable subchannel");

  out.candidates = static_cast<int>(candidates.size());
  out.threshold_dbm = threshold;
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  const int chosen = candidates[pick(rng)];
  out.decision = make_decision(view.vehicle_id, from_flat(chosen, config), now_ms, rng, config);
  return out;
}

namespace {

class MinPowerScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return kMode3MinPower; }
  bool needs_sensing() const override { return true; }
  bool centralized() const override { return true; }
  std::vector<AllocationDecision> schedule(double now_ms, std::span<const int> batch,
                                           const WorldView& world, Rng& rng) override {
    std::vector<PowerReport> reports;
    reports.reserve(batch.size());
    for (int v : batch) reports.push_back({v, world.sensing[static_cast<std::size_t>(v)].averages_mw()});
    return mode3_min_power(reports, now_ms, rng, *config_);
  }
  explicit MinPowerScheduler(const SimConfig& c) : config_(&c) {}

 private:
  const SimConfig* config_;
};

class MaxReuseScheduler final : public Scheduler {
 public:
  explicit MaxReuseScheduler(const SimConfig& c) : config_(&c) {}
  std::string_view name() const override { return kMode3MaxReuse; }
  bool needs_sensing() const override { return false; }
  bool centralized() const override { return true; }
  std::vector<AllocationDecision> schedule(double now_ms, std::span<const int> batch,
                                           const WorldView& world, Rng& rng) override {
    return mode3_max_reuse(batch, *world.fleet, *world.holders, now_ms, rng, *config_);
  }

 private:
  const SimConfig* config_;
};

class Mode4Scheduler final : public Scheduler {
 public:
  explicit Mode4Scheduler(const SimConfig& c) : config_(&c) {}
  std::string_view name() const override { return kMode4Sps; }
  bool needs_sensing() const override { return true; }
  bool centralized() const override { return false; }
  std::vector<AllocationDecision> schedule(double now_ms, std::span<const int> batch,
                                           const WorldView& world, Rng& rng) override {
    std::vector<AllocationDecision> out;
    out.reserve(batch.size());
    for (int v : batch) {
      const auto idx = static_cast<std::size_t>(v);
      const ResourceId current = world.allocation[idx];
      if (config_->mode4_keep_probability > 0 &&
          std::uniform_real_distribution<double>(0.0, 1.0)(rng) < config_->mode4_keep_probability) {
        out.push_back(make_decision(v, current, now_ms, rng, *config_));
        continue;
      }
      const Mode4View view{v, current.subframe, &world.sensing[idx]};
      const Mode4Outcome o = mode4_select(view, now_ms, rng, *config_);
      ++stats_.mode4_selections;
      const auto floor = static_cast<int>(std::ceil(config_->mode4_candidate_fraction * o.selectable - 1e-9));
      if (o.candidates < floor) ++stats_.candidate_floor_violations;
      if (stats_.min_candidates < 0 || o.candidates < stats_.min_candidates) stats_.min_candidates = o.candidates;
      out.push_back(o.decision);
    }
    return out;
  }

 private:
  const SimConfig* config_;
};

}  // namespace

std::vector<std::string> scheduler_names() {
  return {std::string(kMode3MinPower), std::string(kMode3MaxReuse), std::string(kMode4Sps)};
}

bool is_scheduler_name(std::string_view name) {
  return name == kMode3MinPower || name == kMode3MaxReuse || name == kMode4Sps;
}

std::unique_ptr<Scheduler> make_scheduler(std::string_view name, const SimConfig& config) {
  if (name == kMode3MinPower) return std::make_unique<MinPowerScheduler>(config);
  if (name == kMode3MaxReuse) return std::make_unique<MaxReuseScheduler>(config);
  if (name == kMode4Sps) return std::make_unique<Mode4Scheduler>(config);
  throw std::invalid_argument("unknown scheduler '" + std::string(name) +
                              "'; valid names: mode3-minpower, mode3-maxreuse, mode4-sps");
}

}  // namespace v2xsched
