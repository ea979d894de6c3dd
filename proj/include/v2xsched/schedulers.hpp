#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "v2xsched/assignment.hpp"
#include "v2xsched/config.hpp"
#include "v2xsched/mobility.hpp"

namespace v2xsched {

// Per-vehicle power measurements over the sensing window: one slot per
// subchannel per grid period. NaN marks a sample that was not taken (the
// vehicle was transmitting, or the window has not filled yet).
class SensingState {
 public:
  SensingState() = default;
  SensingState(int num_subframes, int num_subbands, int window_ms);

  // Stores the total power (mW) seen on each sub-band of `subframe` at time t.
  void record(long t_ms, std::span<const double> subband_power_mw);
  // Marks the subchannels of the current subframe unmeasured (own transmission).
  void mask(long t_ms);

  // The subframe the vehicle currently transmits in is reported unmeasured
  // regardless of older samples; -1 clears it.
  void set_tx_subframe(int subframe) { tx_subframe_ = subframe; }
  int tx_subframe() const { return tx_subframe_; }

  // Linear mean over measured samples; nullopt if none were measured or the
  // subchannel lies in the own transmit subframe.
  std::optional<double> average_mw(int flat) const;
  // One entry per subchannel, NaN where nothing was measured.
  std::vector<double> averages_mw() const;

  int num_subchannels() const { return num_subframes_ * num_subbands_; }
  int num_subframes() const { return num_subframes_; }
  int num_subbands() const { return num_subbands_; }

 private:
  double& slot(int flat, long t_ms);
  int num_subframes_ = 0;
  int num_subbands_ = 0;
  int slots_ = 0;
  int tx_subframe_ = -1;
  std::vector<double> samples_;  // [flat][slot]
};

struct AllocationDecision {
  int vehicle_id = 0;
  ResourceId resource;
  double sps_expiry_ms = 0;  // absolute time at which reselection is due
  double lifetime_s = 0;     // sps_expiry - decision time
};

// Draws an SPS lifetime uniform over the configured range and stamps the decision.
AllocationDecision make_decision(int vehicle_id, ResourceId resource, double now_ms, Rng& rng,
                                 const SimConfig& config);

// Uplinked measurement vector of a vehicle asking for a new subchannel.
struct PowerReport {
  int vehicle_id = 0;
  std::vector<double> avg_mw;  // per subchannel, NaN = not measured
};

// Minimises the summed average received power over the batch (one-to-one
// within the batch). Unmeasured entries take the vehicle's median measured
// value. Batches larger than the grid are served in vehicle-id order chunks.
std::vector<AllocationDecision> mode3_min_power(std::span<const PowerReport> batch, double now_ms,
                                                Rng& rng, const SimConfig& config);

// Holders of every flat resource at decision time.
using HolderMap = std::vector<std::vector<int>>;

// Maximises the summed reuse distance: weight(v, s) is the distance from v to
// the closest current holder of s that is neither v nor another batch member;
// free subchannels weigh road_length.
std::vector<AllocationDecision> mode3_max_reuse(std::span<const int> batch, const Fleet& fleet,
                                                const HolderMap& holders, double now_ms, Rng& rng,
                                                const SimConfig& config);

// The whole input of a mode-4 decision: the vehicle's own view and nothing else.
struct Mode4View {
  int vehicle_id = 0;
  int own_tx_subframe = 0;
  const SensingState* sensing = nullptr;
};

struct Mode4Outcome {
  AllocationDecision decision;
  int selectable = 0;
  int candidates = 0;
  double threshold_dbm = 0;
};

// Sensing-based selection: drop the own-subframe subchannels, admit those
// whose average is at or below a threshold raised in steps until at least the
// candidate fraction qualifies, then pick one uniformly.
Mode4Outcome mode4_select(const Mode4View& view, double now_ms, Rng& rng, const SimConfig& config);

// Everything a scheduler may consult. Mode-4 only ever reads the requesting
// vehicle's own sensing state.
struct WorldView {
  const Fleet* fleet = nullptr;
  const HolderMap* holders = nullptr;
  std::span<const SensingState> sensing;
  std::span<const ResourceId> allocation;
};

struct ScheduleStats {
  long mode4_selections = 0;
  long candidate_floor_violations = 0;
  int min_candidates = -1;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string_view name() const = 0;
  // Whether decisions depend on sensing history (those wait for a full window).
  virtual bool needs_sensing() const = 0;
  // Centralized schedulers collect requests and serve them periodically.
  virtual bool centralized() const = 0;
  // One decision per batch vehicle, in batch order.
  virtual std::vector<AllocationDecision> schedule(double now_ms, std::span<const int> batch,
                                                   const WorldView& world, Rng& rng) = 0;
  const ScheduleStats& stats() const { return stats_; }

 protected:
  ScheduleStats stats_;
};

inline constexpr std::string_view kMode3MinPower = "mode3-minpower";
inline constexpr std::string_view kMode3MaxReuse = "mode3-maxreuse";
inline constexpr std::string_view kMode4Sps = "mode4-sps";

std::vector<std::string> scheduler_names();
bool is_scheduler_name(std::string_view name);
// Throws std::invalid_argument listing the valid names.
std::unique_ptr<Scheduler> make_scheduler(std::string_view name, const SimConfig& config);

}  // namespace v2xsched
