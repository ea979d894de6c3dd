#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "v2xsched/channel.hpp"
#include "v2xsched/config.hpp"
#include "v2xsched/metrics.hpp"
#include "v2xsched/mobility.hpp"
#include "v2xsched/schedulers.hpp"

namespace v2xsched {

struct WorldState {
  long time_ms = 0;
  Fleet fleet;
  std::vector<ResourceId> allocation;
  std::vector<double> sps_expiry_ms;
  std::vector<SensingState> sensing;
  ShadowingTable shadowing{0};
  HolderMap holders;  // flat resource -> vehicles holding it
  Rng rng;
};

// Fresh world at t = 0: fleet placed, every vehicle on a subchannel taken
// from a random permutation of the grid (cycled when vehicles outnumber
// subchannels), expiries uniform over [0, max SPS period].
WorldState make_world(const SimConfig& config, std::uint64_t seed);
void bootstrap(WorldState& world, const SimConfig& config);

// True iff `holders` is exactly the inverse of `allocation`.
bool holders_consistent(const WorldState& world, const SimConfig& config);

struct RunStats {
  std::uint64_t tx_events = 0;
  std::uint64_t rx_records = 0;
  // Receptions marked successful although the receiver was transmitting.
  std::uint64_t received_while_transmitting = 0;
  std::uint64_t reselections = 0;
  std::uint64_t mode4_selections = 0;
  std::uint64_t candidate_floor_violations = 0;
  int min_candidates = -1;
  std::uint64_t holder_inconsistencies = 0;
  std::vector<double> lifetimes_s;  // one per scheduler decision
};

struct RunOptions {
  std::ostream* trace = nullptr;     // one line per RxRecord
  bool check_invariants = false;     // holder map checked every subframe
  std::function<void(const TxEvent&)> on_tx;
  std::function<void(const RxRecord&)> on_rx;
  std::function<void(const WorldState&)> on_subframe;
  RunStats* stats = nullptr;
};

// Subframe-by-subframe simulation. Deterministic in (config, scheduler, seed).
// Throws on an unknown scheduler or any scheduler failure; nothing partial is returned.
SimResult run(const ValidatedConfig& config, std::string_view scheduler, std::uint64_t seed,
              const RunOptions& options = {});

}  // namespace v2xsched
