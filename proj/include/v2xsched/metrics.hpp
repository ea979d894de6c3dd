#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "v2xsched/channel.hpp"
#include "v2xsched/config.hpp"

namespace v2xsched {

struct TxEvent {
  long time_ms = 0;
  int tx_id = 0;
  ResourceId resource;
};

struct RxRecord {
  long time_ms = 0;
  int tx_id = 0;
  int rx_id = 0;
  double distance_m = 0;
  ReceptionOutcome outcome;
};

// Half-open distance bin [center - halfwidth, center + halfwidth).
struct PrrBin {
  double center_m = 0;
  double halfwidth_m = 0;
  std::uint64_t expected = 0;
  std::uint64_t received = 0;

  // Absent when no receiver fell in the bin.
  std::optional<double> prr() const;
  bool contains(double d) const { return d >= center_m - halfwidth_m && d < center_m + halfwidth_m; }
  bool operator==(const PrrBin&) const = default;
};

class PrrAccumulator {
 public:
  explicit PrrAccumulator(const SimConfig& config);

  // Half-duplex-blocked receptions count as expected but not received.
  void add(double distance_m, bool received);
  void add(const RxRecord& r) { add(r.distance_m, r.outcome.received); }

  const std::vector<PrrBin>& bins() const { return bins_; }

 private:
  std::vector<PrrBin> bins_;  // sorted by center
};

PrrAccumulator accumulate(std::span<const RxRecord> records, const SimConfig& config);

struct SimResult {
  std::string scheduler;
  std::uint64_t seed = 0;
  std::vector<PrrBin> bins;
  bool operator==(const SimResult&) const = default;
};

struct AggregateBin {
  double center_m = 0;
  std::optional<double> mean;  // absent if no seed measured this bin
  double ci_low = 0;
  double ci_high = 0;
  int n_seeds = 0;
  bool single_seed() const { return n_seeds == 1; }
};

struct AggregateResult {
  std::string scheduler;
  std::vector<AggregateBin> bins;
};

// Per bin: mean of per-seed PRRs, half-width z * s / sqrt(n), band clamped to
// [0, 1]. Invariant to the order of `results`. Throws std::invalid_argument on
// an empty input or mismatched bin structure.
AggregateResult aggregate(std::span<const SimResult> results, double z_score);

// Delimited text formats. Column order is fixed; a header row is always written.
//   run:        scheduler,seed,bin_center_m,expected,received,prr
//   summary:    scheduler,bin_center_m,mean_prr,ci_low,ci_high,n_seeds
//   comparison: bin_center_m,<scheduler>...   (mean PRR per scheduler)
// Absent values are written as NA.
void write_run_csv(std::ostream& out, const SimResult& result);
void write_summary_csv(std::ostream& out, const AggregateResult& result);
void write_comparison_csv(std::ostream& out, std::span<const AggregateResult> results);

// Parses a run file; one SimResult per (scheduler, seed) found, in order of
// first appearance. Throws std::runtime_error naming `source` and the line.
std::vector<SimResult> read_run_csv(std::istream& in, const std::string& source);

}  // namespace v2xsched
