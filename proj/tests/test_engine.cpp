#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "v2xsched/engine.hpp"

using namespace v2xsched;

namespace {

SimConfig small(int vehicles, long duration_ms) {
  SimConfig c;
  c.num_vehicles = vehicles;
  c.sim_duration_ms = duration_ms;
  return c;
}

}  // namespace

TEST_CASE("bootstrap cycles a permutation of the grid") {
  SimConfig c;
  WorldState w = make_world(c, 17);
  bootstrap(w, c);
  CHECK(holders_consistent(w, c));
  for (const auto& h : w.holders) CHECK(h.size() == 2);
  for (double e : w.sps_expiry_ms) {
    CHECK(e >= 0);
    CHECK(e <= 1500);
  }
  for (std::size_t v = 0; v < w.fleet.size(); ++v) CHECK(w.sensing[v].tx_subframe() == w.allocation[v].subframe);
}

TEST_CASE("bootstrap expiries are uniform over [0, 1.5 s]") {
  SimConfig c;
  c.num_vehicles = 10000;
  WorldState w = make_world(c, 5);
  bootstrap(w, c);
  std::vector<double> e = w.sps_expiry_ms;
  std::sort(e.begin(), e.end());
  double d = 0;
  const double n = static_cast<double>(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double f = e[i] / 1500.0;
    d = std::max({d, std::abs((i + 1) / n - f), std::abs(f - i / n)});
  }
  CHECK(d < 1.628 / std::sqrt(n));  // Kolmogorov-Smirnov, alpha = 0.01
}

TEST_CASE("a lone vehicle gets one subchannel and no receivers") {
  const auto cfg = validate(small(1, 3000));
  WorldState w = make_world(*cfg, 1);
  bootstrap(w, *cfg);
  int held = 0;
  for (const auto& h : w.holders) held += static_cast<int>(h.size());
  CHECK(held == 1);
  RunStats stats;
  RunOptions opt;
  opt.stats = &stats;
  const auto r = run(cfg, "mode4-sps", 1, opt);
  CHECK(stats.tx_events > 0);
  CHECK(stats.rx_records == 0);
  for (const auto& b : r.bins) CHECK_FALSE(b.prr().has_value());
}

TEST_CASE("two close vehicles on a clean channel always hear each other") {
  // One sub-band per subframe, so distinct subchannels never share a subframe.
  SimConfig c = small(2, 4000);
  c.num_subbands = 1;
  c.shadow_std_db = 0;
  c.pathloss_exponent = 2.27;
  c.road_length_m = 200;
  c.prr_bin_centers_m = {50};
  c.prr_bin_halfwidth_m = 50;
  const auto cfg = validate(c);
  for (const auto& s : scheduler_names()) {
    CAPTURE(s);
    RunStats stats;
    RunOptions opt;
    opt.stats = &stats;
    const auto r = run(cfg, s, 3, opt);
    CHECK(stats.reselections > 0);
    CHECK(r.bins[0].expected > 0);
    CHECK(r.bins[0].prr() == 1.0);
  }
}

TEST_CASE("receivers never decode while transmitting") {
  const auto cfg = validate(small(200, 3000));
  for (const auto& s : scheduler_names()) {
    CAPTURE(s);
    long tx_time = -1;
    std::set<int> txs;
    std::uint64_t blocked = 0, violations = 0;
    RunStats stats;
    RunOptions opt;
    opt.stats = &stats;
    opt.on_tx = [&](const TxEvent& e) {
      if (e.time_ms != tx_time) {
        txs.clear();
        tx_time = e.time_ms;
      }
      txs.insert(e.tx_id);
    };
    opt.on_rx = [&](const RxRecord& r) {
      const bool rx_transmits = r.time_ms == tx_time && txs.count(r.rx_id) > 0;
      CHECK(r.outcome.blocked_half_duplex == rx_transmits);
      if (rx_transmits) ++blocked;
      if (rx_transmits && r.outcome.received) ++violations;
    };
    run(cfg, s, 9, opt);
    CHECK(blocked > 0);
    CHECK(violations == 0);
    CHECK(stats.received_while_transmitting == 0);
  }
}

TEST_CASE("runs are reproducible and seeds matter") {
  const auto cfg = validate(small(150, 2500));
  for (const auto& s : scheduler_names()) {
    CAPTURE(s);
    std::ostringstream t1, t2;
    RunOptions o1, o2;
    o1.trace = &t1;
    o2.trace = &t2;
    const auto a = run(cfg, s, 77, o1);
    const auto b = run(cfg, s, 77, o2);
    CHECK(a == b);
    CHECK(t1.str() == t2.str());
    CHECK(t1.str().rfind("time_ms,tx_id,rx_id,distance_m,sinr_db,received,blocked_half_duplex\n", 0) == 0);
    CHECK_FALSE(run(cfg, s, 78) == a);
  }
}

TEST_CASE("bookkeeping stays consistent through reselections") {
  const auto cfg = validate(small(300, 3000));
  for (const auto& s : scheduler_names()) {
    CAPTURE(s);
    RunStats stats;
    RunOptions opt;
    opt.stats = &stats;
    opt.check_invariants = true;
    std::uint64_t per_subframe_ok = 0;
    opt.on_subframe = [&](const WorldState& w) {
      // Every vehicle's sensing hides exactly the subframe it transmits in.
      bool ok = true;
      for (std::size_t v = 0; v < w.fleet.size(); ++v) ok &= w.sensing[v].tx_subframe() == w.allocation[v].subframe;
      per_subframe_ok += ok;
    };
    run(cfg, s, 2, opt);
    CHECK(per_subframe_ok == 3000);
    CHECK(stats.holder_inconsistencies == 0);
    CHECK(stats.reselections == stats.lifetimes_s.size());
    CHECK(stats.reselections > 0);
    for (double l : stats.lifetimes_s) {
      CHECK(l >= 0.5);
      CHECK(l <= 1.5);
    }
    if (s == "mode4-sps") {
      CHECK(stats.mode4_selections == stats.reselections);
      CHECK(stats.candidate_floor_violations == 0);
    }
  }
}

TEST_CASE("sensing-based schedulers wait for a full window") {
  const auto cfg = validate(small(100, 999));
  RunStats stats;
  RunOptions opt;
  opt.stats = &stats;
  run(cfg, "mode4-sps", 1, opt);
  CHECK(stats.reselections == 0);
  run(cfg, "mode3-minpower", 1, opt);
  CHECK(stats.reselections == 0);
  run(cfg, "mode3-maxreuse", 1, opt);
  CHECK(stats.reselections > 0);
}

TEST_CASE("unknown scheduler is rejected before simulating") {
  const auto cfg = validate(small(10, 100));
  CHECK_THROWS_AS(run(cfg, "round-robin", 1), std::invalid_argument);
}
