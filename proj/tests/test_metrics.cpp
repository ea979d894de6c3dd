#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "v2xsched/metrics.hpp"

using namespace v2xsched;

namespace {

SimResult run_with(std::uint64_t seed, std::vector<std::pair<std::uint64_t, std::uint64_t>> counts) {
  SimResult r;
  r.scheduler = "mode4-sps";
  r.seed = seed;
  double center = 50;
  for (auto [expected, received] : counts) {
    r.bins.push_back({center, 25, expected, received});
    center += 50;
  }
  return r;
}

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_run_csv(in, "runs.csv");
  } catch (const std::runtime_error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("bin counting") {
  SimConfig c;
  PrrAccumulator acc(c);
  acc.add(40, true);
  acc.add(41, true);
  acc.add(55, false);
  acc.add(74.9, true);
  acc.add(75, true);     // upper edge belongs to the next bin
  acc.add(24.99, true);  // below the first bin
  acc.add(400, true);
  const auto& bins = acc.bins();
  CHECK(bins[0].expected == 4);
  CHECK(bins[0].received == 3);
  CHECK(*bins[0].prr() == doctest::Approx(0.75));
  CHECK(bins[1].expected == 1);
  CHECK_FALSE(bins[5].prr().has_value());
}

TEST_CASE("accumulate over records") {
  SimConfig c;
  std::vector<RxRecord> recs;
  recs.push_back({0, 1, 2, 95, {true, 10, false}});
  recs.push_back({0, 1, 3, 105, {false, 10, true}});
  const auto acc = accumulate(recs, c);
  CHECK(acc.bins()[1].expected == 2);
  CHECK(acc.bins()[1].received == 1);
}

TEST_CASE("aggregate of identical runs has a zero-width band") {
  const std::vector<SimResult> rs{run_with(1, {{10, 8}}), run_with(2, {{20, 16}}), run_with(3, {{5, 4}})};
  const auto a = aggregate(rs, 4.417);
  CHECK(*a.bins[0].mean == doctest::Approx(0.8));
  CHECK(a.bins[0].ci_low == doctest::Approx(0.8));
  CHECK(a.bins[0].ci_high == doctest::Approx(0.8));
  CHECK(a.bins[0].n_seeds == 3);
}

TEST_CASE("aggregate band is z s / sqrt(n), clamped to [0, 1]") {
  const std::vector<SimResult> rs{run_with(1, {{10, 9}}), run_with(2, {{10, 10}})};
  const auto a = aggregate(rs, 4.417);
  CHECK(*a.bins[0].mean == doctest::Approx(0.95));
  CHECK(a.bins[0].ci_low == doctest::Approx(0.7292).epsilon(1e-4));
  CHECK(a.bins[0].ci_high == 1.0);
}

TEST_CASE("single seed is flagged and has no spread") {
  const std::vector<SimResult> rs{run_with(1, {{10, 7}, {0, 0}})};
  const auto a = aggregate(rs, 4.417);
  CHECK(a.bins[0].single_seed());
  CHECK(a.bins[0].ci_low == a.bins[0].ci_high);
  CHECK_FALSE(a.bins[1].mean.has_value());
  CHECK(a.bins[1].n_seeds == 0);
}

TEST_CASE("aggregate does not depend on seed order") {
  std::vector<SimResult> rs{run_with(1, {{7, 3}}), run_with(2, {{11, 10}}), run_with(3, {{13, 5}}),
                            run_with(4, {{17, 16}})};
  const auto ref = aggregate(rs, 4.417);
  std::sort(rs.begin(), rs.end(), [](const SimResult& a, const SimResult& b) { return a.seed > b.seed; });
  do {
    const auto a = aggregate(rs, 4.417);
    CHECK(*a.bins[0].mean == *ref.bins[0].mean);
    CHECK(a.bins[0].ci_low == ref.bins[0].ci_low);
  } while (std::next_permutation(rs.begin(), rs.end(),
                                 [](const SimResult& a, const SimResult& b) { return a.seed < b.seed; }));
}

TEST_CASE("aggregate rejects empty input and mismatched bins") {
  CHECK_THROWS_AS(aggregate(std::vector<SimResult>{}, 4.417), std::invalid_argument);
  const std::vector<SimResult> rs{run_with(1, {{1, 1}}), run_with(2, {{1, 1}, {1, 1}})};
  CHECK_THROWS_AS(aggregate(rs, 4.417), std::invalid_argument);
}

TEST_CASE("run file round trip") {
  const SimResult r = run_with(42, {{100, 97}, {0, 0}, {3, 1}});
  std::ostringstream out;
  write_run_csv(out, r);
  CHECK(out.str().rfind("scheduler,seed,bin_center_m,expected,received,prr\n", 0) == 0);
  CHECK(out.str().find("mode4-sps,42,100,0,0,NA\n") != std::string::npos);
  std::istringstream in(out.str());
  const auto back = read_run_csv(in, "x");
  REQUIRE(back.size() == 1);
  CHECK(back[0].seed == 42);
  CHECK(back[0].bins.size() == 3);
  CHECK(back[0].bins[2].received == 1);
}

TEST_CASE("summary and comparison formats") {
  const std::vector<SimResult> rs{run_with(1, {{10, 9}, {0, 0}})};
  const auto a = aggregate(rs, 4.417);
  std::ostringstream s;
  write_summary_csv(s, a);
  CHECK(s.str() == "scheduler,bin_center_m,mean_prr,ci_low,ci_high,n_seeds\n"
                   "mode4-sps,50,0.9,0.9,0.9,1\n"
                   "mode4-sps,100,NA,NA,NA,0\n");
  AggregateResult b = a;
  b.scheduler = "mode3-maxreuse";
  const std::vector<AggregateResult> both{b, a};
  std::ostringstream cmp;
  write_comparison_csv(cmp, both);
  CHECK(cmp.str() == "bin_center_m,mode3-maxreuse,mode4-sps\n50,0.9,0.9\n100,NA,NA\n");
}

TEST_CASE("malformed run files are reported with a line number") {
  const std::string header = "scheduler,seed,bin_center_m,expected,received,prr\n";
  CHECK(error_of("") == "runs.csv:1: empty file");
  CHECK(error_of("a,b\n").find("runs.csv:1: missing or wrong header") == 0);
  CHECK(error_of(header + "m,1,50,10,9,0.9\nm,1,100,10\n").find("runs.csv:3: expected 6 columns") == 0);
  CHECK(error_of(header + "m,x,50,10,9,0.9\n").find("runs.csv:2: bad seed") == 0);
  CHECK(error_of(header + "m,1,50,10,11,1.1\n").find("runs.csv:2: received exceeds expected") == 0);
  CHECK(error_of(header + "m,1,50,10,9,0.5\n").find("runs.csv:2: prr does not match") == 0);
  CHECK(error_of(header + "m,1,50,10,9,0.9\nm,1,50,10,9,0.9\n").find("runs.csv:3: duplicate bin") == 0);
  CHECK(error_of(header + "m,1,50,10,9,0.9\r\n").empty());
}
