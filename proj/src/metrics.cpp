#include "v2xsched/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace v2xsched {

std::optional<double> PrrBin::prr() const {
  if (expected == 0) return std::nullopt;
  return static_cast<double>(received) / static_cast<double>(expected);
}

PrrAccumulator::PrrAccumulator(const SimConfig& config) {
  for (double c : config.prr_bin_centers_m) bins_.push_back({c, config.prr_bin_halfwidth_m, 0, 0});
  std::sort(bins_.begin(), bins_.end(), [](const PrrBin& a, const PrrBin& b) { return a.center_m < b.center_m; });
}

void PrrAccumulator::add(double distance_m, bool received) {
  for (auto& b : bins_) {
    if (b.contains(distance_m)) {
      ++b.expected;
      if (received) ++b.received;
      return;
    }
  }
}

PrrAccumulator accumulate(std::span<const RxRecord> records, const SimConfig& config) {
  PrrAccumulator acc(config);
  for (const auto& r : records) acc.add(r);
  return acc;
}

AggregateResult aggregate(std::span<const SimResult> results, double z_score) {
  if (results.empty()) throw std::invalid_argument("aggregate needs at least one run");
  const auto& first = results.front();
  for (const auto& r : results) {
    bool same = r.bins.size() == first.bins.size();
    for (std::size_t i = 0; same && i < r.bins.size(); ++i) same = r.bins[i].center_m == first.bins[i].center_m;
    if (!same) {
      throw std::invalid_argument("run '" + r.scheduler + "' seed " + std::to_string(r.seed) +
                                  " has a different bin structure");
    }
  }

  AggregateResult out;
  out.scheduler = first.scheduler;
  for (std::size_t i = 0; i < first.bins.size(); ++i) {
    std::vector<double> values;
    for (const auto& r : results) {
      if (auto p = r.bins[i].prr()) values.push_back(*p);
    }
    // Fixed summation order regardless of seed order.
    std::sort(values.begin(), values.end());
    AggregateBin b;
    b.center_m = first.bins[i].center_m;
    b.n_seeds = static_cast<int>(values.size());
    if (!values.empty()) {
      double sum = 0;
      for (double x : values) sum += x;
      const double mean = sum / values.size();
      double half = 0;
      if (values.size() > 1) {
        double ss = 0;
        for (double x : values) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / (values.size() - 1));
        half = z_score * sd / std::sqrt(static_cast<double>(values.size()));
      }
      b.mean = mean;
      b.ci_low = std::clamp(mean - half, 0.0, 1.0);
      b.ci_high = std::clamp(mean + half, 0.0, 1.0);
    }
    out.bins.push_back(b);
  }
  return out;
}

namespace {

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : "NA"; }

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    cells.push_back(line.substr(pos, comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

template <typename T>
bool parse_num(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

void write_run_csv(std::ostream& out, const SimResult& result) {
  out << "scheduler,seed,bin_center_m,expected,received,prr\n";
  for (const auto& b : result.bins) {
    out << result.scheduler << ',' << result.seed << ',' << format_double(b.center_m) << ',' << b.expected
        << ',' << b.received << ',' << opt(b.prr()) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const AggregateResult& result) {
  out << "scheduler,bin_center_m,mean_prr,ci_low,ci_high,n_seeds\n";
  for (const auto& b : result.bins) {
    out << result.scheduler << ',' << format_double(b.center_m) << ',' << opt(b.mean) << ','
        << (b.mean ? format_double(b.ci_low) : "NA") << ',' << (b.mean ? format_double(b.ci_high) : "NA")
        << ',' << b.n_seeds << '\n';
  }
}

void write_comparison_csv(std::ostream& out, std::span<const AggregateResult> results) {
  std::vector<double> centers;
  for (const auto& r : results) {
    for (const auto& b : r.bins) centers.push_back(b.center_m);
  }
  std::sort(centers.begin(), centers.end());
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());

  out << "bin_center_m";
  for (const auto& r : results) out << ',' << r.scheduler;
  out << '\n';
  for (double c : centers) {
    out << format_double(c);
    for (const auto& r : results) {
      std::optional<double> mean;
      for (const auto& b : r.bins) {
        if (b.center_m == c) mean = b.mean;
      }
      out << ',' << opt(mean);
    }
    out << '\n';
  }
}

std::vector<SimResult> read_run_csv(std::istream& in, const std::string& source) {
  std::vector<SimResult> results;
  std::map<std::pair<std::string, std::uint64_t>, std::size_t> index;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error(source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "scheduler,seed,bin_center_m,expected,received,prr") fail("missing or wrong header");
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 6) fail("expected 6 columns, found " + std::to_string(cells.size()));
    SimResult key;
    key.scheduler = std::string(cells[0]);
    if (key.scheduler.empty()) fail("empty scheduler name");
    PrrBin bin;
    if (!parse_num(cells[1], key.seed)) fail("bad seed '" + std::string(cells[1]) + "'");
    if (!parse_num(cells[2], bin.center_m)) fail("bad bin_center_m '" + std::string(cells[2]) + "'");
    if (!parse_num(cells[3], bin.expected)) fail("bad expected '" + std::string(cells[3]) + "'");
    if (!parse_num(cells[4], bin.received)) fail("bad received '" + std::string(cells[4]) + "'");
    if (bin.received > bin.expected) fail("received exceeds expected");
    if (cells[5] == "NA") {
      if (bin.expected != 0) fail("prr is NA but expected is nonzero");
    } else {
      double prr = 0;
      if (!parse_num(cells[5], prr)) fail("bad prr '" + std::string(cells[5]) + "'");
      if (!bin.prr() || std::abs(*bin.prr() - prr) > 1e-9) fail("prr does not match received/expected");
    }
    auto [it, inserted] = index.try_emplace({key.scheduler, key.seed}, results.size());
    if (inserted) results.push_back(std::move(key));
    auto& r = results[it->second];
    for (const auto& b : r.bins) {
      if (b.center_m == bin.center_m) fail("duplicate bin " + std::string(cells[2]));
    }
    r.bins.push_back(bin);
  }
  if (line_no == 0) {
    line_no = 1;
    fail("empty file");
  }
  for (auto& r : results) {
    std::sort(r.bins.begin(), r.bins.end(), [](const PrrBin& a, const PrrBin& b) { return a.center_m < b.center_m; });
  }
  return results;
}

}  // namespace v2xsched
