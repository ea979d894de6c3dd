// v2xsim: multi-seed, multi-scheduler sweeps over the v2xsched C interface.
//
//   v2xsim run --out DIR [--config PATH] [--scheduler NAME]... [--seeds N | --seed-list a,b,c]
//              [--jobs N] [--trace] [--set key=value]...
//   v2xsim summarize --out DIR [--config PATH] RUN_FILE...
//   v2xsim validate-config [PATH] [--print]

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "v2xsched/v2xsched.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct ConfigHandle {
  v2x_config* ptr = nullptr;
  ~ConfigHandle() { v2x_config_free(ptr); }
};

std::vector<std::string> scheduler_names() {
  std::vector<std::string> out;
  for (size_t i = 0; i < v2x_scheduler_count(); ++i) out.emplace_back(v2x_scheduler_name(i));
  return out;
}

std::string joined_names() {
  std::string s;
  for (const auto& n : scheduler_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

bool report(v2x_status status, const std::string& context) {
  if (status == V2X_OK) return true;
  std::cerr << "v2xsim: " << context << ": " << v2x_last_error() << '\n';
  return false;
}

// Loads the config (or defaults), applies key=value overrides, validates.
bool load_config(const std::string& path, const std::vector<std::string>& overrides, ConfigHandle& cfg) {
  const v2x_status s = path.empty() ? v2x_config_new(&cfg.ptr) : v2x_config_load(path.c_str(), &cfg.ptr);
  if (!report(s, path.empty() ? "defaults" : path)) return false;
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "v2xsim: --set expects key=value, got '" << kv << "'\n";
      return false;
    }
    if (!report(v2x_config_set(cfg.ptr, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set " + kv)) {
      return false;
    }
  }
  return report(v2x_config_validate(cfg.ptr), "invalid configuration");
}

struct RunPlan {
  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<std::string> schedulers;
  int num_seeds = 5;
  std::vector<std::uint64_t> seed_list;
  std::string out_dir;
  int jobs = 0;
  bool trace = false;
};

// Removes every file in `created`, then the directory if this invocation made it and it is empty.
void remove_outputs(const std::vector<fs::path>& created, const fs::path& dir, bool made_dir) {
  std::error_code ec;
  for (const auto& p : created) fs::remove(p, ec);
  if (made_dir && fs::is_empty(dir, ec)) fs::remove(dir, ec);
}

int cmd_run(const RunPlan& plan) {
  ConfigHandle cfg;
  if (!load_config(plan.config_path, plan.overrides, cfg)) return kExitFailure;

  std::vector<std::uint64_t> seeds = plan.seed_list;
  if (seeds.empty()) {
    for (int s = 1; s <= plan.num_seeds; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  }
  std::vector<std::string> schedulers = plan.schedulers.empty() ? scheduler_names() : plan.schedulers;

  const fs::path dir(plan.out_dir);
  std::error_code ec;
  const bool made_dir = fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "v2xsim: cannot create " << dir << ": " << ec.message() << '\n';
    return kExitFailure;
  }

  struct Task {
    std::string scheduler;
    std::uint64_t seed;
    fs::path run_file;
    fs::path trace_file;
  };
  std::vector<Task> tasks;
  for (const auto& s : schedulers) {
    for (auto seed : seeds) {
      const std::string stem = s + "_" + std::to_string(seed);
      tasks.push_back({s, seed, dir / (stem + ".csv"), plan.trace ? dir / (stem + "_trace.csv") : fs::path()});
    }
  }

  std::vector<fs::path> created;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::size_t done = 0;

  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size() && !failed; i = next++) {
      const Task& t = tasks[i];
      {
        std::lock_guard lock(mu);
        if (!t.trace_file.empty()) created.push_back(t.trace_file);
        created.push_back(t.run_file);
      }
      v2x_result* result = nullptr;
      const std::string trace = t.trace_file.string();
      v2x_status s = v2x_run(cfg.ptr, t.scheduler.c_str(), t.seed, t.trace_file.empty() ? nullptr : trace.c_str(),
                             &result);
      if (s == V2X_OK) s = v2x_result_write(result, t.run_file.string().c_str());
      v2x_result_free(result);
      std::lock_guard lock(mu);
      if (!report(s, t.scheduler + " seed " + std::to_string(t.seed))) {
        failed = true;
        return;
      }
      ++done;
      std::cerr << "[" << done << "/" << tasks.size() << "] " << t.scheduler << " seed " << t.seed << '\n';
    }
  };

  unsigned jobs = plan.jobs > 0 ? static_cast<unsigned>(plan.jobs) : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  if (!failed) {
    std::vector<std::string> run_files;
    for (const auto& t : tasks) run_files.push_back(t.run_file.string());
    std::vector<const char*> paths;
    for (const auto& p : run_files) paths.push_back(p.c_str());
    if (!report(v2x_summarize(cfg.ptr, paths.data(), paths.size(), dir.string().c_str()), "summarize")) {
      failed = true;
    }
  }
  if (failed) {
    remove_outputs(created, dir, made_dir);
    return kExitFailure;
  }
  return 0;
}

int cmd_summarize(const std::string& config_path, const std::vector<std::string>& files, const std::string& out) {
  ConfigHandle cfg;
  if (!config_path.empty() && !load_config(config_path, {}, cfg)) return kExitFailure;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "v2xsim: cannot create " << out << ": " << ec.message() << '\n';
    return kExitFailure;
  }
  std::vector<const char*> paths;
  for (const auto& f : files) paths.push_back(f.c_str());
  return report(v2x_summarize(cfg.ptr, paths.data(), paths.size(), out.c_str()), "summarize") ? 0 : kExitFailure;
}

int cmd_validate(const std::string& path, bool print) {
  ConfigHandle cfg;
  if (!load_config(path, {}, cfg)) return kExitFailure;
  if (print) {
    size_t needed = 0;
    v2x_config_serialize(cfg.ptr, nullptr, 0, &needed);
    std::string text(needed, '\0');
    v2x_config_serialize(cfg.ptr, text.data(), text.size(), nullptr);
    text.pop_back();
    std::cout << text;
  } else {
    std::cout << (path.empty() ? "defaults" : path) << ": ok\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-V2X sidelink scheduling simulator"};
  app.require_subcommand(1);

  const auto known = scheduler_names();
  auto scheduler_check = [&](const std::string& s) -> std::string {
    for (const auto& n : known) {
      if (n == s) return {};
    }
    return "unknown scheduler '" + s + "'; valid names: " + joined_names();
  };

  RunPlan plan;
  auto* run = app.add_subcommand("run", "simulate every (scheduler, seed) pair and summarize");
  run->add_option("--config", plan.config_path, "configuration file (key = value)")->check(CLI::ExistingFile);
  run->add_option("--set", plan.overrides, "override one config key, key=value (repeatable)");
  run->add_option("--scheduler", plan.schedulers, "scheduler to run (repeatable; default all)")
      ->check(CLI::Validator(scheduler_check, "SCHEDULER"));
  auto* seeds_opt = run->add_option("--seeds", plan.num_seeds, "run seeds 1..N")->check(CLI::PositiveNumber);
  run->add_option("--seed-list", plan.seed_list, "explicit seeds, comma separated")
      ->delimiter(',')
      ->excludes(seeds_opt);
  run->add_option("--out", plan.out_dir, "output directory")->required();
  run->add_option("--jobs", plan.jobs, "parallel runs (default: available cores)")->check(CLI::PositiveNumber);
  run->add_flag("--trace", plan.trace, "also write one reception record per line for every run");

  std::string sum_config;
  std::string sum_out;
  std::vector<std::string> sum_files;
  auto* summarize = app.add_subcommand("summarize", "aggregate per-run files into summaries and a comparison table");
  summarize->add_option("--config", sum_config, "configuration file (for the confidence z-score)")
      ->check(CLI::ExistingFile);
  summarize->add_option("--out", sum_out, "output directory")->required();
  summarize->add_option("files", sum_files, "per-run files")->required();

  std::string val_path;
  bool val_print = false;
  auto* validate = app.add_subcommand("validate-config", "check a configuration file");
  validate->add_option("path", val_path, "configuration file (omit for the defaults)");
  validate->add_flag("--print", val_print, "print the complete resulting configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*run) return cmd_run(plan);
  if (*summarize) return cmd_summarize(sum_config, sum_files, sum_out);
  return cmd_validate(val_path, val_print);
}
