#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "v2xsched/v2xsched.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("v2xsched_capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

v2x_config* small_config() {
  v2x_config* c = nullptr;
  REQUIRE(v2x_config_parse("num_vehicles = 40\nsim_duration_ms = 1500\n", &c) == V2X_OK);
  return c;
}

}  // namespace

TEST_CASE("config handles") {
  v2x_config* c = nullptr;
  REQUIRE(v2x_config_new(&c) == V2X_OK);
  CHECK(v2x_config_validate(c) == V2X_OK);
  CHECK(v2x_config_set(c, "num_vehicles", "0") == V2X_OK);
  CHECK(v2x_config_validate(c) == V2X_ERR_CONFIG);
  CHECK(std::strstr(v2x_last_error(), "num_vehicles") != nullptr);
  CHECK(v2x_config_set(c, "warp_factor", "9") == V2X_ERR_CONFIG);
  CHECK(v2x_config_set(c, "num_vehicles", "ten") == V2X_ERR_CONFIG);

  size_t needed = 0;
  CHECK(v2x_config_serialize(c, nullptr, 0, &needed) == V2X_OK);
  std::vector<char> buf(needed);
  CHECK(v2x_config_serialize(c, buf.data(), buf.size(), nullptr) == V2X_OK);
  CHECK(std::strlen(buf.data()) + 1 == needed);
  CHECK(std::strstr(buf.data(), "num_vehicles = 0\n") != nullptr);
  char tiny[4];
  CHECK(v2x_config_serialize(c, tiny, sizeof tiny, nullptr) == V2X_OK);
  CHECK(std::strlen(tiny) == 3);
  v2x_config_free(c);

  CHECK(v2x_config_parse("bogus = 1\n", &c) == V2X_ERR_CONFIG);
  CHECK(std::strstr(v2x_last_error(), "line 1") != nullptr);
  CHECK(v2x_config_load("/nonexistent/x.cfg", &c) == V2X_ERR_IO);
  CHECK(v2x_config_new(nullptr) == V2X_ERR_ARGUMENT);
  CHECK(v2x_config_validate(nullptr) == V2X_ERR_ARGUMENT);
  v2x_config_free(nullptr);
}

TEST_CASE("config file round trip") {
  const fs::path dir = scratch_dir("cfg");
  v2x_config* c = small_config();
  const std::string path = (dir / "a.cfg").string();
  REQUIRE(v2x_config_write(c, path.c_str()) == V2X_OK);
  v2x_config* back = nullptr;
  REQUIRE(v2x_config_load(path.c_str(), &back) == V2X_OK);
  char a[8192], b[8192];
  v2x_config_serialize(c, a, sizeof a, nullptr);
  v2x_config_serialize(back, b, sizeof b, nullptr);
  CHECK(std::string(a) == std::string(b));
  v2x_config_free(c);
  v2x_config_free(back);
}

TEST_CASE("scheduler names") {
  REQUIRE(v2x_scheduler_count() == 3);
  CHECK(std::string(v2x_scheduler_name(0)) == "mode3-minpower");
  CHECK(std::string(v2x_scheduler_name(1)) == "mode3-maxreuse");
  CHECK(std::string(v2x_scheduler_name(2)) == "mode4-sps");
  CHECK(v2x_scheduler_name(3) == nullptr);
}

TEST_CASE("run, inspect and write a result") {
  const fs::path dir = scratch_dir("run");
  v2x_config* c = small_config();
  v2x_result* r = nullptr;
  const std::string trace = (dir / "trace.csv").string();
  REQUIRE(v2x_run(c, "mode3-maxreuse", 5, trace.c_str(), &r) == V2X_OK);
  CHECK(std::string(v2x_result_scheduler(r)) == "mode3-maxreuse");
  CHECK(v2x_result_seed(r) == 5);
  REQUIRE(v2x_result_bin_count(r) == 6);
  double center = 0;
  uint64_t expected = 0, received = 0;
  CHECK(v2x_result_bin(r, 0, &center, &expected, &received) == V2X_OK);
  CHECK(center == 50);
  CHECK(received <= expected);
  CHECK(v2x_result_bin(r, 6, &center, &expected, &received) == V2X_ERR_ARGUMENT);

  v2x_run_stats st{};
  REQUIRE(v2x_result_stats(r, &st) == V2X_OK);
  CHECK(st.tx_events > 0);
  CHECK(st.received_while_transmitting == 0);
  CHECK(st.reselections > 0);
  CHECK(st.min_lifetime_s >= 0.5);
  CHECK(st.max_lifetime_s <= 1.5);

  const std::string out = (dir / "run.csv").string();
  CHECK(v2x_result_write(r, out.c_str()) == V2X_OK);
  CHECK(slurp(out).rfind("scheduler,seed,bin_center_m,expected,received,prr\n", 0) == 0);
  CHECK(slurp(trace).rfind("time_ms,tx_id,rx_id,distance_m,sinr_db,received,blocked_half_duplex\n", 0) == 0);
  v2x_result_free(r);
  v2x_config_free(c);
}

TEST_CASE("run errors") {
  v2x_config* c = small_config();
  v2x_result* r = nullptr;
  CHECK(v2x_run(c, "mode9", 1, nullptr, &r) == V2X_ERR_SCHEDULER);
  const std::string msg = v2x_last_error();
  CHECK(msg.find("mode3-minpower, mode3-maxreuse, mode4-sps") != std::string::npos);
  CHECK(r == nullptr);
  v2x_config_set(c, "cam_rate_hz", "5");
  CHECK(v2x_run(c, "mode4-sps", 1, nullptr, &r) == V2X_ERR_CONFIG);
  CHECK(std::strstr(v2x_last_error(), "rate/subframe mismatch") != nullptr);
  v2x_config_set(c, "cam_rate_hz", "10");
  CHECK(v2x_run(c, "mode4-sps", 1, "/nonexistent/dir/trace.csv", &r) == V2X_ERR_IO);
  CHECK(v2x_run(nullptr, "mode4-sps", 1, nullptr, &r) == V2X_ERR_ARGUMENT);
  v2x_config_free(c);
}

TEST_CASE("summarize reproduces a supplied curve") {
  const fs::path dir = scratch_dir("sum");
  {
    std::ofstream f(dir / "mode4-sps_1.csv", std::ios::binary);
    f << "scheduler,seed,bin_center_m,expected,received,prr\n"
         "mode4-sps,1,50,10000,9814,0.9814\n"
         "mode4-sps,1,300,10000,5048,0.5048\n";
  }
  const std::string in = (dir / "mode4-sps_1.csv").string();
  const char* paths[] = {in.c_str()};
  REQUIRE(v2x_summarize(nullptr, paths, 1, dir.string().c_str()) == V2X_OK);
  const std::string summary = slurp(dir / "summary_mode4-sps.csv");
  CHECK(summary == "scheduler,bin_center_m,mean_prr,ci_low,ci_high,n_seeds\n"
                   "mode4-sps,50,0.9814,0.9814,0.9814,1\n"
                   "mode4-sps,300,0.5048,0.5048,0.5048,1\n");
  CHECK(slurp(dir / "comparison.csv") == "bin_center_m,mode4-sps\n50,0.9814\n300,0.5048\n");

  // Idempotent.
  REQUIRE(v2x_summarize(nullptr, paths, 1, dir.string().c_str()) == V2X_OK);
  CHECK(slurp(dir / "summary_mode4-sps.csv") == summary);
}

TEST_CASE("summarize failures leave nothing behind") {
  const fs::path dir = scratch_dir("sumfail");
  const fs::path out = dir / "out";
  fs::create_directories(out);
  CHECK(v2x_summarize(nullptr, nullptr, 0, out.string().c_str()) == V2X_ERR_ARGUMENT);
  {
    std::ofstream f(dir / "bad.csv", std::ios::binary);
    f << "scheduler,seed,bin_center_m,expected,received,prr\nmode4-sps,1,50,10,12,1.2\n";
  }
  const std::string bad = (dir / "bad.csv").string();
  const char* paths[] = {bad.c_str()};
  CHECK(v2x_summarize(nullptr, paths, 1, out.string().c_str()) == V2X_ERR_FORMAT);
  CHECK(std::string(v2x_last_error()).find("bad.csv:2:") != std::string::npos);
  CHECK(fs::is_empty(out));

  const std::string missing = (dir / "missing.csv").string();
  const char* more[] = {missing.c_str()};
  CHECK(v2x_summarize(nullptr, more, 1, out.string().c_str()) == V2X_ERR_IO);
  CHECK(fs::is_empty(out));
}
