#include "v2xsched/engine.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace v2xsched {

WorldState make_world(const SimConfig& config, std::uint64_t seed) {
  WorldState w;
  w.rng.seed(seed);
  w.fleet = init_fleet(config, w.rng);
  const auto n = static_cast<std::size_t>(config.num_vehicles);
  w.allocation.assign(n, ResourceId{});
  w.sps_expiry_ms.assign(n, 0.0);
  w.sensing.assign(n, SensingState(config.num_subframes, config.num_subbands, config.sensing_window_ms));
  w.shadowing = ShadowingTable(config.num_vehicles);
  w.holders.assign(static_cast<std::size_t>(config.num_subchannels()), {});
  return w;
}

void bootstrap(WorldState& world, const SimConfig& config) {
  std::vector<int> perm(static_cast<std::size_t>(config.num_subchannels()));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), world.rng);
  for (auto& h : world.holders) h.clear();
  std::uniform_real_distribution<double> expiry(0.0, 1000.0 * config.sps_period_max_s);
  for (std::size_t v = 0; v < world.fleet.size(); ++v) {
    const int flat = perm[v % perm.size()];
    world.allocation[v] = from_flat(flat, config);
    world.holders[static_cast<std::size_t>(flat)].push_back(static_cast<int>(v));
    world.sensing[v].set_tx_subframe(world.allocation[v].subframe);
    world.sps_expiry_ms[v] = expiry(world.rng);
  }
}

bool holders_consistent(const WorldState& world, const SimConfig& config) {
  std::size_t total = 0;
  for (std::size_t s = 0; s < world.holders.size(); ++s) {
    for (int v : world.holders[s]) {
      if (flat_index(world.allocation[static_cast<std::size_t>(v)], config) != static_cast<int>(s)) return false;
    }
    total += world.holders[s].size();
  }
  return total == world.allocation.size();
}

namespace {

void reassign(WorldState& world, const AllocationDecision& d, const SimConfig& config) {
  const auto v = static_cast<std::size_t>(d.vehicle_id);
  auto& old_holders = world.holders[static_cast<std::size_t>(flat_index(world.allocation[v], config))];
  old_holders.erase(std::find(old_holders.begin(), old_holders.end(), d.vehicle_id));
  world.allocation[v] = d.resource;
  world.sensing[v].set_tx_subframe(d.resource.subframe);
  world.holders[static_cast<std::size_t>(flat_index(d.resource, config))].push_back(d.vehicle_id);
  world.sps_expiry_ms[v] = d.sps_expiry_ms;
}

}  // namespace

SimResult run(const ValidatedConfig& validated, std::string_view scheduler_name, std::uint64_t seed,
              const RunOptions& options) {
  const SimConfig& config = validated.get();
  auto scheduler = make_scheduler(scheduler_name, config);

  WorldState world = make_world(config, seed);
  bootstrap(world, config);

  RunStats local_stats;
  RunStats& stats = options.stats ? *options.stats : local_stats;
  stats = RunStats{};

  const int n = config.num_vehicles;
  const int subbands = config.num_subbands;
  const double range = config.evaluation_range_m();
  const double noise_mw = dbm_to_mw(noise_power_dbm(config));
  const LinkBudget budget(config);
  PrrAccumulator acc(config);

  if (options.trace) *options.trace << "time_ms,tx_id,rx_id,distance_m,sinr_db,received,blocked_half_duplex\n";

  std::vector<int> txs;
  std::vector<char> is_tx(static_cast<std::size_t>(n), 0);
  std::vector<double> power;  // [k][v] received mW from transmitter k
  std::vector<double> dist;   // [k][v]
  std::vector<double> subband_mw(static_cast<std::size_t>(subbands));
  std::vector<int> batch;

  for (long t = 0; t < config.sim_duration_ms; ++t) {
    world.time_ms = t;
    advance(world.fleet, 1e-3, config);
    const int subframe = static_cast<int>(t % config.num_subframes);

    txs.clear();
    for (int v = 0; v < n; ++v) {
      is_tx[static_cast<std::size_t>(v)] = world.allocation[static_cast<std::size_t>(v)].subframe == subframe;
      if (is_tx[static_cast<std::size_t>(v)]) txs.push_back(v);
    }

    // Link gains from every transmitter to every vehicle.
    const std::size_t k_count = txs.size();
    power.assign(k_count * static_cast<std::size_t>(n), 0.0);
    dist.assign(k_count * static_cast<std::size_t>(n), 0.0);
    for (std::size_t k = 0; k < k_count; ++k) {
      const int tx = txs[k];
      const auto& a = world.fleet[static_cast<std::size_t>(tx)];
      stats.tx_events++;
      if (options.on_tx) options.on_tx(TxEvent{t, tx, world.allocation[static_cast<std::size_t>(tx)]});
      double* pk = &power[k * n];
      double* dk = &dist[k * n];
      for (int v = 0; v < n; ++v) {
        if (v == tx) continue;
        const auto& b = world.fleet[static_cast<std::size_t>(v)];
        const double d = distance(a, b, config);
        const double shadow = world.shadowing.sample(a, b, world.rng, config);
        dk[v] = d;
        pk[v] = budget.rx_mw(d, shadow);
      }
    }

    // Reception within the tracked range; co-subchannel transmitters interfere.
    for (std::size_t k = 0; k < k_count; ++k) {
      const int tx = txs[k];
      const int band = world.allocation[static_cast<std::size_t>(tx)].subband;
      for (int v = 0; v < n; ++v) {
        if (v == tx || !(dist[k * n + v] < range)) continue;
        double interference = 0;
        for (std::size_t k2 = 0; k2 < k_count; ++k2) {
          if (k2 != k && world.allocation[static_cast<std::size_t>(txs[k2])].subband == band) {
            interference += power[k2 * n + v];
          }
        }
        const bool blocked = is_tx[static_cast<std::size_t>(v)] != 0;
        const RxRecord rec{t, tx, v, dist[k * n + v],
                           evaluate_reception_mw(power[k * n + v], interference, noise_mw, blocked, config)};
        acc.add(rec);
        stats.rx_records++;
        if (rec.outcome.received && blocked) stats.received_while_transmitting++;
        if (options.on_rx) options.on_rx(rec);
        if (options.trace) {
          *options.trace << t << ',' << tx << ',' << v << ',' << format_double(rec.distance_m) << ','
                         << format_double(rec.outcome.sinr_db) << ',' << (rec.outcome.received ? 1 : 0) << ','
                         << (blocked ? 1 : 0) << '\n';
        }
      }
    }

    // Sensing: total power per sub-band of this subframe, masked while transmitting.
    for (int v = 0; v < n; ++v) {
      auto& s = world.sensing[static_cast<std::size_t>(v)];
      if (is_tx[static_cast<std::size_t>(v)]) {
        s.mask(t);
        continue;
      }
      std::fill(subband_mw.begin(), subband_mw.end(), noise_mw);
      for (std::size_t k = 0; k < k_count; ++k) {
        subband_mw[static_cast<std::size_t>(world.allocation[static_cast<std::size_t>(txs[k])].subband)] +=
            power[k * n + v];
      }
      s.record(t, subband_mw);
    }

    // SPS expiries; sensing-based schedulers wait for a full window of history.
    const bool history_ready = !scheduler->needs_sensing() || t + 1 >= config.sensing_window_ms;
    const bool serving =
        !scheduler->centralized() || (t + 1) % config.mode3_batch_period_ms == 0;
    batch.clear();
    if (history_ready && serving) {
      for (int v = 0; v < n; ++v) {
        if (world.sps_expiry_ms[static_cast<std::size_t>(v)] <= static_cast<double>(t)) batch.push_back(v);
      }
    }
    if (!batch.empty()) {
      const WorldView view{&world.fleet, &world.holders, world.sensing, world.allocation};
      const auto decisions = scheduler->schedule(static_cast<double>(t), batch, view, world.rng);
      for (const auto& d : decisions) {
        reassign(world, d, config);
        stats.lifetimes_s.push_back(d.lifetime_s);
        stats.reselections++;
      }
    }

    if (options.check_invariants && !holders_consistent(world, config)) stats.holder_inconsistencies++;
    if (options.on_subframe) options.on_subframe(world);
  }

  stats.mode4_selections = static_cast<std::uint64_t>(scheduler->stats().mode4_selections);
  stats.candidate_floor_violations = static_cast<std::uint64_t>(scheduler->stats().candidate_floor_violations);
  stats.min_candidates = scheduler->stats().min_candidates;

  SimResult result;
  result.scheduler = std::string(scheduler->name());
  result.seed = seed;
  result.bins = acc.bins();
  return result;
}

}  // namespace v2xsched
