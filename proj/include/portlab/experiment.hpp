#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "portlab/market.hpp"
#include "portlab/metrics.hpp"
#include "portlab/strategy.hpp"
#include "portlab/version.hpp"

namespace portlab {

// Configuration or input file is invalid; the message names the field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A trial aborted the campaign.
struct TrialFailure : std::runtime_error {
  TrialFailure(std::size_t trial, const std::string& what)
      : std::runtime_error("trial " + std::to_string(trial) + " failed: " + what),
        trial_index(trial) {}
  std::size_t trial_index;
};

struct MarketSpec {
  std::vector<HestonParams> assets;
  Matrix correlations;  // empty = identity

  Matrix resolved_correlations() const {
    return correlations.empty() ? Matrix::identity(assets.size()) : correlations;
  }
  bool operator==(const MarketSpec&) const = default;
};

// One portfolio under comparison. Arms without a market override run on the
// experiment's base market and share its scenario within a trial (paired
// comparison); an override gets its own paths, driven by the same per-trial
// stream (common random numbers).
struct ExperimentArm {
  std::string name;
  StrategySpec strategy;
  std::optional<MarketSpec> market;
};

enum class SweepParameter { none, mu_per_year, cash_share };

inline const char* sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::mu_per_year: return "mu_per_year";
    case SweepParameter::cash_share: return "cash_share";
    default: return "none";
  }
}

// Arms whose final growths are differenced, reported as g(a) - g(b) at t = T.
struct ComparisonSpec {
  std::string arm_a;
  std::string arm_b;
};

struct ExperimentConfig {
  std::string family = "custom";
  double horizon_years = 2.0;
  double dt_years = 0.00390625;  // 2^-8
  MarketSpec market;
  std::vector<ExperimentArm> arms;
  SweepParameter sweep = SweepParameter::none;
  std::vector<double> sweep_values;
  std::vector<ComparisonSpec> comparisons;
  std::size_t trials = 1000;  // MCt
  std::uint64_t seed = 12345;
  double initial_wealth = 1000.0;

  void validate() const { validate_market_only(); validate_campaign(); }

  // Enough to simulate paths: grid and market.
  void validate_market_only() const {
    TimeGrid grid(horizon_years, dt_years);  // throws naming the field
    (void)grid;
    if (market.assets.empty()) throw ConfigError("market.assets: need at least one asset");
    for (std::size_t i = 0; i < market.assets.size(); ++i) {
      try {
        market.assets[i].validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError("market.assets[" + std::to_string(i) + "]: " + e.what());
      }
    }
    check_market_matrix(market, "market");
  }

  void validate_campaign() const {
    if (trials < 1) throw ConfigError("trials: must be >= 1");
    if (!(initial_wealth > 0.0)) throw ConfigError("initial_wealth: must be > 0");
    if (arms.empty()) throw ConfigError("arms: need at least one arm");
    for (std::size_t a = 0; a < arms.size(); ++a) {
      const auto& arm = arms[a];
      const std::string where = "arms[" + std::to_string(a) + "]";
      if (arm.name.empty()) throw ConfigError(where + ".name: must be non-empty");
      for (std::size_t b = 0; b < a; ++b)
        if (arms[b].name == arm.name)
          throw ConfigError(where + ".name: duplicate arm name '" + arm.name + "'");
      try {
        arm.strategy.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ".strategy: " + e.what());
      }
      const MarketSpec& m = arm.market ? *arm.market : market;
      if (arm.market) {
        if (arm.market->assets.empty())
          throw ConfigError(where + ".market.assets: need at least one asset");
        for (std::size_t i = 0; i < arm.market->assets.size(); ++i) {
          try {
            arm.market->assets[i].validate();
          } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ".market.assets[" + std::to_string(i) + "]: " + e.what());
          }
        }
        check_market_matrix(*arm.market, where + ".market");
      }
      for (std::size_t idx : arm.strategy.assets_held)
        if (idx >= m.assets.size())
          throw ConfigError(where + ".strategy.assets_held: index " + std::to_string(idx) +
                            " out of range");
    }
    if (sweep == SweepParameter::none) {
      if (!sweep_values.empty())
        throw ConfigError("sweep.values: values given but no sweep parameter");
    } else {
      if (sweep_values.empty()) throw ConfigError("sweep.values: must be non-empty");
      for (double v : sweep_values) {
        if (!std::isfinite(v)) throw ConfigError("sweep.values: must be finite");
        if (sweep == SweepParameter::cash_share && !(v >= 0.0 && v <= 1.0))
          throw ConfigError("sweep.values: cash_share values must lie in [0, 1]");
      }
    }
    for (std::size_t c = 0; c < comparisons.size(); ++c) {
      const auto& cmp = comparisons[c];
      const std::string where = "comparisons[" + std::to_string(c) + "]";
      if (!has_arm(cmp.arm_a)) throw ConfigError(where + ".arm_a: unknown arm '" + cmp.arm_a + "'");
      if (!has_arm(cmp.arm_b)) throw ConfigError(where + ".arm_b: unknown arm '" + cmp.arm_b + "'");
    }
  }

  bool has_arm(const std::string& name) const {
    for (const auto& a : arms)
      if (a.name == name) return true;
    return false;
  }

 private:
  static void check_market_matrix(const MarketSpec& m, const std::string& where) {
    if (m.correlations.empty()) return;
    if (m.correlations.rows() != m.assets.size() || m.correlations.cols() != m.assets.size())
      throw ConfigError(where + ".correlations: must be n x n for n assets");
    try {
      CorrelationMatrix cm(m.correlations);
      (void)validate_correlations(cm);
    } catch (const std::exception& e) {
      throw ConfigError(where + ".correlations: " + std::string(e.what()));
    }
  }
};

// Averaged growth curve for one arm at one sweep value (or the single run of
// an unswept campaign).
struct ArmCurve {
  std::string arm;
  std::optional<double> sweep_value;
  std::vector<double> mean_growth;
  std::vector<double> stderr_growth;

  bool operator==(const ArmCurve&) const = default;
};

struct ComparisonPoint {
  std::optional<double> sweep_value;
  double mean_diff = 0.0;
  double stderr_diff = 0.0;

  bool operator==(const ComparisonPoint&) const = default;
};

struct ComparisonCurve {
  std::string arm_a;
  std::string arm_b;
  std::vector<ComparisonPoint> points;

  bool operator==(const ComparisonCurve&) const = default;
};

struct ExperimentResult {
  ExperimentConfig config;  // resolved echo, provenance
  std::string version;
  std::vector<double> time_years;  // grid points
  std::vector<ArmCurve> curves;    // arms x sweep values, arm-major
  std::vector<ComparisonCurve> comparisons;
};

namespace detail {

inline ExperimentConfig apply_sweep(ExperimentConfig config, double value) {
  switch (config.sweep) {
    case SweepParameter::mu_per_year:
      for (auto& a : config.market.assets) a.mu = value;
      for (auto& arm : config.arms)
        if (arm.market)
          for (auto& a : arm.market->assets) a.mu = value;
      break;
    case SweepParameter::cash_share:
      for (auto& arm : config.arms)
        if (arm.strategy.kind == StrategyKind::cash_passive) arm.strategy.cash_share = value;
      break;
    case SweepParameter::none:
      break;
  }
  return config;
}

// Per-(sweep, chunk) partial statistics; folded in unit order afterwards.
struct ChunkStats {
  std::vector<RunningStat> arm_point;  // arms x grid points, arm-major
  std::vector<RunningStat> pair_final; // one per comparison
};

}  // namespace detail

// Run a campaign: for each sweep value and trial, simulate the market(s) once
// and run every arm on the shared realization, then aggregate growth curves.
//
// The unit of parallel work is (sweep value, fixed-size chunk of trials).
// Chunks accumulate their own statistics sequentially and the chunk partials
// are merged in index order, so the result is bit-identical for any worker
// count. A throwing trial aborts the whole campaign.
inline ExperimentResult run_experiment(const ExperimentConfig& config, unsigned workers = 0) {
  config.validate();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());

  const TimeGrid grid(config.horizon_years, config.dt_years);
  const std::size_t points = grid.points();
  const std::size_t n_arms = config.arms.size();
  const std::size_t n_pairs = config.comparisons.size();
  const bool swept = config.sweep != SweepParameter::none;
  const std::size_t n_sweep = swept ? config.sweep_values.size() : 1;

  // Pre-resolve the per-sweep configs once; workers only read them.
  std::vector<ExperimentConfig> resolved;
  resolved.reserve(n_sweep);
  for (std::size_t s = 0; s < n_sweep; ++s)
    resolved.push_back(swept ? detail::apply_sweep(config, config.sweep_values[s]) : config);

  // Comparison arm indices.
  std::vector<std::pair<std::size_t, std::size_t>> pair_idx(n_pairs);
  for (std::size_t c = 0; c < n_pairs; ++c) {
    for (std::size_t a = 0; a < n_arms; ++a) {
      if (config.arms[a].name == config.comparisons[c].arm_a) pair_idx[c].first = a;
      if (config.arms[a].name == config.comparisons[c].arm_b) pair_idx[c].second = a;
    }
  }

  constexpr std::size_t kChunk = 50;
  const std::size_t n_chunks = (config.trials + kChunk - 1) / kChunk;
  const std::size_t n_units = n_sweep * n_chunks;

  std::vector<detail::ChunkStats> slots(n_units);
  std::atomic<std::size_t> next_unit{0};
  std::atomic<bool> aborted{false};
  std::mutex failure_mutex;
  std::optional<TrialFailure> failure;

  auto process_unit = [&](std::size_t unit) {
    const std::size_t sweep_i = unit / n_chunks;
    const std::size_t chunk_i = unit % n_chunks;
    const ExperimentConfig& cfg = resolved[sweep_i];
    const std::size_t lo = chunk_i * kChunk;
    const std::size_t hi = std::min(lo + kChunk, cfg.trials);

    detail::ChunkStats stats;
    stats.arm_point.resize(n_arms * points);
    stats.pair_final.resize(n_pairs);
    std::vector<double> final_growth(n_arms);

    const CorrelationMatrix base_corr(cfg.market.resolved_correlations());
    for (std::size_t t = lo; t < hi; ++t) {
      try {
        const MarketScenario base =
            simulate_paths(cfg.market.assets, base_corr, grid, cfg.seed, t);
        std::optional<MarketScenario> own;  // scratch for override arms
        for (std::size_t a = 0; a < n_arms; ++a) {
          const ExperimentArm& arm = cfg.arms[a];
          const MarketScenario* scenario = &base;
          if (arm.market) {
            own = simulate_paths(arm.market->assets,
                                 CorrelationMatrix(arm.market->resolved_correlations()), grid,
                                 cfg.seed, t);
            scenario = &*own;
          }
          const StrategyRun run = run_strategy(*scenario, arm.strategy, cfg.initial_wealth);
          const std::vector<double> g = growth_series(run.wealth, grid);
          for (std::size_t k = 0; k < points; ++k) stats.arm_point[a * points + k].add(g[k]);
          final_growth[a] = g.back();
        }
        for (std::size_t c = 0; c < n_pairs; ++c)
          stats.pair_final[c].add(final_growth[pair_idx[c].first] -
                                  final_growth[pair_idx[c].second]);
      } catch (const std::exception& e) {
        {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure.emplace(t, e.what());
        }
        aborted.store(true);
        return;
      }
    }
    slots[unit] = std::move(stats);
  };

  auto worker_loop = [&] {
    for (;;) {
      if (aborted.load()) return;
      const std::size_t unit = next_unit.fetch_add(1);
      if (unit >= n_units) return;
      process_unit(unit);
    }
  };

  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(workers, n_units));
  if (n_threads <= 1) {
    worker_loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker_loop);
    for (auto& th : pool) th.join();
  }
  if (failure) throw *failure;

  // Fold chunk partials in unit order.
  ExperimentResult result;
  result.config = config;
  result.version = kVersion;
  result.time_years.resize(points);
  for (std::size_t k = 0; k < points; ++k) result.time_years[k] = grid.time_at(k);

  for (std::size_t a = 0; a < n_arms; ++a) {
    for (std::size_t s = 0; s < n_sweep; ++s) {
      std::vector<RunningStat> folded(points);
      for (std::size_t c = 0; c < n_chunks; ++c) {
        const auto& slot = slots[s * n_chunks + c];
        for (std::size_t k = 0; k < points; ++k)
          folded[k].merge(slot.arm_point[a * points + k]);
      }
      ArmCurve curve;
      curve.arm = config.arms[a].name;
      if (swept) curve.sweep_value = config.sweep_values[s];
      curve.mean_growth.resize(points);
      curve.stderr_growth.resize(points);
      for (std::size_t k = 0; k < points; ++k) {
        curve.mean_growth[k] = folded[k].mean();
        curve.stderr_growth[k] = folded[k].standard_error();
      }
      result.curves.push_back(std::move(curve));
    }
  }
  for (std::size_t c = 0; c < n_pairs; ++c) {
    ComparisonCurve curve;
    curve.arm_a = config.comparisons[c].arm_a;
    curve.arm_b = config.comparisons[c].arm_b;
    for (std::size_t s = 0; s < n_sweep; ++s) {
      RunningStat folded;
      for (std::size_t ch = 0; ch < n_chunks; ++ch)
        folded.merge(slots[s * n_chunks + ch].pair_final[c]);
      ComparisonPoint pt;
      if (swept) pt.sweep_value = config.sweep_values[s];
      pt.mean_diff = folded.mean();
      pt.stderr_diff = folded.standard_error();
      curve.points.push_back(pt);
    }
    result.comparisons.push_back(std::move(curve));
  }
  return result;
}

}  // namespace portlab
