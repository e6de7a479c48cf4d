#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "portlab/indicators.hpp"
#include "portlab/market.hpp"

namespace portlab {

enum class StrategyKind { passive, cash_passive, macd, rsi };

// A strategy description: what to hold at t = 0 and how to react to signals.
//
// The signal-driven kinds share one rebalancing engine. On a sell flag a
// sell_factor share of that asset is liquidated into cash; a buy_factor share
// of the cash available after selling is then split equally across all assets
// flagged for buying. Both factors live in [0, 1] and with the initial cash
// non-negative the cash balance can never go negative.
struct StrategySpec {
  StrategyKind kind = StrategyKind::passive;
  double sell_factor = 0.5;  // psi
  double buy_factor = 0.5;   // phi
  MacdSpec macd;
  RsiSpec rsi;
  double cash_share = 0.0;  // share of initial wealth kept as cash

  // Assets this portfolio holds, as indices into the scenario; empty = all.
  std::vector<std::size_t> assets_held;
  // Relative value weights for the initial buy, aligned with the held assets;
  // empty = equal by value.
  std::vector<double> weights;

  void validate() const {
    if (!(sell_factor >= 0.0 && sell_factor <= 1.0))
      throw std::invalid_argument("StrategySpec: sell_factor must lie in [0, 1]");
    if (!(buy_factor >= 0.0 && buy_factor <= 1.0))
      throw std::invalid_argument("StrategySpec: buy_factor must lie in [0, 1]");
    if (!(cash_share >= 0.0 && cash_share <= 1.0))
      throw std::invalid_argument("StrategySpec: cash_share must lie in [0, 1]");
    if (kind == StrategyKind::macd) macd.validate();
    if (kind == StrategyKind::rsi) rsi.validate();
    if (!weights.empty()) {
      if (!assets_held.empty() && weights.size() != assets_held.size())
        throw std::invalid_argument("StrategySpec: weights must match assets_held");
      double total = 0.0;
      for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("StrategySpec: weights must be > 0");
        total += w;
      }
      if (!(total > 0.0)) throw std::invalid_argument("StrategySpec: weights must sum > 0");
    }
    for (std::size_t i = 1; i < assets_held.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (assets_held[i] == assets_held[j])
          throw std::invalid_argument("StrategySpec: assets_held must be distinct");
  }

  bool is_signal_driven() const {
    return kind == StrategyKind::macd || kind == StrategyKind::rsi;
  }
};

// Cash plus per-asset quantities at one grid point.
struct PortfolioState {
  double cash = 0.0;
  std::vector<double> quantities;
  double wealth = 0.0;
};

// Full trajectory of a strategy over a scenario grid.
struct StrategyRun {
  std::vector<std::size_t> assets_held;  // scenario indices, in holding order
  std::vector<double> cash;              // per grid point
  Matrix quantities;                     // n_held x (K+1)
  std::vector<double> wealth;            // per grid point, from post-trade holdings
  // Valuation of the previous step's holdings at current prices; equality
  // with `wealth` at every step is the self-financing identity.
  std::vector<double> pre_trade_wealth;

  bool operator==(const StrategyRun&) const = default;
};

inline double portfolio_value(double cash, std::span<const double> quantities,
                              std::span<const double> prices) {
  double w = cash;
  for (std::size_t i = 0; i < quantities.size(); ++i) w += prices[i] * quantities[i];
  return w;
}

// Split initial wealth into cash and an equal-by-value (or weighted) buy of
// the held assets.
inline PortfolioState initialize(double initial_wealth, std::span<const double> prices0,
                                 const StrategySpec& spec) {
  spec.validate();
  if (!(initial_wealth > 0.0))
    throw std::invalid_argument("initialize: initial_wealth must be > 0");
  for (double p : prices0)
    if (!(p > 0.0)) throw std::invalid_argument("initialize: prices must be > 0");
  const std::size_t n = prices0.size();
  if (n == 0) throw std::invalid_argument("initialize: need at least one asset");
  if (!spec.weights.empty() && spec.weights.size() != n)
    throw std::invalid_argument("initialize: weights must match asset count");

  PortfolioState state;
  state.cash = spec.cash_share * initial_wealth;
  const double invested = initial_wealth - state.cash;
  state.quantities.resize(n);
  if (spec.weights.empty()) {
    for (std::size_t i = 0; i < n; ++i)
      state.quantities[i] = invested / (static_cast<double>(n) * prices0[i]);
  } else {
    const double total = std::accumulate(spec.weights.begin(), spec.weights.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      state.quantities[i] = invested * (spec.weights[i] / total) / prices0[i];
  }
  state.wealth = portfolio_value(state.cash, state.quantities, prices0);
  return state;
}

// Hold the quantities, revalue the wealth.
inline void step_passive(PortfolioState& state, std::span<const double> prices) {
  state.wealth = portfolio_value(state.cash, state.quantities, prices);
}

// Two-phase signal update, sells first:
//   sell:  q_i -= sell_factor * q_i on a sell flag, proceeds into cash
//   buy:   buy_factor * cash is split equally across buy-flagged assets
// When nothing is flagged for buying the cash is simply kept.
inline void step_signal(PortfolioState& state, std::span<const double> prices,
                        std::span<const std::uint8_t> buy,
                        std::span<const std::uint8_t> sell, double sell_factor,
                        double buy_factor) {
  const std::size_t n = state.quantities.size();
  double cash = state.cash;
  for (std::size_t i = 0; i < n; ++i) {
    if (sell[i]) {
      const double sold = sell_factor * state.quantities[i];
      state.quantities[i] -= sold;
      cash += prices[i] * sold;
    }
  }
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < n; ++i) flagged += buy[i] ? 1 : 0;
  if (flagged > 0) {
    const double to_spend = buy_factor * cash;
    const double per_asset = to_spend / static_cast<double>(flagged);
    for (std::size_t i = 0; i < n; ++i)
      if (buy[i]) state.quantities[i] += per_asset / prices[i];
    cash -= to_spend;
  }
  state.cash = cash;
  state.wealth = portfolio_value(cash, state.quantities, prices);
}

// Evolve a strategy over one scenario. Signals are computed per held asset
// from that asset's own price path; both indicator kinds feed the same
// rebalancing engine and differ only in where the flags come from.
inline StrategyRun run_strategy(const MarketScenario& scenario, const StrategySpec& spec,
                                double initial_wealth) {
  spec.validate();
  const std::size_t n_assets = scenario.prices.rows();
  const std::size_t points = scenario.grid.points();
  if (scenario.prices.cols() != points)
    throw std::invalid_argument("run_strategy: scenario grid mismatch");

  std::vector<std::size_t> held = spec.assets_held;
  if (held.empty()) {
    held.resize(n_assets);
    std::iota(held.begin(), held.end(), std::size_t{0});
  }
  for (std::size_t idx : held)
    if (idx >= n_assets)
      throw std::invalid_argument("run_strategy: held asset index out of range");
  const std::size_t n = held.size();

  std::vector<SignalSeries> signals;
  if (spec.is_signal_driven()) {
    signals.reserve(n);
    for (std::size_t idx : held) {
      const auto prices = scenario.prices.row(idx);
      signals.push_back(spec.kind == StrategyKind::macd ? macd_signals(prices, spec.macd)
                                                        : rsi_signals(prices, spec.rsi));
    }
  }

  StrategyRun run;
  run.assets_held = held;
  run.cash.resize(points);
  run.quantities = Matrix(n, points);
  run.wealth.resize(points);
  run.pre_trade_wealth.resize(points);

  std::vector<double> prices_now(n);
  std::vector<std::uint8_t> buy_flags(n), sell_flags(n);
  for (std::size_t i = 0; i < n; ++i) prices_now[i] = scenario.prices(held[i], 0);

  PortfolioState state = initialize(initial_wealth, prices_now, spec);
  auto record = [&](std::size_t k) {
    run.cash[k] = state.cash;
    for (std::size_t i = 0; i < n; ++i) run.quantities(i, k) = state.quantities[i];
    run.wealth[k] = state.wealth;
  };
  record(0);
  run.pre_trade_wealth[0] = state.wealth;

  for (std::size_t k = 1; k < points; ++k) {
    for (std::size_t i = 0; i < n; ++i) prices_now[i] = scenario.prices(held[i], k);
    run.pre_trade_wealth[k] = portfolio_value(state.cash, state.quantities, prices_now);
    if (spec.is_signal_driven()) {
      for (std::size_t i = 0; i < n; ++i) {
        buy_flags[i] = signals[i].buy[k];
        sell_flags[i] = signals[i].sell[k];
      }
      step_signal(state, prices_now, buy_flags, sell_flags, spec.sell_factor,
                  spec.buy_factor);
    } else {
      step_passive(state, prices_now);
    }
    record(k);
  }
  return run;
}

}  // namespace portlab
