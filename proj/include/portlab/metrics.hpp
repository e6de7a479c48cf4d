#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "portlab/market.hpp"
#include "portlab/strategy.hpp"

namespace portlab {

// Welford accumulator with a fixed-order merge, so partial results computed
// concurrently can be folded deterministically.
class RunningStat {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningStat& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double delta = other.mean_ - mean_;
    const std::size_t total = count_ + other.count_;
    mean_ += delta * (static_cast<double>(other.count_) / static_cast<double>(total));
    m2_ += other.m2_ + delta * delta *
                           (static_cast<double>(count_) * static_cast<double>(other.count_) /
                            static_cast<double>(total));
    count_ = total;
  }

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double sample_variance() const {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double standard_error() const {
    return count_ > 1 ? std::sqrt(sample_variance() / static_cast<double>(count_)) : 0.0;
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Recompute the wealth series of a run from its holdings and the scenario
// prices: W(t) = cash(t) + sum_i S_i(t) q_i(t).
inline std::vector<double> wealth_series(const StrategyRun& run,
                                         const MarketScenario& scenario) {
  const std::size_t points = scenario.grid.points();
  if (run.cash.size() != points || run.quantities.cols() != points)
    throw std::invalid_argument("wealth_series: run and scenario grids differ");
  std::vector<double> w(points);
  for (std::size_t k = 0; k < points; ++k) {
    double acc = run.cash[k];
    for (std::size_t i = 0; i < run.assets_held.size(); ++i)
      acc += scenario.prices(run.assets_held[i], k) * run.quantities(i, k);
    w[k] = acc;
  }
  return w;
}

// Time-normalized log wealth ratio, g(t) = log(W(t)/W(0)) / t, with g(0) = 0
// by convention (the t -> 0 limit for differentiable wealth).
inline std::vector<double> growth_series(std::span<const double> wealth,
                                         const TimeGrid& grid) {
  if (wealth.size() != grid.points())
    throw std::invalid_argument("growth_series: wealth length must match the grid");
  if (!(wealth[0] > 0.0))
    throw std::invalid_argument("growth_series: initial wealth must be > 0");
  std::vector<double> g(wealth.size());
  g[0] = 0.0;
  for (std::size_t k = 1; k < wealth.size(); ++k)
    g[k] = std::log(wealth[k] / wealth[0]) / grid.time_at(k);
  return g;
}

// Pointwise mean and standard error over equal-length series.
struct MeanSeries {
  std::vector<double> mean;
  std::vector<double> stderr_of_mean;
  std::size_t trials = 0;
};

inline MeanSeries average_growth(const std::vector<std::vector<double>>& trials) {
  if (trials.empty()) throw std::invalid_argument("average_growth: no trials");
  const std::size_t points = trials.front().size();
  std::vector<RunningStat> stats(points);
  for (const auto& series : trials) {
    if (series.size() != points)
      throw std::invalid_argument("average_growth: trial lengths differ");
    for (std::size_t k = 0; k < points; ++k) stats[k].add(series[k]);
  }
  MeanSeries out;
  out.trials = trials.size();
  out.mean.resize(points);
  out.stderr_of_mean.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    out.mean[k] = stats[k].mean();
    out.stderr_of_mean[k] = stats[k].standard_error();
  }
  return out;
}

}  // namespace portlab
