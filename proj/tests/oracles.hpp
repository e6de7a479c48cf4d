#pragma once

// Brute-force reference implementations for the indicator chain. The EMA
// recursion is expanded into an explicit weighted sum, so these share no code
// path with the library versions they check.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "portlab/indicators.hpp"

namespace oracle {

// EMA(x, p)(k) = sum_{j=0..k-1} a(1-a)^j x[k-j] + (1-a)^k x[0]
inline std::vector<double> ema(std::span<const double> x, int lag) {
  const double a = 2.0 / (static_cast<double>(lag) + 1.0);
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += a * std::pow(1.0 - a, static_cast<double>(j)) * x[k - j];
    acc += std::pow(1.0 - a, static_cast<double>(k)) * x[0];
    out[k] = acc;
  }
  return out;
}

inline std::vector<double> macd_line(std::span<const double> x, int fast, int slow) {
  auto f = ema(x, fast);
  const auto s = ema(x, slow);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] -= s[k];
  return f;
}

inline std::vector<double> macd_final_line(std::span<const double> x,
                                           const portlab::MacdSpec& spec) {
  auto out = ema(x, spec.signal_lag);
  const auto m = macd_line(x, spec.fast_lag, spec.slow_lag);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= m[k];
  return out;
}

inline std::vector<double> macd_histogram(std::span<const double> x,
                                          const portlab::MacdSpec& spec) {
  auto m = macd_line(x, spec.fast_lag, spec.slow_lag);
  const auto s = ema(m, spec.signal_lag);
  for (std::size_t k = 0; k < m.size(); ++k) m[k] -= s[k];
  return m;
}

inline std::vector<double> rsi(std::span<const double> x, const portlab::RsiSpec& spec) {
  const std::size_t m = x.size();
  std::vector<double> gain(m, 0.0), loss(m, 0.0);
  for (std::size_t k = 1; k < m; ++k) {
    const double d = x[k] - x[k - 1];
    if (d > 0.0) gain[k] = d;
    if (d < 0.0) loss[k] = -d;
  }
  const auto eg = ema(gain, spec.smoothing_lag);
  const auto el = ema(loss, spec.smoothing_lag);
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    double a = 0.0, b = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      a += eg[j];
      b += el[j];
    }
    a /= static_cast<double>(k + 1);
    b /= static_cast<double>(k + 1);
    if (b > 0.0) {
      const double rs = a / b;
      out[k] = 100.0 - 100.0 / (1.0 + rs);
    } else {
      out[k] = a > 0.0 ? 100.0 : 50.0;
    }
  }
  return out;
}

inline bool close_rel(double a, double b, double tol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

}  // namespace oracle
