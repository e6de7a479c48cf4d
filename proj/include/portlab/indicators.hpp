#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace portlab {

/// Exponential moving average spec: weight alpha = 2 / (lag + 1).
struct EmaSpec {
  int lag = 1;  // grid steps, >= 1

  double alpha() const { return 2.0 / (static_cast<double>(lag) + 1.0); }
  void validate() const {
    if (lag < 1) throw std::invalid_argument("EmaSpec: lag must be >= 1");
  }
};

// Which series the MACD trade trigger watches for sign changes.
//
// `signal_line_cross` is the conventional rule: the MACD line minus an EMA of
// the MACD line itself, so a sign change is exactly the MACD line crossing
// its signal line. `price_ema_offset` subtracts the MACD line from an EMA of
// the price instead; that series lives at price scale and essentially never
// changes sign on realistic paths, so it trades only on extreme swings.
enum class MacdTrigger { signal_line_cross, price_ema_offset };

struct MacdSpec {
  int fast_lag = 12;   // p
  int slow_lag = 26;   // q
  int signal_lag = 9;  // s, with s < p < q
  MacdTrigger trigger = MacdTrigger::signal_line_cross;

  void validate() const {
    if (signal_lag < 1) throw std::invalid_argument("MacdSpec: signal_lag must be >= 1");
    if (!(signal_lag < fast_lag && fast_lag < slow_lag))
      throw std::invalid_argument("MacdSpec: lags must satisfy signal < fast < slow");
  }
};

struct RsiSpec {
  int smoothing_lag = 27;    // EMA lag for gains/losses (alpha = 1/14)
  double buy_below = 30.0;   // oversold level, buy when RSI drops under it
  double sell_above = 70.0;  // overbought level, sell when RSI rises over it

  void validate() const {
    if (smoothing_lag < 1) throw std::invalid_argument("RsiSpec: smoothing_lag must be >= 1");
    if (!(buy_below >= 0.0 && buy_below < sell_above && sell_above <= 100.0))
      throw std::invalid_argument("RsiSpec: levels must satisfy 0 <= buy_below < sell_above <= 100");
  }
};

// Per-grid-point buy/sell flags for a single asset. Index 0 never flags:
// crossing logic needs a predecessor and level logic needs history.
struct SignalSeries {
  std::vector<std::uint8_t> buy;
  std::vector<std::uint8_t> sell;
};

inline std::vector<double> ema(std::span<const double> series, EmaSpec spec) {
  spec.validate();
  if (series.empty()) throw std::invalid_argument("ema: series must be non-empty");
  const double a = spec.alpha();
  std::vector<double> out(series.size());
  out[0] = series[0];
  for (std::size_t k = 1; k < series.size(); ++k)
    out[k] = a * series[k] + (1.0 - a) * out[k - 1];
  return out;
}

// Fast EMA minus slow EMA, pointwise.
inline std::vector<double> macd_line(std::span<const double> prices, int fast_lag,
                                     int slow_lag) {
  if (fast_lag < 1) throw std::invalid_argument("macd_line: fast_lag must be >= 1");
  if (!(fast_lag < slow_lag))
    throw std::invalid_argument("macd_line: fast_lag must be < slow_lag");
  auto fast = ema(prices, EmaSpec{fast_lag});
  const auto slow = ema(prices, EmaSpec{slow_lag});
  for (std::size_t k = 0; k < fast.size(); ++k) fast[k] -= slow[k];
  return fast;
}

// EMA of the price (signal lag) minus the MACD line.
inline std::vector<double> macd_final_line(std::span<const double> prices,
                                           const MacdSpec& spec) {
  spec.validate();
  auto out = ema(prices, EmaSpec{spec.signal_lag});
  const auto macd = macd_line(prices, spec.fast_lag, spec.slow_lag);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= macd[k];
  return out;
}

// MACD line minus its own EMA (the signal line); sign changes mark the
// crossings of the two.
inline std::vector<double> macd_histogram(std::span<const double> prices,
                                          const MacdSpec& spec) {
  spec.validate();
  auto macd = macd_line(prices, spec.fast_lag, spec.slow_lag);
  const auto signal = ema(macd, EmaSpec{spec.signal_lag});
  for (std::size_t k = 0; k < macd.size(); ++k) macd[k] -= signal[k];
  return macd;
}

// Strict sign-change detector: buy on negative-to-positive, sell on
// positive-to-negative. An exact zero on either side produces no signal.
inline SignalSeries sign_change_signals(std::span<const double> line) {
  SignalSeries s;
  s.buy.assign(line.size(), 0);
  s.sell.assign(line.size(), 0);
  for (std::size_t k = 1; k < line.size(); ++k) {
    if (line[k - 1] < 0.0 && line[k] > 0.0) s.buy[k] = 1;
    if (line[k - 1] > 0.0 && line[k] < 0.0) s.sell[k] = 1;
  }
  return s;
}

inline SignalSeries macd_signals(std::span<const double> prices, const MacdSpec& spec) {
  spec.validate();
  if (prices.size() < 2)
    throw std::invalid_argument("macd_signals: need at least two points");
  const auto line = spec.trigger == MacdTrigger::signal_line_cross
                        ? macd_histogram(prices, spec)
                        : macd_final_line(prices, spec);
  return sign_change_signals(line);
}

// RSI in [0, 100]. Price differences are split into gains and loss
// magnitudes, each EMA-smoothed, then averaged from the start of the grid;
// the ratio of those running means is rescaled to [0, 100]. A zero loss mean
// pins RSI at 100 when any gain exists and at the 50 midpoint when both means
// are zero (e.g. at t = 0, where the difference series starts at zero).
inline std::vector<double> rsi(std::span<const double> prices, const RsiSpec& spec) {
  spec.validate();
  if (prices.empty()) throw std::invalid_argument("rsi: series must be non-empty");
  const std::size_t m = prices.size();
  std::vector<double> gain(m, 0.0), loss(m, 0.0);
  for (std::size_t k = 1; k < m; ++k) {
    const double d = prices[k] - prices[k - 1];
    if (d > 0.0)
      gain[k] = d;
    else
      loss[k] = -d;
  }
  const auto smooth_gain = ema(gain, EmaSpec{spec.smoothing_lag});
  const auto smooth_loss = ema(loss, EmaSpec{spec.smoothing_lag});

  std::vector<double> out(m);
  double gain_sum = 0.0, loss_sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    // running means share the divisor k+1, so it cancels in the ratio
    gain_sum += smooth_gain[k];
    loss_sum += smooth_loss[k];
    if (loss_sum > 0.0) {
      const double rs = gain_sum / loss_sum;
      out[k] = 100.0 - 100.0 / (1.0 + rs);
    } else {
      out[k] = gain_sum > 0.0 ? 100.0 : 50.0;
    }
  }
  return out;
}

// Level rule, not a crossing rule: flags persist for as long as the RSI sits
// beyond its threshold.
inline SignalSeries rsi_signals(std::span<const double> prices, const RsiSpec& spec) {
  const auto r = rsi(prices, spec);
  SignalSeries s;
  s.buy.assign(r.size(), 0);
  s.sell.assign(r.size(), 0);
  for (std::size_t k = 1; k < r.size(); ++k) {
    if (r[k] < spec.buy_below) s.buy[k] = 1;
    if (r[k] > spec.sell_above) s.sell[k] = 1;
  }
  return s;
}

}  // namespace portlab
