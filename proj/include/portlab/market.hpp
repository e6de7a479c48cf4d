#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "portlab/matrix.hpp"
#include "portlab/rng.hpp"

namespace portlab {

// Correlation matrix admits no real factorization.
struct NotPsdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-asset Heston parameters. Rates are per year, variances per year.
struct HestonParams {
  double mu = 0.1;      // price drift
  double kappa = 1.2;   // variance mean-reversion speed
  double theta = 0.05;  // long-run variance
  double sigma = 0.5;   // vol of vol
  double rho = -0.66;   // price/variance noise correlation
  double s0 = 100.0;    // initial price
  double v0 = 0.025;    // initial variance

  void validate() const {
    if (!std::isfinite(mu)) throw std::invalid_argument("HestonParams: mu must be finite");
    if (!(kappa > 0.0) || !std::isfinite(kappa))
      throw std::invalid_argument("HestonParams: kappa must be > 0");
    if (!(theta > 0.0) || !std::isfinite(theta))
      throw std::invalid_argument("HestonParams: theta must be > 0");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
      throw std::invalid_argument("HestonParams: sigma must be >= 0");
    if (!(rho >= -1.0 && rho <= 1.0))
      throw std::invalid_argument("HestonParams: rho must lie in [-1, 1]");
    if (!(s0 > 0.0) || !std::isfinite(s0))
      throw std::invalid_argument("HestonParams: s0 must be > 0");
    if (!(v0 > 0.0) || !std::isfinite(v0))
      throw std::invalid_argument("HestonParams: v0 must be > 0");
  }
};

// Uniform grid on [0, T]: K steps of width dt, grid points t_k = k*dt for
// k = 0..K. Requires K*dt == T to one part in 1e9.
class TimeGrid {
 public:
  TimeGrid(double horizon_years, double dt_years)
      : horizon_years_(horizon_years), dt_years_(dt_years) {
    if (!(dt_years > 0.0) || !std::isfinite(dt_years))
      throw std::invalid_argument("TimeGrid: dt_years must be > 0");
    if (!(horizon_years > 0.0) || !std::isfinite(horizon_years))
      throw std::invalid_argument("TimeGrid: horizon_years must be > 0");
    const double ratio = horizon_years / dt_years;
    const auto k = static_cast<long long>(std::llround(ratio));
    if (k < 1 || std::abs(static_cast<double>(k) * dt_years - horizon_years) >
                     1e-9 * horizon_years)
      throw std::invalid_argument("TimeGrid: dt_years must divide horizon_years");
    steps_ = static_cast<std::size_t>(k);
  }

  double horizon() const { return horizon_years_; }
  double dt() const { return dt_years_; }
  std::size_t steps() const { return steps_; }        // K
  std::size_t points() const { return steps_ + 1; }   // K + 1
  double time_at(std::size_t k) const { return static_cast<double>(k) * dt_years_; }

  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_years_;
  double dt_years_;
  std::size_t steps_ = 0;
};

// Symmetric matrix of pairwise price-noise correlations with unit diagonal.
// Positive semi-definiteness is established later, by factorization.
class CorrelationMatrix {
 public:
  explicit CorrelationMatrix(Matrix values) : m_(std::move(values)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
      throw std::invalid_argument("CorrelationMatrix: matrix must be square and non-empty");
    for (std::size_t i = 0; i < m_.rows(); ++i) {
      if (std::abs(m_(i, i) - 1.0) > 1e-12)
        throw std::invalid_argument("CorrelationMatrix: diagonal must be 1");
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(m_(i, j) - m_(j, i)) > 1e-12)
          throw std::invalid_argument("CorrelationMatrix: matrix must be symmetric");
    }
  }

  static CorrelationMatrix identity(std::size_t n) {
    return CorrelationMatrix(Matrix::identity(n));
  }

  std::size_t size() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& values() const { return m_; }

  bool operator==(const CorrelationMatrix&) const = default;

 private:
  Matrix m_;
};

// Lower-triangular L with L*L^T equal to the correlation matrix. Handles the
// semi-definite boundary (e.g. perfectly correlated assets) by zeroing
// degenerate columns; anything indefinite raises NotPsdError.
inline Matrix validate_correlations(const CorrelationMatrix& matrix) {
  const std::size_t n = matrix.size();
  const double tol = 1e-12 * static_cast<double>(n);
  Matrix lower(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = matrix(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
      if (i == j) {
        if (sum < -tol)
          throw NotPsdError("correlation matrix is not positive semi-definite");
        lower(i, i) = std::sqrt(sum > 0.0 ? sum : 0.0);
      } else if (lower(j, j) > 0.0) {
        lower(i, j) = sum / lower(j, j);
      } else if (std::abs(sum) <= tol) {
        lower(i, j) = 0.0;
      } else {
        throw NotPsdError("correlation matrix is not positive semi-definite");
      }
    }
  }
  return lower;
}

// One simulated market realization on a uniform grid.
struct MarketScenario {
  Matrix prices;     // n x (K+1), strictly positive
  Matrix variances;  // n x (K+1), clipped at zero
  TimeGrid grid;

  bool operator==(const MarketScenario&) const = default;
};

// 2n x K matrix of standard normal increments. Rows [0, n) carry price noise,
// correlated across assets through the factor; rows [n, 2n) carry variance
// noise built per asset as rho_i * Z_i + sqrt(1 - rho_i^2) * W_i with W_i
// independent of everything else. Draw order per step is fixed (n price
// normals, then n variance normals), which makes the output a pure function
// of the stream state.
inline Matrix draw_increments(const Matrix& factor, const std::vector<double>& rho_per_asset,
                              rng::NormalStream& stream, std::size_t n, std::size_t steps) {
  if (factor.rows() != n || factor.cols() != n)
    throw std::invalid_argument("draw_increments: factor must be n x n");
  if (rho_per_asset.size() != n)
    throw std::invalid_argument("draw_increments: need one rho per asset");
  for (double r : rho_per_asset)
    if (!(r >= -1.0 && r <= 1.0))
      throw std::invalid_argument("draw_increments: rho must lie in [-1, 1]");

  Matrix z(2 * n, steps, 0.0);
  std::vector<double> raw(n);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < n; ++i) raw[i] = stream.next();
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j) acc += factor(i, j) * raw[j];
      z(i, k) = acc;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double w = stream.next();
      const double rho = rho_per_asset[i];
      z(n + i, k) = rho * z(i, k) + std::sqrt(1.0 - rho * rho) * w;
    }
  }
  return z;
}

// Full-truncation Euler for the variance (the raw recursion may dip below
// zero; drift and diffusion see v+ = max(v, 0), and the stored path is
// clipped), log-Euler for the price so every simulated price stays positive:
//
//   S_{k+1} = S_k * exp((mu - v+/2) dt + sqrt(v+) sqrt(dt) Z^S)
//   v_{k+1} = v_k + kappa (theta - v+) dt + sigma sqrt(v+) sqrt(dt) Z^v
//
// Deterministic for a fixed (seed, trial_index); trials may be generated
// concurrently and in any order.
inline MarketScenario simulate_paths(const std::vector<HestonParams>& params,
                                     const CorrelationMatrix& matrix, const TimeGrid& grid,
                                     std::uint64_t seed, std::uint64_t trial_index) {
  const std::size_t n = params.size();
  if (n == 0) throw std::invalid_argument("simulate_paths: need at least one asset");
  if (matrix.size() != n)
    throw std::invalid_argument("simulate_paths: correlation matrix size mismatch");
  for (const auto& p : params) p.validate();

  const Matrix factor = validate_correlations(matrix);
  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = params[i].rho;

  rng::NormalStream stream(seed, trial_index);
  const std::size_t steps = grid.steps();
  const Matrix z = draw_increments(factor, rho, stream, n, steps);

  MarketScenario sc{Matrix(n, grid.points()), Matrix(n, grid.points()), grid};
  std::vector<double> v(n);  // raw, possibly negative, variance state
  for (std::size_t i = 0; i < n; ++i) {
    sc.prices(i, 0) = params[i].s0;
    sc.variances(i, 0) = params[i].v0;
    v[i] = params[i].v0;
  }

  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = params[i];
      const double vplus = v[i] > 0.0 ? v[i] : 0.0;
      const double vol = std::sqrt(vplus) * sqrt_dt;
      sc.prices(i, k + 1) =
          sc.prices(i, k) * std::exp((p.mu - 0.5 * vplus) * dt + vol * z(i, k));
      v[i] += p.kappa * (p.theta - vplus) * dt + p.sigma * vol * z(n + i, k);
      sc.variances(i, k + 1) = v[i] > 0.0 ? v[i] : 0.0;
    }
  }
  return sc;
}

}  // namespace portlab
