#pragma once

/**
 * @file problems.hpp
 * @brief Benchmark problems: six univariate equations, the discretized
 *        Chandrasekhar H-equation and the 2D Brusselator (steady state and
 *        method-of-lines ODE).
 */

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hosolve/householder.hpp"
#include "hosolve/ode.hpp"
#include "hosolve/problem.hpp"

namespace hosolve {

// ---------------------------------------------------------------------------
// Univariate suite
// ---------------------------------------------------------------------------

struct UnivariateCase {
  int id = 0;
  std::string formula;
  UnivariateFunction f;
  double x0 = 0.0;
  double reference_root = 0.0;
  std::string root_note;
};

/// Omega constant, the root of x e^x = 1.
inline constexpr double kOmega = 0.5671432904097838;

inline std::vector<UnivariateCase> univariate_suite() {
  using std::numbers::pi;
  std::vector<UnivariateCase> cases;
  cases.push_back({1, "x^2 - 2", UnivariateFunction::from_generic([](const auto& x) { return x * x - 2.0; }), 1.0,
                   std::numbers::sqrt2, "sqrt(2)"});
  cases.push_back({2, "sqrt(x) - pi", UnivariateFunction::from_generic([](const auto& x) { return sqrt(x) - pi; }),
                   10.0, pi * pi, "pi^2"});
  cases.push_back({3, "x - exp(-x)", UnivariateFunction::from_generic([](const auto& x) { return x - exp(-x); }), 0.0,
                   kOmega, "Omega constant"});
  cases.push_back({4, "x^2 - 2^x",
                   UnivariateFunction::from_generic([](const auto& x) { return x * x - pow(2.0, x); }), 3.3, 4.0,
                   "x^2 = 2^x, root in [3.5, 4.5]"});
  cases.push_back({5, "x + sin(x) - 1",
                   UnivariateFunction::from_generic([](const auto& x) { return x + sin(x) - 1.0; }), 0.5,
                   0.5109734293885691, "bisection on [0, 1]"});
  cases.push_back({6, "log(x) + x", UnivariateFunction::from_generic([](const auto& x) { return log(x) + x; }), 1.0,
                   kOmega, "Omega constant"});
  return cases;
}

// ---------------------------------------------------------------------------
// Chandrasekhar H-equation
// ---------------------------------------------------------------------------

struct ChandrasekharConfig {
  int n = 16;
  double c = 0.9;

  void validate() const {
    if (n < 1) throw std::invalid_argument("ChandrasekharConfig: n must be >= 1");
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("ChandrasekharConfig: c must lie in (0, 1)");
  }
};

/// F_i(H) = H_i - 1 / (1 - (c / 2n) sum_j mu_i H_j / (mu_i + mu_j)),
/// midpoint nodes mu_i = (i - 1/2) / n.
class ChandrasekharResidual {
 public:
  explicit ChandrasekharResidual(const ChandrasekharConfig& cfg) : n_(static_cast<std::size_t>(cfg.n)) {
    mu_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) mu_[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n_);
    weight_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) weight_[i * n_ + j] = mu_[i] / (mu_[i] + mu_[j]);
    scale_ = cfg.c / (2.0 * static_cast<double>(n_));
  }

  const std::vector<double>& nodes() const { return mu_; }

  template <class S>
  void operator()(std::span<const S> h, std::span<S> out) const {
    for (std::size_t i = 0; i < n_; ++i) {
      S sum = weight_[i * n_] * h[0];
      for (std::size_t j = 1; j < n_; ++j) sum += weight_[i * n_ + j] * h[j];
      out[i] = h[i] - 1.0 / (1.0 - scale_ * sum);
    }
  }

 private:
  std::size_t n_;
  std::vector<double> mu_, weight_;
  double scale_ = 0.0;
};

inline NonlinearProblem chandrasekhar(const ChandrasekharConfig& cfg) {
  cfg.validate();
  return NonlinearProblem(std::vector<double>(static_cast<std::size_t>(cfg.n), 1.0), ChandrasekharResidual(cfg));
}

// ---------------------------------------------------------------------------
// Brusselator
// ---------------------------------------------------------------------------

struct BrusselatorConfig {
  int K = 8;
  double A = 3.4;
  double B = 1.0;
  double alpha = 10.0;
  bool source_active = true;

  void validate() const {
    if (K < 3) throw std::invalid_argument("BrusselatorConfig: K must be >= 3");
    if (!(A > 0.0 && B > 0.0 && alpha > 0.0)) throw std::invalid_argument("BrusselatorConfig: parameters must be positive");
  }
};

/// Source switch-on time of the time-dependent problem.
inline constexpr double kBrusselatorSourceTime = 1.1;

/// 5 inside the disk of radius 0.1 around (0.3, 0.6), else 0.
inline double brusselator_source(double x, double y) {
  return (x - 0.3) * (x - 0.3) + (y - 0.6) * (y - 0.6) <= 0.1 * 0.1 ? 5.0 : 0.0;
}

/**
 * Spatial operator on the periodic K x K grid x_i = i/K, y_j = j/K.
 *
 * Unknowns are packed u then v, each row-major in (i, j): u(x_i, y_j) at
 * i K + j and v(x_i, y_j) at K^2 + i K + j, so n = 2 K^2. The Laplacian is
 * the 5-point stencil with spacing h = 1/K and wrap-around indices.
 */
class BrusselatorOperator {
 public:
  explicit BrusselatorOperator(const BrusselatorConfig& cfg) : cfg_(cfg), k_(static_cast<std::size_t>(cfg.K)) {
    cfg.validate();
    const double kk = static_cast<double>(cfg.K);
    diffusion_ = cfg.alpha * kk * kk;
    source_.resize(k_ * k_);
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j)
        source_[i * k_ + j] = brusselator_source(static_cast<double>(i) / kk, static_cast<double>(j) / kk);
  }

  std::size_t size() const { return 2 * k_ * k_; }
  std::size_t grid() const { return k_; }
  std::size_t u_index(std::size_t i, std::size_t j) const { return i * k_ + j; }
  std::size_t v_index(std::size_t i, std::size_t j) const { return k_ * k_ + i * k_ + j; }

  /// (u_t, v_t) with the source on or off.
  template <class S>
  void rate(std::span<const S> z, std::span<S> out, bool with_source) const {
    const std::size_t nn = k_ * k_;
    const double a = cfg_.A, b = cfg_.B;
    for (std::size_t i = 0; i < k_; ++i) {
      const std::size_t ip = (i + 1) % k_, im = (i + k_ - 1) % k_;
      for (std::size_t j = 0; j < k_; ++j) {
        const std::size_t jp = (j + 1) % k_, jm = (j + k_ - 1) % k_;
        const std::size_t c = i * k_ + j;
        const S& u = z[c];
        const S& v = z[nn + c];
        // Paired sums keep the stencil of a constant field exactly zero.
        const S lap_u = (z[ip * k_ + j] + z[im * k_ + j]) + (z[i * k_ + jp] + z[i * k_ + jm]) - 4.0 * u;
        const S lap_v =
            (z[nn + ip * k_ + j] + z[nn + im * k_ + j]) + (z[nn + i * k_ + jp] + z[nn + i * k_ + jm]) - 4.0 * v;
        const S uuv = u * u * v;
        S du = b + uuv - (a + 1.0) * u + diffusion_ * lap_u;
        if (with_source && source_[c] != 0.0) du = du + source_[c];
        out[c] = du;
        out[nn + c] = a * u - uuv + diffusion_ * lap_v;
      }
    }
  }

  /// u(x, y, 0) = 22 (y(1-y))^{3/2}, v(x, y, 0) = 27 (x(1-x))^{3/2} on the grid.
  std::vector<double> initial_state() const {
    std::vector<double> z(size());
    const double kk = static_cast<double>(k_);
    for (std::size_t i = 0; i < k_; ++i) {
      const double x = static_cast<double>(i) / kk;
      for (std::size_t j = 0; j < k_; ++j) {
        const double y = static_cast<double>(j) / kk;
        z[u_index(i, j)] = 22.0 * std::pow(y * (1.0 - y), 1.5);
        z[v_index(i, j)] = 27.0 * std::pow(x * (1.0 - x), 1.5);
      }
    }
    return z;
  }

  const BrusselatorConfig& config() const { return cfg_; }

 private:
  BrusselatorConfig cfg_;
  std::size_t k_;
  double diffusion_ = 0.0;
  std::vector<double> source_;
};

/// Steady state u_t = v_t = 0, source switched on per cfg.source_active.
inline NonlinearProblem brusselator_steady(const BrusselatorConfig& cfg) {
  BrusselatorOperator op(cfg);
  auto x0 = op.initial_state();
  const bool src = cfg.source_active;
  return NonlinearProblem(std::move(x0), [op, src](auto z, auto out) { op.rate(z, out, src); });
}

/// Method-of-lines ODE on [0, 11.5]; the source is on for t >= 1.1.
inline OdeProblem brusselator_rhs(const BrusselatorConfig& cfg, double t_end = 11.5) {
  BrusselatorOperator op(cfg);
  auto y0 = op.initial_state();
  return OdeProblem(std::move(y0), 0.0, t_end,
                    [op](double t, auto y, auto dy) { op.rate(y, dy, t >= kBrusselatorSourceTime); });
}

}  // namespace hosolve
