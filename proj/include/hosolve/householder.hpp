#pragma once

/**
 * @file householder.hpp
 * @brief Householder's method of arbitrary order for f(x) = 0, x real.
 *
 * One iteration pushes the bundle (x, 1, 0, ..., 0) through f, inverts the
 * resulting series and updates
 *
 *     x <- x + p (1/f)^{(p-1)}(x) / (1/f)^{(p)}(x)  =  x + g[p-1] / g[p]
 *
 * where g are the normalized coefficients of 1/f (the factorials cancel).
 * p = 1 is Newton, p = 2 is Halley; the method converges with order p + 1.
 */

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "hosolve/errors.hpp"
#include "hosolve/report.hpp"
#include "hosolve/taylor.hpp"

namespace hosolve {

struct ScalarSolveConfig {
  int order = 2;
  double tol = 1e-12;
  int max_iter = 100;

  void validate() const {
    if (order < 1 || order > kMaxTaylorOrder) throw std::invalid_argument("ScalarSolveConfig: bad order");
    if (!(tol > 0.0)) throw std::invalid_argument("ScalarSolveConfig: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("ScalarSolveConfig: max_iter must be >= 1");
  }
};

/// Anything that can be evaluated on a Taylor bundle.
template <class F>
concept UnivariateTaylorFunction = std::invocable<const F&, const Taylor&> &&
                                   std::convertible_to<std::invoke_result_t<const F&, const Taylor&>, Taylor>;

/// Type-erased univariate function with both evaluation modes.
struct UnivariateFunction {
  std::function<double(double)> plain;
  std::function<Taylor(const Taylor&)> taylor;

  template <class G>
  static UnivariateFunction from_generic(G g) {
    return {[g](double x) { return g(x); }, [g](const Taylor& x) { return Taylor(g(x)); }};
  }

  double operator()(double x) const { return plain(x); }
  Taylor operator()(const Taylor& x) const { return taylor(x); }
};

namespace detail {

inline double householder_update(double x, const Taylor& fx, int p) {
  const Taylor g = reciprocal(fx);
  if (!(std::abs(g[p]) > kZeroPrimalFloor)) throw DegenerateStep("householder: vanishing top coefficient of 1/f");
  return x + g[p - 1] / g[p];
}

}  // namespace detail

/// One Householder step of order p from x.
template <UnivariateTaylorFunction F>
double householder_step(const F& f, double x, int p) {
  const Taylor fx = f(seed(x, 1.0, p));
  try {
    return detail::householder_update(x, fx, p);
  } catch (const ZeroPrimal&) {
    throw DegenerateStep("householder: f(x) vanishes");
  }
}

/**
 * Iterate householder_step until |f(x)| <= tol.
 *
 * Each iteration costs one order-p evaluation; its primal doubles as the
 * residual check, so f_evals counts exactly one evaluation per iterate.
 * Errors never escape: they are reported through SolveReport::status.
 */
template <UnivariateTaylorFunction F>
SolveReport<double> householder_solve(const F& f, double x0, const ScalarSolveConfig& cfg) {
  cfg.validate();
  SolveReport<double> rep;
  double x = x0;
  auto finish = [&](SolveStatus s) {
    rep.status = s;
    rep.root = x;
    return rep;
  };
  for (;;) {
    Taylor fx;
    try {
      fx = f(seed(x, 1.0, cfg.order));
    } catch (const ZeroPrimal&) {
      return finish(SolveStatus::Degenerate);
    } catch (const DomainError&) {
      return finish(SolveStatus::Diverged);
    }
    ++rep.counters.f_evals;
    const double r = std::abs(fx[0]);
    rep.iterate_history.push_back(x);
    rep.residual_history.push_back(r);
    if (!std::isfinite(x) || !std::isfinite(r)) return finish(SolveStatus::Diverged);
    if (r <= cfg.tol) return finish(SolveStatus::Converged);
    if (rep.iterations >= cfg.max_iter) return finish(SolveStatus::MaxIter);
    try {
      x = detail::householder_update(x, fx, cfg.order);
    } catch (const Error&) {
      return finish(SolveStatus::Degenerate);
    }
    ++rep.iterations;
  }
}

/**
 * Observed convergence order of an iterate sequence against a known root.
 *
 * Uses q_k = log(e_{k+1}/e_k) / log(e_k/e_{k-1}) averaged over the last (up
 * to) three usable triples. An error is usable when it lies in (floor, 1)
 * and the errors decrease strictly; floor = 8 eps max(1, |root|) filters
 * round-off. With only two usable errors (very high order methods land on
 * the root in a couple of steps) the one-pair estimate log e_{k+1} / log e_k
 * is returned instead.
 *
 * @throws InsufficientData when fewer than two usable errors exist.
 */
inline double empirical_order_from_errors(std::span<const double> errors, double floor) {
  // Longest trailing run of usable, strictly decreasing errors.
  std::vector<double> run;
  for (double e : errors) {
    const bool usable = e > floor && e < 1.0 && std::isfinite(e);
    if (usable && (run.empty() || e < run.back())) {
      run.push_back(e);
    } else if (usable) {
      run.assign(1, e);
    } else if (!run.empty() && e > floor) {
      run.clear();
    }
  }
  if (run.size() < 2) throw InsufficientData("empirical_order: need at least two usable errors");
  if (run.size() == 2) return std::log(run[1]) / std::log(run[0]);
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = run.size() - 2; k >= 1 && count < 3; --k, ++count)
    sum += std::log(run[k + 1] / run[k]) / std::log(run[k] / run[k - 1]);
  return sum / count;
}

inline double empirical_order(std::span<const double> iterates, double root) {
  std::vector<double> errors;
  errors.reserve(iterates.size());
  for (double x : iterates) errors.push_back(std::abs(x - root));
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(root));
  return empirical_order_from_errors(errors, floor);
}

}  // namespace hosolve
