#pragma once

/**
 * @file halley.hpp
 * @brief Newton and multivariate Halley iterations for square systems.
 *
 * Halley's update for f: R^n -> R^n is
 *
 *     a = -Df(x)^{-1} f(x)
 *     b =  Df(x)^{-1} D^2 f(x)[a, a]
 *     x <- x + (a .* a) ./ (a + b / 2)
 *
 * with element-wise products. D^2 f(x)[a, a] comes from a single order-2
 * Taylor sweep along a, and both linear solves share one factorization,
 * so an iteration costs one factorization and two back-solves against
 * Newton's one and one.
 *
 * NaiveHalley forms every Hessian explicitly (n^2 directional probes) and
 * contracts it with a; it exists to cross-check the Taylor path.
 */

#include <chrono>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "hosolve/errors.hpp"
#include "hosolve/linalg.hpp"
#include "hosolve/problem.hpp"
#include "hosolve/report.hpp"
#include "hosolve/sparsity.hpp"
#include "hosolve/taylor.hpp"

namespace hosolve {

enum class JacobianStrategy { Dense, Sparse };
enum class MvMethod { Newton, Halley, NaiveHalley };

constexpr std::string_view to_string(JacobianStrategy s) { return s == JacobianStrategy::Dense ? "Dense" : "Sparse"; }

constexpr std::string_view to_string(MvMethod m) {
  switch (m) {
    case MvMethod::Newton: return "Newton";
    case MvMethod::Halley: return "Halley";
    case MvMethod::NaiveHalley: return "NaiveHalley";
  }
  return "?";
}

/// Largest system NaiveHalley accepts.
inline constexpr std::size_t kNaiveHalleyMaxSize = 64;

struct MvSolveConfig {
  double tol = 1e-8;  // on max_i |f_i(x)|
  int max_iter = 100;
  JacobianStrategy jacobian = JacobianStrategy::Dense;
  MvMethod method = MvMethod::Halley;
  bool keep_iterates = true;

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("MvSolveConfig: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("MvSolveConfig: max_iter must be >= 1");
  }
};

/**
 * Builds and factors Df(x) with a fixed strategy. For the sparse strategy
 * the pattern, coloring and column ordering are computed once, on
 * construction, and reused for every factorization.
 */
class JacobianFactorizer {
 public:
  JacobianFactorizer(const NonlinearProblem& problem, JacobianStrategy strategy)
      : problem_(&problem), strategy_(strategy) {
    if (strategy_ == JacobianStrategy::Sparse) {
      pattern_ = problem.pattern();
      if (!pattern_) pattern_ = std::make_shared<const SparsityPattern>(detect_pattern(problem));
      coloring_ = color_columns(*pattern_);
      lu_opts_.column_order = reverse_cuthill_mckee(pattern_matrix(*pattern_));
    }
  }

  LuFactors factor(std::span<const double> x, SolveCounters& counters) const {
    if (strategy_ == JacobianStrategy::Dense) {
      DenseMatrix jac = dense_jacobian(*problem_, x);
      counters.f_evals += static_cast<std::int64_t>(problem_->size());
      ++counters.factorizations;
      return lu_factor(jac);
    }
    CsMatrix jac = compressed_jacobian(*problem_, x, *pattern_, coloring_);
    counters.f_evals += coloring_.num_colors;
    ++counters.factorizations;
    return lu_factor(jac, lu_opts_);
  }

  JacobianStrategy strategy() const { return strategy_; }
  int num_colors() const { return strategy_ == JacobianStrategy::Sparse ? coloring_.num_colors : 0; }
  const std::shared_ptr<const SparsityPattern>& pattern() const { return pattern_; }

 private:
  const NonlinearProblem* problem_;
  JacobianStrategy strategy_;
  std::shared_ptr<const SparsityPattern> pattern_;
  Coloring coloring_;
  SparseLuOptions lu_opts_;
};

/// D^2 f(x)[a, a] from one order-2 sweep (2! times the second coefficient).
inline std::vector<double> second_directional(const NonlinearProblem& problem, std::span<const double> x,
                                              std::span<const double> a) {
  const auto out = push_forward(problem, x, a, 2);
  std::vector<double> h(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) h[i] = 2.0 * out[i][2];
  return h;
}

namespace detail {

/// Threshold on |a_i + b_i/2| below which the Newton increment is used.
inline constexpr double kHalleyDenominatorRatio = 1e-12;

inline std::vector<double> halley_combine(std::span<const double> x, std::span<const double> a,
                                          std::span<const double> b) {
  std::vector<double> next(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double denom = a[i] + 0.5 * b[i];
    if (std::abs(denom) <= kHalleyDenominatorRatio * (std::abs(a[i]) + 1e-300))
      next[i] += a[i];
    else
      next[i] += a[i] * a[i] / denom;
  }
  return next;
}

inline std::vector<double> negated(std::span<const double> v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = -v[i];
  return r;
}

}  // namespace detail

inline std::vector<double> newton_step(std::span<const double> x, const LuFactors& f, std::span<const double> fx,
                                       SolveCounters& counters) {
  const auto a = lu_solve(f, detail::negated(fx));
  ++counters.back_solves;
  std::vector<double> next(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) next[i] += a[i];
  return next;
}

/// One Halley update from x given the factorization of Df(x) and fx = f(x).
inline std::vector<double> halley_step(const NonlinearProblem& problem, std::span<const double> x,
                                       const LuFactors& f, std::span<const double> fx, SolveCounters& counters) {
  const auto a = lu_solve(f, detail::negated(fx));
  const auto h = second_directional(problem, x, a);
  const auto b = lu_solve(f, h);
  counters.back_solves += 2;
  ++counters.f_evals;
  return detail::halley_combine(x, a, b);
}

inline std::vector<double> halley_step(const NonlinearProblem& problem, std::span<const double> x,
                                       const LuFactors& f, std::span<const double> fx) {
  SolveCounters ignored;
  return halley_step(problem, x, f, fx, ignored);
}

/**
 * All second derivatives of f at x: result[i](j, k) = d^2 f_i / dx_j dx_k.
 * Off-diagonal entries come from polarization of directional probes,
 * H[e_j, e_k] = (D2[e_j + e_k] - D2[e_j] - D2[e_k]) / 2.
 */
inline std::vector<DenseMatrix> hessian_tensor(const NonlinearProblem& problem, std::span<const double> x,
                                               SolveCounters* counters = nullptr) {
  const std::size_t n = problem.size();
  std::vector<DenseMatrix> hess(n, DenseMatrix(n, n));
  std::vector<double> dir(n, 0.0);
  std::vector<std::vector<double>> diag(n);
  for (std::size_t j = 0; j < n; ++j) {
    dir[j] = 1.0;
    diag[j] = second_directional(problem, x, dir);
    dir[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) hess[i](j, j) = diag[j][i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      dir[j] = dir[k] = 1.0;
      const auto both = second_directional(problem, x, dir);
      dir[j] = dir[k] = 0.0;
      for (std::size_t i = 0; i < n; ++i) hess[i](j, k) = hess[i](k, j) = 0.5 * (both[i] - diag[j][i] - diag[k][i]);
    }
  }
  if (counters) counters->f_evals += static_cast<std::int64_t>(n * (n + 1) / 2);
  return hess;
}

/// Halley update with D^2 f[a, a] contracted from the explicit Hessians.
inline std::vector<double> naive_halley_step(const NonlinearProblem& problem, std::span<const double> x,
                                             const LuFactors& f, std::span<const double> fx, SolveCounters& counters) {
  const std::size_t n = problem.size();
  if (n > kNaiveHalleyMaxSize) throw std::invalid_argument("naive_halley_step: system too large");
  const auto a = lu_solve(f, detail::negated(fx));
  const auto hess = hessian_tensor(problem, x, &counters);
  std::vector<double> h(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double row = 0.0;
      for (std::size_t k = 0; k < n; ++k) row += hess[i](j, k) * a[k];
      acc += a[j] * row;
    }
    h[i] = acc;
  }
  const auto b = lu_solve(f, h);
  counters.back_solves += 2;
  return detail::halley_combine(x, a, b);
}

inline std::vector<double> naive_halley_step(const NonlinearProblem& problem, std::span<const double> x,
                                             const LuFactors& f, std::span<const double> fx) {
  SolveCounters ignored;
  return naive_halley_step(problem, x, f, fx, ignored);
}

/**
 * Iterate until max|f(x)| <= cfg.tol, starting from x0.
 *
 * Every iteration builds and factors the Jacobian exactly once. Failures
 * surface through the status: a singular Jacobian or a vanishing primal in
 * a division gives Degenerate, a non-finite iterate or residual (or a
 * domain error) gives Diverged.
 */
inline SolveReport<std::vector<double>> solve(const NonlinearProblem& problem, std::span<const double> x0,
                                              const MvSolveConfig& cfg) {
  cfg.validate();
  if (cfg.method == MvMethod::NaiveHalley && problem.size() > kNaiveHalleyMaxSize)
    throw std::invalid_argument("solve: NaiveHalley is limited to n <= 64");
  if (x0.size() != problem.size()) throw std::invalid_argument("solve: initial guess has wrong length");

  SolveReport<std::vector<double>> rep;
  std::vector<double> x(x0.begin(), x0.end());
  auto finish = [&](SolveStatus s) {
    rep.status = s;
    rep.root = x;
    return rep;
  };

  std::optional<JacobianFactorizer> jac;
  try {
    jac.emplace(problem, cfg.jacobian);
  } catch (const DomainError&) {
    return finish(SolveStatus::Diverged);
  }

  std::vector<double> fx(problem.size());
  for (;;) {
    try {
      problem.evaluate<double>(x, fx);
      ++rep.counters.f_evals;
      double r = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < x.size(); ++i) {
        finite = finite && std::isfinite(x[i]) && std::isfinite(fx[i]);
        r = std::max(r, std::abs(fx[i]));
      }
      if (!finite) r = std::numeric_limits<double>::infinity();
      rep.residual_history.push_back(r);
      if (cfg.keep_iterates) rep.iterate_history.push_back(x);
      if (!finite) return finish(SolveStatus::Diverged);
      if (r <= cfg.tol) return finish(SolveStatus::Converged);
      if (rep.iterations >= cfg.max_iter) return finish(SolveStatus::MaxIter);

      const LuFactors f = jac->factor(x, rep.counters);
      switch (cfg.method) {
        case MvMethod::Newton: x = newton_step(x, f, fx, rep.counters); break;
        case MvMethod::Halley: x = halley_step(problem, x, f, fx, rep.counters); break;
        case MvMethod::NaiveHalley: x = naive_halley_step(problem, x, f, fx, rep.counters); break;
      }
      ++rep.iterations;
    } catch (const SingularMatrix&) {
      return finish(SolveStatus::Degenerate);
    } catch (const ZeroPrimal&) {
      return finish(SolveStatus::Degenerate);
    } catch (const DomainError&) {
      return finish(SolveStatus::Diverged);
    }
  }
}

inline SolveReport<std::vector<double>> solve(const NonlinearProblem& problem, const MvSolveConfig& cfg) {
  return solve(problem, problem.initial_guess(), cfg);
}

}  // namespace hosolve
