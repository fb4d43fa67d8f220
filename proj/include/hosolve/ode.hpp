#pragma once

/**
 * @file ode.hpp
 * @brief Implicit trapezoid and TR-BDF2 integrators whose stage equations
 *        are solved by Newton or multivariate Halley, with step-doubling
 *        error control.
 *
 * Stage equations have the form g(z) = z - base - c * rhs(t_s, z) = 0 and
 * are written generically, so the inner solver gets Jacobians and second
 * directional derivatives of g from the same Taylor machinery as any other
 * NonlinearProblem.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "hosolve/errors.hpp"
#include "hosolve/halley.hpp"
#include "hosolve/index_set.hpp"
#include "hosolve/problem.hpp"
#include "hosolve/sparsity.hpp"
#include "hosolve/taylor.hpp"

namespace hosolve {

template <class F>
concept GenericRhs = std::invocable<const F&, double, std::span<const double>, std::span<double>> &&
                     std::invocable<const F&, double, std::span<const Taylor>, std::span<Taylor>> &&
                     std::invocable<const F&, double, std::span<const IndexSet>, std::span<IndexSet>>;

/// y' = rhs(t, y) on [t0, t_end].
class OdeProblem {
 public:
  template <class S>
  using Rhs = std::function<void(double, std::span<const S>, std::span<S>)>;

  OdeProblem() = default;

  template <GenericRhs F>
  OdeProblem(std::vector<double> y0, double t0, double t_end, F rhs)
      : y0_(std::move(y0)), t0_(t0), t_end_(t_end), plain_(rhs), taylor_(rhs), tracer_(std::move(rhs)) {}

  std::size_t size() const { return y0_.size(); }
  const std::vector<double>& y0() const { return y0_; }
  double t0() const { return t0_; }
  double t_end() const { return t_end_; }

  OdeProblem with_span(double t0, double t_end) const {
    OdeProblem p = *this;
    p.t0_ = t0;
    p.t_end_ = t_end;
    return p;
  }

  template <class S>
  void evaluate(double t, std::span<const S> y, std::span<S> dy) const {
    if (y.size() != size() || dy.size() != size()) throw std::invalid_argument("OdeProblem: dimension mismatch");
    if constexpr (std::is_same_v<S, double>) {
      plain_(t, y, dy);
    } else if constexpr (std::is_same_v<S, Taylor>) {
      taylor_(t, y, dy);
    } else {
      static_assert(std::is_same_v<S, IndexSet>, "unsupported scalar mode");
      tracer_(t, y, dy);
    }
  }

  std::vector<double> operator()(double t, std::span<const double> y) const {
    std::vector<double> dy(size());
    evaluate<double>(t, y, dy);
    return dy;
  }

 private:
  std::vector<double> y0_;
  double t0_ = 0.0, t_end_ = 0.0;
  Rhs<double> plain_;
  Rhs<Taylor> taylor_;
  Rhs<IndexSet> tracer_;
};

enum class OdeScheme { Trapezoid, TRBDF2 };

constexpr std::string_view to_string(OdeScheme s) { return s == OdeScheme::Trapezoid ? "Trapezoid" : "TRBDF2"; }

struct StepperConfig {
  OdeScheme scheme = OdeScheme::TRBDF2;
  MvMethod inner = MvMethod::Newton;
  double abstol = 1e-6;
  double reltol = 1e-6;
  double h_init = 1e-3;
  double h_min = 1e-12;
  double h_max = 1.0;
  bool adaptive = true;
  /// Stage solver settings; method is taken from `inner` and a
  /// non-positive tol means 0.01 * abstol.
  MvSolveConfig inner_solver{.tol = 0.0, .max_iter = 10, .jacobian = JacobianStrategy::Sparse};

  void validate() const {
    if (!(abstol > 0.0) || !(reltol > 0.0)) throw std::invalid_argument("StepperConfig: tolerances must be positive");
    if (!(h_min > 0.0 && h_min <= h_init && h_init <= h_max))
      throw std::invalid_argument("StepperConfig: need 0 < h_min <= h_init <= h_max");
  }

  MvSolveConfig stage_solver() const {
    MvSolveConfig c = inner_solver;
    c.method = inner;
    if (!(c.tol > 0.0)) c.tol = 0.01 * abstol;
    c.keep_iterates = false;
    return c;
  }
};

/// Work done by steps and stage solves.
struct StepStats {
  std::int64_t stage_solves = 0;
  std::int64_t nonlinear_iterations = 0;
  std::int64_t factorizations = 0;
  std::int64_t back_solves = 0;
  std::int64_t f_evals = 0;

  StepStats& operator+=(const StepStats& o) {
    stage_solves += o.stage_solves;
    nonlinear_iterations += o.nonlinear_iterations;
    factorizations += o.factorizations;
    back_solves += o.back_solves;
    f_evals += o.f_evals;
    return *this;
  }
};

struct StepResult {
  std::vector<double> y;
  StepStats stats;
};

/// Optional state shared across steps of one integration.
struct StepContext {
  /// Pattern of the stage residual (rhs pattern plus diagonal).
  std::shared_ptr<const SparsityPattern> stage_pattern;
  /// Receives all work, including attempts that end in InnerSolveFailed.
  StepStats* work = nullptr;
};

namespace detail {

struct StageResidual {
  const OdeProblem* ode;
  double t;
  std::vector<double> base;
  double c;

  template <class S>
  void operator()(std::span<const S> z, std::span<S> out) const {
    ode->evaluate<S>(t, z, out);
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - base[i] - c * out[i];
  }
};

inline NonlinearProblem stage_problem(const OdeProblem& ode, double t, std::vector<double> base, double c,
                                      std::vector<double> guess) {
  return NonlinearProblem(std::move(guess), StageResidual{&ode, t, std::move(base), c});
}

inline std::vector<double> solve_stage(const OdeProblem& ode, double t, std::vector<double> base, double c,
                                       std::span<const double> guess, const StepperConfig& cfg,
                                       const StepContext& ctx, StepStats& stats) {
  NonlinearProblem g = stage_problem(ode, t, std::move(base), c, std::vector<double>(guess.begin(), guess.end()));
  if (ctx.stage_pattern) g.set_pattern(ctx.stage_pattern);
  const auto rep = solve(g, cfg.stage_solver());
  StepStats s;
  s.stage_solves = 1;
  s.nonlinear_iterations = rep.iterations;
  s.factorizations = rep.counters.factorizations;
  s.back_solves = rep.counters.back_solves;
  s.f_evals = rep.counters.f_evals;
  stats += s;
  if (ctx.work) *ctx.work += s;
  if (!rep.converged())
    throw InnerSolveFailed("stage solve at t = " + std::to_string(t) + " ended " + std::string(to_string(rep.status)));
  return rep.root;
}

}  // namespace detail

/// Trapezoid-stage pattern: rhs pattern plus the diagonal, traced at (t, y).
inline std::shared_ptr<const SparsityPattern> stage_pattern(const OdeProblem& ode, double t, std::span<const double> y) {
  std::vector<double> base(y.size(), 0.0);
  auto g = detail::stage_problem(ode, t, base, 1.0, std::vector<double>(y.begin(), y.end()));
  return std::make_shared<const SparsityPattern>(detect_pattern(g));
}

/**
 * Advance y from t by h with one implicit step.
 *
 * Trapezoid:  z - y - (h/2)(f(t, y) + f(t+h, z)) = 0.
 * TR-BDF2 (gamma = 2 - sqrt 2): a trapezoid stage to t + gamma h, then
 *   y1 - (z - (1-gamma)^2 y) / (gamma(2-gamma)) - h (1-gamma)/(2-gamma) f(t+h, y1) = 0.
 * Each stage is warm-started from the latest available state.
 *
 * @throws InnerSolveFailed when a stage solve does not converge.
 */
inline StepResult implicit_step(const OdeProblem& ode, double t, std::span<const double> y, double h,
                                const StepperConfig& cfg, const StepContext& ctx = {}) {
  if (!(h > 0.0)) throw std::invalid_argument("implicit_step: h must be positive");
  const std::size_t n = ode.size();
  StepResult res;
  const auto fy = ode(t, y);
  res.stats.f_evals += 1;
  if (ctx.work) ctx.work->f_evals += 1;

  auto trapezoid_base = [&](double c) {
    std::vector<double> base(n);
    for (std::size_t i = 0; i < n; ++i) base[i] = y[i] + c * fy[i];
    return base;
  };

  if (cfg.scheme == OdeScheme::Trapezoid) {
    const double c = 0.5 * h;
    res.y = detail::solve_stage(ode, t + h, trapezoid_base(c), c, y, cfg, ctx, res.stats);
    return res;
  }

  const double gamma = 2.0 - std::sqrt(2.0);
  const double c1 = 0.5 * gamma * h;
  const auto z = detail::solve_stage(ode, t + gamma * h, trapezoid_base(c1), c1, y, cfg, ctx, res.stats);
  const double w = 1.0 / (gamma * (2.0 - gamma));
  const double wy = (1.0 - gamma) * (1.0 - gamma) * w;
  const double c2 = h * (1.0 - gamma) / (2.0 - gamma);
  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = w * z[i] - wy * y[i];
  res.y = detail::solve_stage(ode, t + h, std::move(base), c2, z, cfg, ctx, res.stats);
  return res;
}

struct IntegrationStats {
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;
  StepStats work;
};

struct IntegrationResult {
  double t = 0.0;
  std::vector<double> y;
  IntegrationStats stats;
};

/// Local error of the half-step pair over the full step, for order-2 schemes.
inline constexpr double kStepDoublingDivisor = 3.0;

/**
 * Integrate from t0 to t_end.
 *
 * Adaptive mode uses step doubling: one step of h and two of h/2; the
 * difference / 3 estimates the local error of the half-step result, which
 * is accepted when it is below abstol + reltol * |y|_inf. The next step is
 * h * clamp(0.9 (tol/err)^{1/3}, 0.2, 5). A failed stage solve halves h.
 * Fixed mode takes steps of h_init.
 *
 * @throws StepSizeUnderflow when h drops below h_min.
 */
inline IntegrationResult integrate(const OdeProblem& ode, const StepperConfig& cfg) {
  cfg.validate();
  IntegrationResult out;
  out.t = ode.t0();
  out.y = ode.y0();
  StepContext ctx;
  ctx.stage_pattern = stage_pattern(ode, ode.t0(), ode.y0());
  ctx.work = &out.stats.work;

  const double t_end = ode.t_end();
  const double t_eps = 1e-13 * std::max(1.0, std::abs(t_end));
  double h = cfg.h_init;

  while (t_end - out.t > t_eps) {
    const bool last = h >= t_end - out.t;
    const double hs = last ? t_end - out.t : h;

    if (!cfg.adaptive) {
      out.y = implicit_step(ode, out.t, out.y, hs, cfg, ctx).y;
      out.t = last ? t_end : out.t + hs;
      ++out.stats.accepted_steps;
      continue;
    }

    std::vector<double> big, small;
    try {
      big = implicit_step(ode, out.t, out.y, hs, cfg, ctx).y;
      const auto mid = implicit_step(ode, out.t, out.y, 0.5 * hs, cfg, ctx).y;
      small = implicit_step(ode, out.t + 0.5 * hs, mid, 0.5 * hs, cfg, ctx).y;
    } catch (const InnerSolveFailed&) {
      ++out.stats.rejected_steps;
      h = 0.5 * hs;
      if (h < cfg.h_min) throw StepSizeUnderflow("integrate: step size underflow at t = " + std::to_string(out.t));
      continue;
    }

    double err = 0.0;
    for (std::size_t i = 0; i < small.size(); ++i) err = std::max(err, std::abs(small[i] - big[i]));
    err /= kStepDoublingDivisor;
    const double scale = cfg.abstol + cfg.reltol * max_abs(out.y);
    const double ratio = err / scale;
    if (!std::isfinite(ratio)) {
      ++out.stats.rejected_steps;
      h = 0.2 * hs;
    } else {
      if (ratio <= 1.0) {
        out.y = std::move(small);
        out.t = last ? t_end : out.t + hs;
        ++out.stats.accepted_steps;
      } else {
        ++out.stats.rejected_steps;
      }
      const double factor = ratio > 0.0 ? std::clamp(0.9 * std::cbrt(1.0 / ratio), 0.2, 5.0) : 5.0;
      h = std::min(hs * factor, cfg.h_max);
    }
    if (h < cfg.h_min && t_end - out.t > t_eps)
      throw StepSizeUnderflow("integrate: step size underflow at t = " + std::to_string(out.t));
  }
  return out;
}

/// sum (y - ref)^2 / sum ref^2 over all components.
inline double relative_l2_error(std::span<const double> y, std::span<const double> ref) {
  if (y.size() != ref.size()) throw std::invalid_argument("relative_l2_error: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - ref[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw ZeroReference("relative_l2_error: reference is zero");
  return num / den;
}

/// One cell of a work-precision sweep.
struct WorkPrecisionRecord {
  OdeScheme scheme = OdeScheme::TRBDF2;
  MvMethod inner = MvMethod::Newton;
  double tolerance = 0.0;
  double error = 0.0;
  double wall_time_s = 0.0;
  std::int64_t total_steps = 0;
  std::int64_t rejected_steps = 0;
  std::int64_t total_nonlinear_iterations = 0;
  std::int64_t total_factorizations = 0;
  std::int64_t total_back_solves = 0;
};

}  // namespace hosolve
