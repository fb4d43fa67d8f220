#pragma once

/**
 * @file problem.hpp
 * @brief Square nonlinear systems f: R^n -> R^n written once, generically,
 *        and evaluated in plain, Taylor and index-set modes.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "hosolve/index_set.hpp"
#include "hosolve/linalg.hpp"
#include "hosolve/taylor.hpp"

namespace hosolve {

struct SparsityPattern;

/// A residual callable usable in every scalar mode.
template <class F>
concept GenericResidual =
    std::invocable<const F&, std::span<const double>, std::span<double>> &&
    std::invocable<const F&, std::span<const Taylor>, std::span<Taylor>> &&
    std::invocable<const F&, std::span<const IndexSet>, std::span<IndexSet>>;

class NonlinearProblem {
 public:
  template <class S>
  using Residual = std::function<void(std::span<const S>, std::span<S>)>;

  NonlinearProblem() = default;

  template <GenericResidual F>
  NonlinearProblem(std::vector<double> initial_guess, F residual)
      : n_(initial_guess.size()),
        x0_(std::move(initial_guess)),
        plain_(residual),
        taylor_(residual),
        tracer_(std::move(residual)) {}

  std::size_t size() const { return n_; }
  const std::vector<double>& initial_guess() const { return x0_; }

  template <class S>
  void evaluate(std::span<const S> x, std::span<S> out) const {
    if (x.size() != n_ || out.size() != n_) throw std::invalid_argument("NonlinearProblem: dimension mismatch");
    if constexpr (std::is_same_v<S, double>) {
      plain_(x, out);
    } else if constexpr (std::is_same_v<S, Taylor>) {
      taylor_(x, out);
    } else {
      static_assert(std::is_same_v<S, IndexSet>, "unsupported scalar mode");
      tracer_(x, out);
    }
  }

  template <class S>
  std::vector<S> operator()(std::span<const S> x) const {
    std::vector<S> out(n_);
    evaluate<S>(x, out);
    return out;
  }

  std::vector<double> operator()(const std::vector<double>& x) const { return (*this)(std::span<const double>(x)); }

  /// Known sparsity pattern, if any (set by the caller or a previous detection).
  const std::shared_ptr<const SparsityPattern>& pattern() const { return pattern_; }
  void set_pattern(std::shared_ptr<const SparsityPattern> p) { pattern_ = std::move(p); }

 private:
  std::size_t n_ = 0;
  std::vector<double> x0_;
  Residual<double> plain_;
  Residual<Taylor> taylor_;
  Residual<IndexSet> tracer_;
  std::shared_ptr<const SparsityPattern> pattern_;
};

/// Residual bundles of f along direction v at x, order p.
inline std::vector<Taylor> push_forward(const NonlinearProblem& problem, std::span<const double> x,
                                        std::span<const double> v, int p) {
  const auto xs = seed(x, v, p);
  std::vector<Taylor> out(problem.size());
  problem.evaluate<Taylor>(xs, out);
  return out;
}

/// Dense Jacobian, one first-order sweep per column.
inline DenseMatrix dense_jacobian(const NonlinearProblem& problem, std::span<const double> x) {
  const std::size_t n = problem.size();
  if (x.size() != n) throw std::invalid_argument("dense_jacobian: x has wrong length");
  DenseMatrix jac(n, n);
  std::vector<Taylor> xs(n), out(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = seed(x[i], 0.0, 1);
  for (std::size_t j = 0; j < n; ++j) {
    xs[j][1] = 1.0;
    problem.evaluate<Taylor>(xs, out);
    xs[j][1] = 0.0;
    for (std::size_t i = 0; i < n; ++i) jac(i, j) = out[i][1];
  }
  return jac;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace hosolve
