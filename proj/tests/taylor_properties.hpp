#pragma once

/**
 * @file taylor_properties.hpp
 * @brief Randomized property suites for the Taylor engine, shared by the
 *        unit tests and the acceptance runner.
 *
 * Each suite returns the number of cases checked, the number that failed
 * and a description of the first failure.
 */

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hosolve/taylor.hpp"

namespace hosolve::props {

struct PropertyOutcome {
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  void record(bool ok, const std::function<std::string()>& describe) {
    ++cases;
    if (ok) return;
    if (failures++ == 0) first_failure = describe();
  }
};

inline Taylor random_bundle(std::mt19937_64& rng, int p, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Taylor b(p, 0.0);
  for (int k = 0; k <= p; ++k) b[k] = u(rng);
  return b;
}

inline double rel_diff(const Taylor& a, const Taylor& b) {
  double num = 0.0, den = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    num = std::max(num, std::abs(a[k] - b[k]));
    den = std::max(den, std::abs(b[k]));
  }
  return num / den;
}

/// k-th derivative of g at x from central differences with a 5-level
/// Richardson table (error O(h^10)); independent of the Taylor rules.
inline double fd_derivative(const std::function<double(double)>& g, double x, int k, double h) {
  auto central = [&](double hh) {
    double binom = 1.0, acc = 0.0;
    for (int i = 0; i <= k; ++i) {
      const double sign = (i % 2) ? -1.0 : 1.0;
      acc += sign * binom * g(x + (0.5 * k - i) * hh);
      binom = binom * (k - i) / (i + 1);
    }
    return acc / std::pow(hh, k);
  };
  constexpr int L = 5;
  double t[L][L];
  for (int i = 0; i < L; ++i) t[i][0] = central(h / std::pow(2.0, i));
  for (int j = 1; j < L; ++j)
    for (int i = j; i < L; ++i) {
      const double f = std::pow(4.0, j);
      t[i][j] = (f * t[i][j - 1] - t[i - 1][j - 1]) / (f - 1.0);
    }
  return t[L - 1][L - 1];
}

/// Commutativity, associativity and distributivity of the truncated product,
/// relative 1e-13, over `trials` random triples of order 1..8.
inline PropertyOutcome ring_axioms(int trials = 1000, std::uint64_t rng_seed = 20240611) {
  PropertyOutcome out;
  std::mt19937_64 rng(rng_seed);
  std::uniform_int_distribution<int> order(1, kMaxTaylorOrder);
  for (int trial = 0; trial < trials; ++trial) {
    const int p = order(rng);
    const Taylor a = random_bundle(rng, p), b = random_bundle(rng, p), c = random_bundle(rng, p);
    const double d1 = rel_diff(a * b, b * a);
    const double d2 = rel_diff((a * b) * c, a * (b * c));
    const double d3 = rel_diff(a * (b + c), a * b + a * c);
    out.record(d1 <= 1e-13 && d2 <= 1e-13 && d3 <= 1e-13, [&] {
      std::ostringstream os;
      os << "trial " << trial << " p=" << p << " diffs " << d1 << ' ' << d2 << ' ' << d3;
      return os.str();
    });
  }
  return out;
}

/// f * reciprocal(f) = 1 coefficientwise. The residual of coefficient k is
/// measured against sum_j |f[j] g[k-j]|, the size of the terms it cancels.
inline PropertyOutcome reciprocal_inverse(int trials = 1000, std::uint64_t rng_seed = 77) {
  PropertyOutcome out;
  std::mt19937_64 rng(rng_seed);
  std::uniform_int_distribution<int> order(1, kMaxTaylorOrder);
  std::uniform_real_distribution<double> mag(0.1, 2.0);
  std::bernoulli_distribution neg(0.5);
  for (int trial = 0; trial < trials; ++trial) {
    const int p = order(rng);
    Taylor f = random_bundle(rng, p);
    f[0] = neg(rng) ? -mag(rng) : mag(rng);
    const Taylor g = reciprocal(f);
    const Taylor prod = f * g;
    bool ok = true;
    int bad_k = -1;
    for (int k = 0; k <= p; ++k) {
      double scale = 0.0;
      for (int j = 0; j <= k; ++j) scale += std::abs(f[j] * g[k - j]);
      if (!(std::abs(prod[k] - (k == 0 ? 1.0 : 0.0)) <= 1e-12 * scale)) {
        ok = false;
        bad_k = k;
        break;
      }
    }
    out.record(ok, [&] {
      std::ostringstream os;
      os << "trial " << trial << " p=" << p << " k=" << bad_k;
      return os.str();
    });
  }
  return out;
}

/// Directional derivatives of order 1..4 against a Richardson finite
/// difference oracle, relative 1e-6 with floor 1, on 10 functions.
inline PropertyOutcome finite_difference_oracle(int points_per_function = 100, std::uint64_t rng_seed = 4242) {
  struct Case {
    const char* name;
    std::function<Taylor(const Taylor&)> t;
    std::function<double(double)> d;
    double lo, hi;
  };
  const std::vector<Case> cases{
      {"exp", [](const Taylor& x) { return exp(x); }, [](double x) { return std::exp(x); }, -1.5, 1.5},
      {"log", [](const Taylor& x) { return log(x); }, [](double x) { return std::log(x); }, 0.8, 3.0},
      {"sin", [](const Taylor& x) { return sin(x); }, [](double x) { return std::sin(x); }, -3.0, 3.0},
      {"cos", [](const Taylor& x) { return cos(x); }, [](double x) { return std::cos(x); }, -3.0, 3.0},
      {"sqrt", [](const Taylor& x) { return sqrt(x); }, [](double x) { return std::sqrt(x); }, 0.8, 3.0},
      {"pow1.7", [](const Taylor& x) { return pow(x, 1.7); }, [](double x) { return std::pow(x, 1.7); }, 0.8, 3.0},
      {"pow3", [](const Taylor& x) { return pow(x, 3); }, [](double x) { return x * x * x; }, -2.0, 2.0},
      {"2^x", [](const Taylor& x) { return pow(2.0, x); }, [](double x) { return std::pow(2.0, x); }, -2.0, 2.0},
      {"div", [](const Taylor& x) { return 1.0 / x; }, [](double x) { return 1.0 / x; }, 0.8, 3.0},
      {"composite", [](const Taylor& x) { return exp(sin(x)) / (1.0 + x * x); },
       [](double x) { return std::exp(std::sin(x)) / (1.0 + x * x); }, -1.0, 1.0},
  };
  PropertyOutcome out;
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& c : cases) {
    for (int trial = 0; trial < points_per_function; ++trial) {
      const double x = c.lo + (c.hi - c.lo) * unit(rng);
      const double v = 0.5 + unit(rng);
      const Taylor y = c.t(seed(x, v, 4));
      auto along = [&](double s) { return c.d(x + s * v); };
      for (int k = 1; k <= 4; ++k) {
        const double fd = fd_derivative(along, 0.0, k, 0.05 * (k + 1));
        const double ad = derivative(y, k);
        out.record(std::abs(ad - fd) <= 1e-6 * std::max(1.0, std::abs(fd)), [&] {
          std::ostringstream os;
          os << c.name << " x=" << x << " v=" << v << " k=" << k << " ad=" << ad << " fd=" << fd;
          return os.str();
        });
      }
    }
  }
  return out;
}

}  // namespace hosolve::props
