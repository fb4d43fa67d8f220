#pragma once

/**
 * @file taylor.hpp
 * @brief Truncated Taylor series ("Taylor bundles") along one direction.
 *
 * A bundle of order p stores the normalized coefficients
 *
 *     c[k] = D^k f(x)[v, ..., v] / k!,   k = 0..p,
 *
 * so that f(x + t v) = sum_k c[k] t^k + O(t^{p+1}). Every elementary function
 * is pushed forward with its own coefficient recurrence (the ones obtained by
 * differentiating g' = h(f) f'), which keeps a p-th order evaluation at
 * O(p^2) flops per operation instead of the exponential cost of nesting
 * first-order duals.
 *
 * @code
 * auto t = hosolve::seed(1.0, 1.0, 3);
 * auto y = hosolve::exp(t * t);
 * double d2 = hosolve::derivative(y, 2);   // d^2/dx^2 exp(x^2) at x = 1
 * @endcode
 *
 * Coefficients live inline (no heap traffic); orders up to kMaxTaylorOrder.
 * Order-0 bundles are constants and combine with bundles of any order.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hosolve/errors.hpp"
#include "hosolve/scalar.hpp"

namespace hosolve {

inline constexpr int kMaxTaylorOrder = 8;

/// |f[0]| below this raises ZeroPrimal in reciprocal/division.
inline constexpr double kZeroPrimalFloor = 1e-300;

template <class T = double>
class TaylorBundle {
 public:
  using value_type = T;

  TaylorBundle() = default;

  /// Constant (order 0). Implicit so literals mix into generic code.
  TaylorBundle(T value) { c_[0] = value; }  // NOLINT(google-explicit-constructor)

  /// Order-p bundle with every coefficient zero except the primal.
  TaylorBundle(int order, T value) : order_(checked_order(order)) { c_[0] = value; }

  int order() const { return order_; }
  T value() const { return c_[0]; }

  T operator[](int k) const { return c_[k]; }
  T& operator[](int k) { return c_[k]; }

  std::span<const T> coeffs() const { return {c_.data(), static_cast<std::size_t>(order_) + 1}; }
  std::span<T> coeffs() { return {c_.data(), static_cast<std::size_t>(order_) + 1}; }

  static int checked_order(int order) {
    if (order < 0 || order > kMaxTaylorOrder)
      throw std::invalid_argument("TaylorBundle: order " + std::to_string(order) +
                                  " outside [0, " + std::to_string(kMaxTaylorOrder) + "]");
    return order;
  }

  TaylorBundle& operator+=(const TaylorBundle& b) { return *this = *this + b; }
  TaylorBundle& operator-=(const TaylorBundle& b) { return *this = *this - b; }
  TaylorBundle& operator*=(const TaylorBundle& b) { return *this = *this * b; }
  TaylorBundle& operator/=(const TaylorBundle& b) { return *this = *this / b; }

 private:
  int order_ = 0;
  // Entries past order_ are kept at zero; constants rely on it.
  std::array<T, kMaxTaylorOrder + 1> c_{};
};

using Taylor = TaylorBundle<double>;

namespace detail {

template <class T>
int common_order(const TaylorBundle<T>& a, const TaylorBundle<T>& b) {
  if (a.order() == b.order() || b.order() == 0) return a.order();
  if (a.order() == 0) return b.order();
  throw std::invalid_argument("TaylorBundle: order mismatch (" + std::to_string(a.order()) +
                              " vs " + std::to_string(b.order()) + ")");
}

template <class T>
void require_nonzero(T v, const char* what) {
  using std::abs;
  if (!(abs(v) >= kZeroPrimalFloor)) throw ZeroPrimal(std::string(what) + ": primal below floor");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Construction and extraction
// ---------------------------------------------------------------------------

/// (x, v, 0, ..., 0) of order p.
template <class T>
TaylorBundle<T> seed(T x, T v, int p) {
  if (p < 1) throw std::invalid_argument("seed: order must be >= 1");
  TaylorBundle<T> b(p, x);
  b[1] = v;
  return b;
}

/// Component-wise seed of a vector point along a vector direction.
inline std::vector<Taylor> seed(std::span<const double> x, std::span<const double> v, int p) {
  if (x.size() != v.size()) throw std::invalid_argument("seed: point and direction differ in length");
  std::vector<Taylor> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(seed(x[i], v[i], p));
  return out;
}

inline std::vector<Taylor> seed(const std::vector<double>& x, const std::vector<double>& v, int p) {
  return seed(std::span<const double>(x), std::span<const double>(v), p);
}

/// Raw directional derivative D^k f[v,...,v] = k! c[k].
template <class T>
T derivative(const TaylorBundle<T>& b, int k) {
  if (k < 0 || k > b.order()) throw std::out_of_range("derivative: k outside [0, order]");
  T fact = T(1);
  for (int i = 2; i <= k; ++i) fact *= T(i);
  return fact * b[k];
}

inline std::vector<double> derivative(std::span<const Taylor> b, int k) {
  std::vector<double> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = derivative(b[i], k);
  return out;
}

inline std::vector<double> derivative(const std::vector<Taylor>& b, int k) {
  return derivative(std::span<const Taylor>(b), k);
}

template <class T>
T primal(const TaylorBundle<T>& b) {
  return b.value();
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

template <class T>
TaylorBundle<T> operator+(const TaylorBundle<T>& a) {
  return a;
}

template <class T>
TaylorBundle<T> operator-(const TaylorBundle<T>& a) {
  TaylorBundle<T> r(a.order(), T{});
  for (int k = 0; k <= a.order(); ++k) r[k] = -a[k];
  return r;
}

template <class T>
TaylorBundle<T> operator+(const TaylorBundle<T>& a, const TaylorBundle<T>& b) {
  const int p = detail::common_order(a, b);
  TaylorBundle<T> r(p, T{});
  for (int k = 0; k <= p; ++k) r[k] = a[k] + b[k];
  return r;
}

template <class T>
TaylorBundle<T> operator-(const TaylorBundle<T>& a, const TaylorBundle<T>& b) {
  const int p = detail::common_order(a, b);
  TaylorBundle<T> r(p, T{});
  for (int k = 0; k <= p; ++k) r[k] = a[k] - b[k];
  return r;
}

/// Truncated Cauchy product.
template <class T>
TaylorBundle<T> operator*(const TaylorBundle<T>& a, const TaylorBundle<T>& b) {
  const int p = detail::common_order(a, b);
  TaylorBundle<T> r(p, T{});
  if (a.order() == 0 || b.order() == 0) {
    const T s = a.order() == 0 ? a[0] : b[0];
    const TaylorBundle<T>& v = a.order() == 0 ? b : a;
    for (int k = 0; k <= p; ++k) r[k] = s * v[k];
    return r;
  }
  for (int k = 0; k <= p; ++k) {
    T acc = a[0] * b[k];
    for (int j = 1; j <= k; ++j) acc += a[j] * b[k - j];
    r[k] = acc;
  }
  return r;
}

/// g = a / b with g[k] = (a[k] - sum_{j=1..k} b[j] g[k-j]) / b[0].
template <class T>
TaylorBundle<T> operator/(const TaylorBundle<T>& a, const TaylorBundle<T>& b) {
  const int p = detail::common_order(a, b);
  detail::require_nonzero(b[0], "division");
  TaylorBundle<T> r(p, T{});
  if (b.order() == 0) {
    for (int k = 0; k <= p; ++k) r[k] = a[k] / b[0];
    return r;
  }
  r[0] = a[0] / b[0];
  for (int k = 1; k <= p; ++k) {
    T acc = a[k];
    for (int j = 1; j <= k; ++j) acc -= b[j] * r[k - j];
    r[k] = acc / b[0];
  }
  return r;
}

template <class T>
TaylorBundle<T> operator+(const TaylorBundle<T>& a, T s) {
  TaylorBundle<T> r = a;
  r[0] = a[0] + s;
  return r;
}
template <class T>
TaylorBundle<T> operator+(T s, const TaylorBundle<T>& a) {
  TaylorBundle<T> r = a;
  r[0] = s + a[0];
  return r;
}
template <class T>
TaylorBundle<T> operator-(const TaylorBundle<T>& a, T s) {
  TaylorBundle<T> r = a;
  r[0] = a[0] - s;
  return r;
}
template <class T>
TaylorBundle<T> operator-(T s, const TaylorBundle<T>& a) {
  TaylorBundle<T> r = -a;
  r[0] = s - a[0];
  return r;
}
template <class T>
TaylorBundle<T> operator*(const TaylorBundle<T>& a, T s) {
  TaylorBundle<T> r(a.order(), T{});
  for (int k = 0; k <= a.order(); ++k) r[k] = a[k] * s;
  return r;
}
template <class T>
TaylorBundle<T> operator*(T s, const TaylorBundle<T>& a) {
  TaylorBundle<T> r(a.order(), T{});
  for (int k = 0; k <= a.order(); ++k) r[k] = s * a[k];
  return r;
}
template <class T>
TaylorBundle<T> operator/(const TaylorBundle<T>& a, T s) {
  detail::require_nonzero(s, "division");
  TaylorBundle<T> r(a.order(), T{});
  for (int k = 0; k <= a.order(); ++k) r[k] = a[k] / s;
  return r;
}
template <class T>
TaylorBundle<T> operator/(T s, const TaylorBundle<T>& b) {
  return TaylorBundle<T>(s) / b;
}

// Comparisons look at the primal only.
template <class T>
bool operator<(const TaylorBundle<T>& a, const TaylorBundle<T>& b) {
  return a[0] < b[0];
}
template <class T>
bool operator>(const TaylorBundle<T>& a, const TaylorBundle<T>& b) {
  return a[0] > b[0];
}
template <class T>
bool operator<=(const TaylorBundle<T>& a, const TaylorBundle<T>& b) {
  return a[0] <= b[0];
}
template <class T>
bool operator>=(const TaylorBundle<T>& a, const TaylorBundle<T>& b) {
  return a[0] >= b[0];
}
template <class T>
bool operator<(const TaylorBundle<T>& a, T s) {
  return a[0] < s;
}
template <class T>
bool operator>(const TaylorBundle<T>& a, T s) {
  return a[0] > s;
}
template <class T>
bool operator<=(const TaylorBundle<T>& a, T s) {
  return a[0] <= s;
}
template <class T>
bool operator>=(const TaylorBundle<T>& a, T s) {
  return a[0] >= s;
}

// ---------------------------------------------------------------------------
// Elementary functions
// ---------------------------------------------------------------------------

template <class T>
TaylorBundle<T> reciprocal(const TaylorBundle<T>& f) {
  detail::require_nonzero(f[0], "reciprocal");
  const int p = f.order();
  TaylorBundle<T> g(p, T{});
  g[0] = T(1) / f[0];
  for (int k = 1; k <= p; ++k) {
    T acc = f[1] * g[k - 1];
    for (int j = 2; j <= k; ++j) acc += f[j] * g[k - j];
    g[k] = -g[0] * acc;
  }
  return g;
}

/// g' = g f'  =>  k g[k] = sum_{j=1..k} j f[j] g[k-j].
template <class T>
TaylorBundle<T> exp(const TaylorBundle<T>& f) {
  using std::exp;
  const int p = f.order();
  TaylorBundle<T> g(p, T{});
  g[0] = exp(f[0]);
  for (int k = 1; k <= p; ++k) {
    T acc{};
    for (int j = 1; j <= k; ++j) acc += T(j) * f[j] * g[k - j];
    g[k] = acc / T(k);
  }
  return g;
}

/// f g' = f'  =>  g[k] = (f[k] - (1/k) sum_{j=1..k-1} j g[j] f[k-j]) / f[0].
template <class T>
TaylorBundle<T> log(const TaylorBundle<T>& f) {
  using std::log;
  if (!(f[0] > T(0))) throw DomainError("log: primal must be positive");
  const int p = f.order();
  TaylorBundle<T> g(p, T{});
  g[0] = log(f[0]);
  for (int k = 1; k <= p; ++k) {
    T acc{};
    for (int j = 1; j < k; ++j) acc += T(j) * g[j] * f[k - j];
    g[k] = (f[k] - acc / T(k)) / f[0];
  }
  return g;
}

namespace detail {

// s' = c f', c' = -s f'
template <class T>
void sin_cos(const TaylorBundle<T>& f, TaylorBundle<T>& s, TaylorBundle<T>& c) {
  using std::cos;
  using std::sin;
  const int p = f.order();
  s = TaylorBundle<T>(p, sin(f[0]));
  c = TaylorBundle<T>(p, cos(f[0]));
  for (int k = 1; k <= p; ++k) {
    T as{}, ac{};
    for (int j = 1; j <= k; ++j) {
      as += T(j) * f[j] * c[k - j];
      ac += T(j) * f[j] * s[k - j];
    }
    s[k] = as / T(k);
    c[k] = -ac / T(k);
  }
}

}  // namespace detail

template <class T>
TaylorBundle<T> sin(const TaylorBundle<T>& f) {
  TaylorBundle<T> s, c;
  detail::sin_cos(f, s, c);
  return s;
}

template <class T>
TaylorBundle<T> cos(const TaylorBundle<T>& f) {
  TaylorBundle<T> s, c;
  detail::sin_cos(f, s, c);
  return c;
}

/// g^2 = f  =>  g[k] = (f[k] - sum_{j=1..k-1} g[j] g[k-j]) / (2 g[0]).
template <class T>
TaylorBundle<T> sqrt(const TaylorBundle<T>& f) {
  using std::sqrt;
  if (!(f[0] > T(0))) throw DomainError("sqrt: primal must be positive");
  const int p = f.order();
  TaylorBundle<T> g(p, T{});
  g[0] = sqrt(f[0]);
  for (int k = 1; k <= p; ++k) {
    T acc{};
    for (int j = 1; j < k; ++j) acc += g[j] * g[k - j];
    g[k] = (f[k] - acc) / (T(2) * g[0]);
  }
  return g;
}

/// f^r for real r: f g' = r f' g  =>  k f[0] g[k] = sum_{j=1..k} (r j - (k - j)) f[j] g[k-j].
template <class T>
TaylorBundle<T> pow(const TaylorBundle<T>& f, T r) {
  using std::pow;
  if (!(f[0] > T(0))) throw DomainError("pow: real exponent needs a positive base");
  const int p = f.order();
  TaylorBundle<T> g(p, T{});
  g[0] = pow(f[0], r);
  for (int k = 1; k <= p; ++k) {
    T acc{};
    for (int j = 1; j <= k; ++j) acc += (r * T(j) - T(k - j)) * f[j] * g[k - j];
    g[k] = acc / (T(k) * f[0]);
  }
  return g;
}

template <class T>
TaylorBundle<T> pow(const TaylorBundle<T>& f, int n) {
  return ipow(f, n);
}

/// base^f = exp(f log base); primal taken from std::pow to match plain evaluation.
template <class T>
TaylorBundle<T> pow(T base, const TaylorBundle<T>& f) {
  using std::log;
  using std::pow;
  if (!(base > T(0))) throw DomainError("pow: base must be positive");
  const T lb = log(base);
  const int p = f.order();
  TaylorBundle<T> g(p, T{});
  g[0] = pow(base, f[0]);
  for (int k = 1; k <= p; ++k) {
    T acc{};
    for (int j = 1; j <= k; ++j) acc += T(j) * f[j] * g[k - j];
    g[k] = lb * acc / T(k);
  }
  return g;
}

template <class T>
std::ostream& operator<<(std::ostream& os, const TaylorBundle<T>& b) {
  os << '(';
  for (int k = 0; k <= b.order(); ++k) os << (k ? ", " : "") << b[k];
  return os << ')';
}

}  // namespace hosolve
