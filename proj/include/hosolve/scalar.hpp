#pragma once

/**
 * @file scalar.hpp
 * @brief Plain-real side of the generic scalar contract.
 *
 * Residual functions in this library are templates over a scalar type S and
 * are instantiated with three modes: `double`, `TaylorBundle<double>` and
 * `IndexSet`. Inside namespace hosolve they call `exp`, `log`, `pow`, ...
 * unqualified; the overloads below make those calls resolve for `double`
 * with exactly the arithmetic the Taylor rules use for their primal, so the
 * value part of every mode agrees bit for bit.
 */

#include <cmath>
#include <concepts>

namespace hosolve {

inline double primal(double x) { return x; }

// Using-declarations rather than wrappers: a caller with both <cmath> and
// `using namespace hosolve` in scope then sees one function, not two.
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

/// Integer power by binary exponentiation. Shared by every scalar mode so
/// the primal sequence of multiplications is identical across modes.
template <class S>
S ipow(const S& x, int n) {
  if (n < 0) return S(1.0) / ipow(x, -n);
  if (n == 0) return S(1.0) + 0.0 * x;
  S result = x;
  S base = x;
  --n;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

inline double pow(double x, int n) { return ipow(x, n); }

}  // namespace hosolve
