#pragma once

/**
 * @file index_set.hpp
 * @brief Dependency-tracking scalar used for symbolic sparsity detection.
 *
 * An IndexSet carries the primal value (so branches in user code follow the
 * same path as a plain evaluation) and the sorted set of input indices the
 * value depends on. Every operation returns the union of its operands' sets.
 */

#include <algorithm>
#include <cmath>
#include <iterator>
#include <utility>
#include <vector>

#include "hosolve/errors.hpp"
#include "hosolve/scalar.hpp"

namespace hosolve {

class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(double value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  IndexSet(double value, std::vector<int> deps) : value_(value), deps_(std::move(deps)) {
    std::sort(deps_.begin(), deps_.end());
    deps_.erase(std::unique(deps_.begin(), deps_.end()), deps_.end());
  }

  static IndexSet variable(double value, int index) { return IndexSet(value, std::vector<int>{index}); }

  double value() const { return value_; }
  const std::vector<int>& indices() const { return deps_; }

  static IndexSet merged(double value, const IndexSet& a, const IndexSet& b) {
    IndexSet r(value);
    r.deps_.reserve(a.deps_.size() + b.deps_.size());
    std::set_union(a.deps_.begin(), a.deps_.end(), b.deps_.begin(), b.deps_.end(),
                   std::back_inserter(r.deps_));
    return r;
  }

  static IndexSet mapped(double value, const IndexSet& a) {
    IndexSet r(a);
    r.value_ = value;
    return r;
  }

  IndexSet& operator+=(const IndexSet& b) { return *this = merged(value_ + b.value_, *this, b); }
  IndexSet& operator-=(const IndexSet& b) { return *this = merged(value_ - b.value_, *this, b); }
  IndexSet& operator*=(const IndexSet& b) { return *this = merged(value_ * b.value_, *this, b); }
  IndexSet& operator/=(const IndexSet& b) { return *this = merged(value_ / b.value_, *this, b); }

 private:
  double value_ = 0.0;
  std::vector<int> deps_;
};

inline double primal(const IndexSet& s) { return s.value(); }

inline IndexSet operator+(const IndexSet& a) { return a; }
inline IndexSet operator-(const IndexSet& a) { return IndexSet::mapped(-a.value(), a); }

inline IndexSet operator+(const IndexSet& a, const IndexSet& b) {
  return IndexSet::merged(a.value() + b.value(), a, b);
}
inline IndexSet operator-(const IndexSet& a, const IndexSet& b) {
  return IndexSet::merged(a.value() - b.value(), a, b);
}
inline IndexSet operator*(const IndexSet& a, const IndexSet& b) {
  return IndexSet::merged(a.value() * b.value(), a, b);
}
inline IndexSet operator/(const IndexSet& a, const IndexSet& b) {
  return IndexSet::merged(a.value() / b.value(), a, b);
}

inline IndexSet operator+(const IndexSet& a, double s) { return IndexSet::mapped(a.value() + s, a); }
inline IndexSet operator+(double s, const IndexSet& a) { return IndexSet::mapped(s + a.value(), a); }
inline IndexSet operator-(const IndexSet& a, double s) { return IndexSet::mapped(a.value() - s, a); }
inline IndexSet operator-(double s, const IndexSet& a) { return IndexSet::mapped(s - a.value(), a); }
inline IndexSet operator*(const IndexSet& a, double s) { return IndexSet::mapped(a.value() * s, a); }
inline IndexSet operator*(double s, const IndexSet& a) { return IndexSet::mapped(s * a.value(), a); }
inline IndexSet operator/(const IndexSet& a, double s) { return IndexSet::mapped(a.value() / s, a); }
inline IndexSet operator/(double s, const IndexSet& a) { return IndexSet::mapped(s / a.value(), a); }

inline bool operator<(const IndexSet& a, const IndexSet& b) { return a.value() < b.value(); }
inline bool operator>(const IndexSet& a, const IndexSet& b) { return a.value() > b.value(); }
inline bool operator<=(const IndexSet& a, const IndexSet& b) { return a.value() <= b.value(); }
inline bool operator>=(const IndexSet& a, const IndexSet& b) { return a.value() >= b.value(); }
inline bool operator<(const IndexSet& a, double s) { return a.value() < s; }
inline bool operator>(const IndexSet& a, double s) { return a.value() > s; }
inline bool operator<=(const IndexSet& a, double s) { return a.value() <= s; }
inline bool operator>=(const IndexSet& a, double s) { return a.value() >= s; }

inline IndexSet exp(const IndexSet& a) { return IndexSet::mapped(std::exp(a.value()), a); }
inline IndexSet sin(const IndexSet& a) { return IndexSet::mapped(std::sin(a.value()), a); }
inline IndexSet cos(const IndexSet& a) { return IndexSet::mapped(std::cos(a.value()), a); }

inline IndexSet log(const IndexSet& a) {
  if (!(a.value() > 0.0)) throw DomainError("log: primal must be positive");
  return IndexSet::mapped(std::log(a.value()), a);
}

inline IndexSet sqrt(const IndexSet& a) {
  if (!(a.value() > 0.0)) throw DomainError("sqrt: primal must be positive");
  return IndexSet::mapped(std::sqrt(a.value()), a);
}

inline IndexSet pow(const IndexSet& a, double r) {
  if (!(a.value() > 0.0)) throw DomainError("pow: real exponent needs a positive base");
  return IndexSet::mapped(std::pow(a.value(), r), a);
}
inline IndexSet pow(const IndexSet& a, int n) { return ipow(a, n); }
inline IndexSet pow(double base, const IndexSet& a) { return IndexSet::mapped(std::pow(base, a.value()), a); }

}  // namespace hosolve
