#pragma once

/**
 * @file linalg.hpp
 * @brief Dense and sparse LU factorizations that are built once and then
 *        applied to any number of right-hand sides.
 *
 * Dense: right-looking Gaussian elimination with partial pivoting on a
 * row-major copy, P A = L U stored in place.
 *
 * Sparse: left-looking column LU (Gilbert-Peierls). Column j of L and U is
 * obtained from a sparse triangular solve with the already computed part of
 * L, whose nonzero structure is found by a depth-first reach in the graph of
 * L. Rows are pivoted by magnitude. Columns are visited in a fill-limiting
 * order (reverse Cuthill-McKee on the symmetrized pattern by default), which
 * can be computed once and reused for every matrix with the same pattern.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hosolve/errors.hpp"

namespace hosolve {

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {a_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {a_.data() + i * cols_, cols_}; }

  std::span<const double> data() const { return a_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

inline std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
  return y;
}

/// Square compressed-sparse-column matrix.
struct CsMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> col_ptr;  // n + 1 entries
  std::vector<int> row_idx;          // strictly increasing within a column
  std::vector<double> values;

  std::size_t nnz() const { return row_idx.size(); }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }

  /// Entry (i, j); zero when structurally absent.
  double at(int i, int j) const {
    auto first = row_idx.begin() + static_cast<std::ptrdiff_t>(col_ptr[j]);
    auto last = row_idx.begin() + static_cast<std::ptrdiff_t>(col_ptr[j + 1]);
    auto it = std::lower_bound(first, last, i);
    return (it != last && *it == i) ? values[static_cast<std::size_t>(it - row_idx.begin())] : 0.0;
  }

  DenseMatrix to_dense() const {
    DenseMatrix d(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = col_ptr[j]; p < col_ptr[j + 1]; ++p) d(static_cast<std::size_t>(row_idx[p]), j) = values[p];
    return d;
  }

  static CsMatrix from_dense(const DenseMatrix& d, double drop = 0.0) {
    CsMatrix m;
    m.n = d.rows();
    m.col_ptr.assign(m.n + 1, 0);
    for (std::size_t j = 0; j < m.n; ++j) {
      for (std::size_t i = 0; i < m.n; ++i) {
        if (std::abs(d(i, j)) > drop) {
          m.row_idx.push_back(static_cast<int>(i));
          m.values.push_back(d(i, j));
        }
      }
      m.col_ptr[j + 1] = m.row_idx.size();
    }
    return m;
  }
};

inline std::vector<double> multiply(const CsMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.n, 0.0);
  for (std::size_t j = 0; j < a.n; ++j)
    for (std::size_t p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) y[static_cast<std::size_t>(a.row_idx[p])] += a.values[p] * x[j];
  return y;
}

/**
 * Reverse Cuthill-McKee ordering of the symmetrized structure A + A^T.
 * Each connected component starts from a minimum-degree vertex.
 */
inline std::vector<int> reverse_cuthill_mckee(const CsMatrix& a) {
  const std::size_t n = a.n;
  std::vector<std::vector<int>> adj(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
      const int i = a.row_idx[p];
      if (static_cast<std::size_t>(i) == j) continue;
      adj[j].push_back(i);
      adj[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
    }
  }
  for (auto& nb : adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  std::vector<int> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](int x, int y) { return adj[static_cast<std::size_t>(x)].size() < adj[static_cast<std::size_t>(y)].size(); });
  for (int start : by_degree) {
    if (seen[static_cast<std::size_t>(start)]) continue;
    std::queue<int> q;
    q.push(start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      order.push_back(v);
      std::vector<int> next;
      for (int w : adj[static_cast<std::size_t>(v)])
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          next.push_back(w);
        }
      std::stable_sort(next.begin(), next.end(), [&](int x, int y) {
        return adj[static_cast<std::size_t>(x)].size() < adj[static_cast<std::size_t>(y)].size();
      });
      for (int w : next) q.push(w);
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

enum class LuKind { Dense, Sparse };

/// Pivots with |pivot| <= kSingularPivotRatio * max|A| are treated as zero.
inline constexpr double kSingularPivotRatio = 1e-14;

struct SparseLuOptions {
  /// Column visiting order; empty means compute RCM (or natural if use_rcm is false).
  std::vector<int> column_order;
  bool use_rcm = true;
};

/**
 * A factorization P A Q = L U that serves any number of solves.
 *
 * Dense: `lu_` holds L (unit, strictly lower) and U in place, perm_[k] is
 * the original row placed at position k.
 * Sparse: L and U in CSC form over pivot positions; pinv_ maps original
 * rows to pivot positions, q_ lists the original column of each step.
 */
class LuFactors {
 public:
  LuKind kind() const { return kind_; }
  std::size_t size() const { return n_; }

  /// Permutation as "row at pivot position k".
  const std::vector<int>& row_permutation() const { return perm_; }
  const std::vector<int>& column_order() const { return q_; }

  /// Dense L (unit diagonal) and U, in pivot order. Mostly for tests.
  DenseMatrix lower() const;
  DenseMatrix upper() const;

  std::size_t factor_nnz() const { return kind_ == LuKind::Dense ? n_ * n_ : l_.nnz() + u_.nnz(); }

  friend LuFactors lu_factor(const DenseMatrix& a);
  friend LuFactors lu_factor(const CsMatrix& a, const SparseLuOptions& opts);
  friend std::vector<double> lu_solve(const LuFactors& f, std::span<const double> rhs);

 private:
  LuKind kind_ = LuKind::Dense;
  std::size_t n_ = 0;
  DenseMatrix lu_;
  CsMatrix l_, u_;
  std::vector<int> perm_;
  std::vector<int> pinv_;
  std::vector<int> q_;
};

inline LuFactors lu_factor(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("lu_factor: matrix must be square");
  const std::size_t n = a.rows();
  LuFactors f;
  f.kind_ = LuKind::Dense;
  f.n_ = n;
  f.lu_ = a;
  f.perm_.resize(n);
  std::iota(f.perm_.begin(), f.perm_.end(), 0);
  f.q_ = f.perm_;
  const double threshold = kSingularPivotRatio * a.max_abs();
  DenseMatrix& m = f.lu_;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(m(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best > threshold)) throw SingularMatrix("lu_factor: pivot " + std::to_string(k) + " below threshold");
    if (piv != k) {
      std::swap_ranges(m.row(k).begin(), m.row(k).end(), m.row(piv).begin());
      std::swap(f.perm_[k], f.perm_[piv]);
    }
    const double inv = 1.0 / m(k, k);
    auto rk = m.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      auto ri = m.row(i);
      const double l = ri[k] * inv;
      ri[k] = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
  f.pinv_.resize(n);
  for (std::size_t k = 0; k < n; ++k) f.pinv_[static_cast<std::size_t>(f.perm_[k])] = static_cast<int>(k);
  return f;
}

namespace detail {

// Nonzero pattern of x in L x = b (b = column j of A), in topological order
// xi[top..n). Non-recursive DFS over the columns of the partial L; rows not
// yet pivoted are leaves.
inline std::size_t sparse_reach(const CsMatrix& l, const std::vector<int>& pinv, const CsMatrix& a, int col,
                                std::vector<int>& xi, std::vector<int>& stack, std::vector<std::size_t>& pstack,
                                std::vector<int>& mark, int stamp) {
  const std::size_t n = a.n;
  std::size_t top = n;
  for (std::size_t p = a.col_ptr[static_cast<std::size_t>(col)]; p < a.col_ptr[static_cast<std::size_t>(col) + 1]; ++p) {
    const int start = a.row_idx[p];
    if (mark[static_cast<std::size_t>(start)] == stamp) continue;
    std::size_t head = 0;
    stack[0] = start;
    while (true) {
      const int i = stack[head];
      const int k = pinv[static_cast<std::size_t>(i)];
      if (mark[static_cast<std::size_t>(i)] != stamp) {
        mark[static_cast<std::size_t>(i)] = stamp;
        pstack[head] = k < 0 ? 0 : l.col_ptr[static_cast<std::size_t>(k)];
      }
      bool done = true;
      if (k >= 0) {
        const std::size_t end = l.col_ptr[static_cast<std::size_t>(k) + 1];
        for (std::size_t p2 = pstack[head]; p2 < end; ++p2) {
          const int r = l.row_idx[p2];
          if (mark[static_cast<std::size_t>(r)] == stamp) continue;
          pstack[head] = p2 + 1;
          stack[++head] = r;
          done = false;
          break;
        }
      }
      if (done) {
        xi[--top] = i;
        if (head == 0) break;
        --head;
      }
    }
  }
  return top;
}

}  // namespace detail

inline LuFactors lu_factor(const CsMatrix& a, const SparseLuOptions& opts = {}) {
  const std::size_t n = a.n;
  if (a.col_ptr.size() != n + 1) throw std::invalid_argument("lu_factor: malformed CsMatrix");
  LuFactors f;
  f.kind_ = LuKind::Sparse;
  f.n_ = n;
  if (!opts.column_order.empty()) {
    if (opts.column_order.size() != n) throw std::invalid_argument("lu_factor: column order has wrong length");
    f.q_ = opts.column_order;
  } else if (opts.use_rcm) {
    f.q_ = reverse_cuthill_mckee(a);
  } else {
    f.q_.resize(n);
    std::iota(f.q_.begin(), f.q_.end(), 0);
  }
  const double threshold = kSingularPivotRatio * a.max_abs();

  // L is built with original row indices, remapped to pivot positions at the end.
  CsMatrix& l = f.l_;
  CsMatrix& u = f.u_;
  l.n = u.n = n;
  l.col_ptr.assign(n + 1, 0);
  u.col_ptr.assign(n + 1, 0);
  const std::size_t guess = 4 * a.nnz() + n;
  l.row_idx.reserve(guess);
  l.values.reserve(guess);
  u.row_idx.reserve(guess);
  u.values.reserve(guess);

  f.pinv_.assign(n, -1);
  std::vector<double> x(n, 0.0);
  std::vector<int> xi(n), stack(n), mark(n, -1);
  std::vector<std::size_t> pstack(n);

  for (std::size_t k = 0; k < n; ++k) {
    const int col = f.q_[k];
    l.col_ptr[k] = l.row_idx.size();
    u.col_ptr[k] = u.row_idx.size();

    const std::size_t top = detail::sparse_reach(l, f.pinv_, a, col, xi, stack, pstack, mark, static_cast<int>(k));
    for (std::size_t p = top; p < n; ++p) x[static_cast<std::size_t>(xi[p])] = 0.0;
    for (std::size_t p = a.col_ptr[static_cast<std::size_t>(col)]; p < a.col_ptr[static_cast<std::size_t>(col) + 1]; ++p)
      x[static_cast<std::size_t>(a.row_idx[p])] = a.values[p];
    // x = L \ x over the reach, in topological order. L has unit diagonal
    // stored first in each column.
    for (std::size_t p = top; p < n; ++p) {
      const int i = xi[p];
      const int j = f.pinv_[static_cast<std::size_t>(i)];
      if (j < 0) continue;
      const double xj = x[static_cast<std::size_t>(i)];
      for (std::size_t q = l.col_ptr[static_cast<std::size_t>(j)] + 1; q < l.col_ptr[static_cast<std::size_t>(j) + 1]; ++q)
        x[static_cast<std::size_t>(l.row_idx[q])] -= l.values[q] * xj;
    }

    int ipiv = -1;
    double best = -1.0;
    for (std::size_t p = top; p < n; ++p) {
      const int i = xi[p];
      const int j = f.pinv_[static_cast<std::size_t>(i)];
      if (j < 0) {
        const double v = std::abs(x[static_cast<std::size_t>(i)]);
        if (v > best || (v == best && i < ipiv)) {
          best = v;
          ipiv = i;
        }
      } else {
        u.row_idx.push_back(j);
        u.values.push_back(x[static_cast<std::size_t>(i)]);
      }
    }
    if (ipiv < 0 || !(best > threshold))
      throw SingularMatrix("lu_factor: pivot " + std::to_string(k) + " below threshold");

    const double pivot = x[static_cast<std::size_t>(ipiv)];
    u.row_idx.push_back(static_cast<int>(k));
    u.values.push_back(pivot);
    f.pinv_[static_cast<std::size_t>(ipiv)] = static_cast<int>(k);
    l.row_idx.push_back(ipiv);
    l.values.push_back(1.0);
    for (std::size_t p = top; p < n; ++p) {
      const int i = xi[p];
      if (f.pinv_[static_cast<std::size_t>(i)] < 0 && x[static_cast<std::size_t>(i)] != 0.0) {
        l.row_idx.push_back(i);
        l.values.push_back(x[static_cast<std::size_t>(i)] / pivot);
      }
      x[static_cast<std::size_t>(i)] = 0.0;
    }
  }
  l.col_ptr[n] = l.row_idx.size();
  u.col_ptr[n] = u.row_idx.size();

  for (auto& r : l.row_idx) r = f.pinv_[static_cast<std::size_t>(r)];
  // Sort each column by row so CsMatrix's ordering invariant holds; the
  // unit diagonal (row k in column k) stays first, U's diagonal last.
  auto sort_columns = [](CsMatrix& m) {
    std::vector<std::pair<int, double>> buf;
    for (std::size_t j = 0; j < m.n; ++j) {
      buf.clear();
      for (std::size_t p = m.col_ptr[j]; p < m.col_ptr[j + 1]; ++p) buf.emplace_back(m.row_idx[p], m.values[p]);
      std::sort(buf.begin(), buf.end(), [](const auto& x1, const auto& x2) { return x1.first < x2.first; });
      for (std::size_t p = m.col_ptr[j], t = 0; p < m.col_ptr[j + 1]; ++p, ++t) {
        m.row_idx[p] = buf[t].first;
        m.values[p] = buf[t].second;
      }
    }
  };
  sort_columns(l);
  sort_columns(u);

  f.perm_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) f.perm_[static_cast<std::size_t>(f.pinv_[i])] = static_cast<int>(i);
  return f;
}

/// Solve A y = rhs with a previously computed factorization. F is not modified.
inline std::vector<double> lu_solve(const LuFactors& f, std::span<const double> rhs) {
  const std::size_t n = f.n_;
  if (rhs.size() != n) throw std::invalid_argument("lu_solve: rhs has wrong length");
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) y[k] = rhs[static_cast<std::size_t>(f.perm_[k])];
  if (f.kind_ == LuKind::Dense) {
    const DenseMatrix& m = f.lu_;
    for (std::size_t i = 0; i < n; ++i) {
      auto r = m.row(i);
      double acc = y[i];
      for (std::size_t j = 0; j < i; ++j) acc -= r[j] * y[j];
      y[i] = acc;
    }
    for (std::size_t i = n; i-- > 0;) {
      auto r = m.row(i);
      double acc = y[i];
      for (std::size_t j = i + 1; j < n; ++j) acc -= r[j] * y[j];
      y[i] = acc / r[i];
    }
    return y;
  }
  const CsMatrix& l = f.l_;
  const CsMatrix& u = f.u_;
  for (std::size_t j = 0; j < n; ++j) {
    const double yj = y[j];
    for (std::size_t p = l.col_ptr[j] + 1; p < l.col_ptr[j + 1]; ++p) y[static_cast<std::size_t>(l.row_idx[p])] -= l.values[p] * yj;
  }
  for (std::size_t j = n; j-- > 0;) {
    const std::size_t diag = u.col_ptr[j + 1] - 1;
    y[j] /= u.values[diag];
    const double yj = y[j];
    for (std::size_t p = u.col_ptr[j]; p < diag; ++p) y[static_cast<std::size_t>(u.row_idx[p])] -= u.values[p] * yj;
  }
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[static_cast<std::size_t>(f.q_[k])] = y[k];
  return out;
}

inline DenseMatrix LuFactors::lower() const {
  DenseMatrix m(n_, n_);
  if (kind_ == LuKind::Dense) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < i; ++j) m(i, j) = lu_(i, j);
      m(i, i) = 1.0;
    }
    return m;
  }
  return l_.to_dense();
}

inline DenseMatrix LuFactors::upper() const {
  if (kind_ == LuKind::Dense) {
    DenseMatrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j) m(i, j) = lu_(i, j);
    return m;
  }
  return u_.to_dense();
}

}  // namespace hosolve
