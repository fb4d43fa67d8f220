#pragma once

/**
 * @file sparsity.hpp
 * @brief Jacobian sparsity by index-set tracing, greedy column coloring and
 *        compressed Jacobian evaluation.
 *
 * Tracing follows the branches taken at the point it is run from. Columns
 * in one color class share no row, so a single first-order evaluation along
 * the sum of their unit vectors recovers all of them.
 */

#include <algorithm>
#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "hosolve/index_set.hpp"
#include "hosolve/linalg.hpp"
#include "hosolve/problem.hpp"
#include "hosolve/taylor.hpp"

namespace hosolve {

struct SparsityPattern {
  std::size_t n = 0;
  std::vector<std::vector<int>> rows;  // sorted column indices per row

  std::size_t nnz() const {
    std::size_t s = 0;
    for (const auto& r : rows) s += r.size();
    return s;
  }

  std::size_t max_row_degree() const {
    std::size_t m = 0;
    for (const auto& r : rows) m = std::max(m, r.size());
    return m;
  }

  bool contains(int i, int j) const {
    const auto& r = rows[static_cast<std::size_t>(i)];
    return std::binary_search(r.begin(), r.end(), j);
  }

  /// Row indices per column.
  std::vector<std::vector<int>> columns() const {
    std::vector<std::vector<int>> cols(n);
    for (std::size_t i = 0; i < n; ++i)
      for (int j : rows[i]) cols[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));
    return cols;
  }
};

struct Coloring {
  std::vector<int> colors;
  int num_colors = 0;
};

/// Trace the residual at the problem's initial guess.
inline SparsityPattern detect_pattern(const NonlinearProblem& problem, std::span<const double> at) {
  const std::size_t n = problem.size();
  if (at.size() != n) throw std::invalid_argument("detect_pattern: point has wrong length");
  std::vector<IndexSet> xs;
  xs.reserve(n);
  for (std::size_t j = 0; j < n; ++j) xs.push_back(IndexSet::variable(at[j], static_cast<int>(j)));
  std::vector<IndexSet> out(n);
  problem.evaluate<IndexSet>(xs, out);
  SparsityPattern p;
  p.n = n;
  p.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.rows[i] = out[i].indices();
  return p;
}

inline SparsityPattern detect_pattern(const NonlinearProblem& problem) {
  return detect_pattern(problem, problem.initial_guess());
}

/// Greedy coloring in natural column order: each column takes the smallest
/// color not used by a column it shares a row with.
inline Coloring color_columns(const SparsityPattern& p) {
  const auto cols = p.columns();
  Coloring c;
  c.colors.assign(p.n, -1);
  std::vector<std::size_t> forbidden(p.n + 1, static_cast<std::size_t>(-1));
  for (std::size_t j = 0; j < p.n; ++j) {
    for (int i : cols[j])
      for (int k : p.rows[static_cast<std::size_t>(i)]) {
        const int ck = c.colors[static_cast<std::size_t>(k)];
        if (ck >= 0) forbidden[static_cast<std::size_t>(ck)] = j;
      }
    int color = 0;
    while (forbidden[static_cast<std::size_t>(color)] == j) ++color;
    c.colors[j] = color;
    c.num_colors = std::max(c.num_colors, color + 1);
  }
  return c;
}

/// True when no two columns of one color share a row.
inline bool is_valid_coloring(const SparsityPattern& p, const Coloring& c) {
  if (c.colors.size() != p.n) return false;
  int max_color = -1;
  for (int col : c.colors) max_color = std::max(max_color, col);
  if (max_color + 1 != c.num_colors) return false;
  for (const auto& row : p.rows)
    for (std::size_t a = 0; a < row.size(); ++a)
      for (std::size_t b = a + 1; b < row.size(); ++b)
        if (c.colors[static_cast<std::size_t>(row[a])] == c.colors[static_cast<std::size_t>(row[b])]) return false;
  return true;
}

/// Empty CSC skeleton with the pattern's structure.
inline CsMatrix pattern_matrix(const SparsityPattern& p) {
  CsMatrix m;
  m.n = p.n;
  const auto cols = p.columns();
  m.col_ptr.assign(p.n + 1, 0);
  for (std::size_t j = 0; j < p.n; ++j) {
    m.row_idx.insert(m.row_idx.end(), cols[j].begin(), cols[j].end());
    m.col_ptr[j + 1] = m.row_idx.size();
  }
  m.values.assign(m.row_idx.size(), 0.0);
  return m;
}

/**
 * Jacobian restricted to the pattern using num_colors first-order sweeps.
 * Each sweep seeds the sum of the unit vectors of one color class.
 */
inline CsMatrix compressed_jacobian(const NonlinearProblem& problem, std::span<const double> x,
                                    const SparsityPattern& p, const Coloring& c) {
  const std::size_t n = problem.size();
  if (x.size() != n || p.n != n || c.colors.size() != n)
    throw std::invalid_argument("compressed_jacobian: inconsistent dimensions");
  CsMatrix jac = pattern_matrix(p);
  std::vector<Taylor> xs(n), out(n);
  for (int color = 0; color < c.num_colors; ++color) {
    for (std::size_t j = 0; j < n; ++j) xs[j] = seed(x[j], c.colors[j] == color ? 1.0 : 0.0, 1);
    problem.evaluate<Taylor>(xs, out);
    for (std::size_t j = 0; j < n; ++j) {
      if (c.colors[j] != color) continue;
      for (std::size_t q = jac.col_ptr[j]; q < jac.col_ptr[j + 1]; ++q)
        jac.values[q] = out[static_cast<std::size_t>(jac.row_idx[q])][1];
    }
  }
  return jac;
}

/// Coordinate list, one "row col" pair per line.
inline void write_pattern(std::ostream& os, const SparsityPattern& p) {
  for (std::size_t i = 0; i < p.n; ++i)
    for (int j : p.rows[i]) os << i << ' ' << j << '\n';
}

}  // namespace hosolve
