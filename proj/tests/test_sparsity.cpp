#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <vector>

#include "hosolve/problems.hpp"
#include "hosolve/sparsity.hpp"

using namespace hosolve;

namespace {

SparsityPattern make_pattern(std::vector<std::vector<int>> rows) {
  SparsityPattern p;
  p.n = rows.size();
  p.rows = std::move(rows);
  return p;
}

NonlinearProblem periodic_laplacian(std::size_t n) {
  return NonlinearProblem(std::vector<double>(n, 1.0), [n](auto x, auto out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[(i + n - 1) % n] - 2.0 * x[i] + x[(i + 1) % n] + 0.1 * x[i] * x[i];
  });
}

NonlinearProblem dirichlet_laplacian(std::size_t n) {
  return NonlinearProblem(std::vector<double>(n, 0.5), [n](auto x, auto out) {
    for (std::size_t i = 0; i < n; ++i) {
      auto v = -2.0 * x[i] + x[i] * x[i] * x[i];
      if (i > 0) v = v + x[i - 1];
      if (i + 1 < n) v = v + x[i + 1];
      out[i] = v;
    }
  });
}

// Smallest k admitting a structurally orthogonal partition, by exhaustive search.
int brute_force_min_colors(const SparsityPattern& p) {
  const std::size_t n = p.n;
  for (int k = 1; k <= static_cast<int>(n); ++k) {
    Coloring c;
    c.colors.assign(n, 0);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(k);
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t rest = code;
      int mx = 0;
      for (std::size_t j = 0; j < n; ++j) {
        c.colors[j] = static_cast<int>(rest % static_cast<std::size_t>(k));
        mx = std::max(mx, c.colors[j]);
        rest /= static_cast<std::size_t>(k);
      }
      c.num_colors = mx + 1;
      if (is_valid_coloring(p, c)) return k;
    }
  }
  return static_cast<int>(n);
}

// Columns sharing at least one row with column j, maximized over j.
std::size_t max_conflict_degree(const SparsityPattern& p) {
  const auto cols = p.columns();
  std::size_t best = 0;
  for (std::size_t j = 0; j < p.n; ++j) {
    std::vector<int> nb;
    for (int i : cols[j]) nb.insert(nb.end(), p.rows[static_cast<std::size_t>(i)].begin(), p.rows[static_cast<std::size_t>(i)].end());
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    best = std::max(best, nb.size() - 1);
  }
  return best;
}

void expect_matches_dense(const NonlinearProblem& prob, std::span<const double> x, double tol) {
  const auto pattern = detect_pattern(prob);
  const auto coloring = color_columns(pattern);
  ASSERT_TRUE(is_valid_coloring(pattern, coloring));
  const CsMatrix js = compressed_jacobian(prob, x, pattern, coloring);
  const DenseMatrix jd = dense_jacobian(prob, x);
  for (std::size_t i = 0; i < prob.size(); ++i)
    for (std::size_t j = 0; j < prob.size(); ++j) {
      const int ii = static_cast<int>(i), jj = static_cast<int>(j);
      const double masked = pattern.contains(ii, jj) ? jd(i, j) : 0.0;
      EXPECT_NEAR(js.at(ii, jj), masked, tol) << i << "," << j;
    }
}

}  // namespace

TEST(DetectPattern, ReadsDependencies) {
  NonlinearProblem p({1.0, 1.0}, [](auto x, auto out) {
    out[0] = x[0] + x[1];
    out[1] = x[1] * x[1];
  });
  const auto pat = detect_pattern(p);
  EXPECT_EQ(pat.rows[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(pat.rows[1], (std::vector<int>{1}));
}

TEST(DetectPattern, PeriodicStencil) {
  const auto pat = detect_pattern(periodic_laplacian(5));
  for (int i = 0; i < 5; ++i) {
    std::vector<int> want{(i + 4) % 5, i, (i + 1) % 5};
    std::sort(want.begin(), want.end());
    EXPECT_EQ(pat.rows[static_cast<std::size_t>(i)], want);
  }
}

TEST(DetectPattern, BrusselatorSixPerRow) {
  BrusselatorConfig cfg;
  cfg.K = 4;
  BrusselatorOperator op(cfg);
  const auto pat = detect_pattern(brusselator_steady(cfg));
  const std::size_t k = 4;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      for (bool is_u : {true, false}) {
        const std::size_t row = is_u ? op.u_index(i, j) : op.v_index(i, j);
        auto idx = [&](std::size_t a, std::size_t b) {
          return static_cast<int>(is_u ? op.u_index(a, b) : op.v_index(a, b));
        };
        std::vector<int> want{idx(i, j),           idx((i + 1) % k, j), idx((i + k - 1) % k, j),
                              idx(i, (j + 1) % k), idx(i, (j + k - 1) % k),
                              static_cast<int>(is_u ? op.v_index(i, j) : op.u_index(i, j))};
        std::sort(want.begin(), want.end());
        EXPECT_EQ(pat.rows[row], want) << "row " << row;
      }
    }
}

TEST(ColorColumns, Examples) {
  std::vector<std::vector<int>> diag(10), dense(4, std::vector<int>{0, 1, 2, 3}), tri(6);
  for (int i = 0; i < 10; ++i) diag[static_cast<std::size_t>(i)] = {i};
  for (int i = 0; i < 6; ++i) {
    auto& r = tri[static_cast<std::size_t>(i)];
    if (i > 0) r.push_back(i - 1);
    r.push_back(i);
    if (i < 5) r.push_back(i + 1);
  }
  EXPECT_EQ(color_columns(make_pattern(diag)).num_colors, 1);
  EXPECT_EQ(color_columns(make_pattern(dense)).num_colors, 4);
  const auto tri_p = make_pattern(tri);
  const auto c = color_columns(tri_p);
  EXPECT_TRUE(is_valid_coloring(tri_p, c));
  EXPECT_EQ(c.num_colors, 3);
  EXPECT_EQ(brute_force_min_colors(tri_p), 3);
}

TEST(ColorColumns, ValidityAndGreedyBound) {
  std::vector<NonlinearProblem> probs{periodic_laplacian(7), dirichlet_laplacian(9), chandrasekhar({8, 0.9})};
  for (int k : {3, 4, 8, 16}) {
    BrusselatorConfig cfg;
    cfg.K = k;
    probs.push_back(brusselator_steady(cfg));
  }
  for (const auto& p : probs) {
    const auto pat = detect_pattern(p);
    const auto c = color_columns(pat);
    EXPECT_TRUE(is_valid_coloring(pat, c));
    // Greedy never needs more than one color beyond the largest number of
    // columns a single column conflicts with.
    EXPECT_LE(static_cast<std::size_t>(c.num_colors), 1 + max_conflict_degree(pat));
    // Every row needs distinct colors.
    EXPECT_GE(static_cast<std::size_t>(c.num_colors), pat.max_row_degree());
  }
  // The row degree alone does not bound a distance-2 coloring: the periodic
  // 5-point Brusselator stencil has 6 entries per row yet greedy needs 11.
  BrusselatorConfig cfg;
  cfg.K = 8;
  const auto bpat = detect_pattern(brusselator_steady(cfg));
  EXPECT_EQ(bpat.max_row_degree(), 6u);
  EXPECT_EQ(color_columns(bpat).num_colors, 11);
  // A deliberately broken coloring is rejected by the scan.
  const auto pat = detect_pattern(periodic_laplacian(6));
  Coloring bad;
  bad.colors.assign(6, 0);
  bad.num_colors = 1;
  EXPECT_FALSE(is_valid_coloring(pat, bad));
}

TEST(CompressedJacobian, Diagonal) {
  NonlinearProblem p({1.0, 2.0, 3.0}, [](auto x, auto out) {
    for (std::size_t i = 0; i < 3; ++i) out[i] = x[i] * x[i];
  });
  const auto pat = detect_pattern(p);
  const auto c = color_columns(pat);
  EXPECT_EQ(c.num_colors, 1);
  const std::vector<double> x{1.0, 2.0, 3.0};
  const CsMatrix j = compressed_jacobian(p, x, pat, c);
  EXPECT_EQ(j.nnz(), 3u);
  EXPECT_EQ(j.at(0, 0), 2.0);
  EXPECT_EQ(j.at(1, 1), 4.0);
  EXPECT_EQ(j.at(2, 2), 6.0);
}

TEST(CompressedJacobian, TridiagonalUsesThreeSweeps) {
  const auto p = dirichlet_laplacian(8);
  const auto pat = detect_pattern(p);
  EXPECT_EQ(color_columns(pat).num_colors, 3);
  expect_matches_dense(p, p.initial_guess(), 1e-12);
}

TEST(CompressedJacobian, BrusselatorK8) {
  BrusselatorConfig cfg;
  cfg.K = 8;
  const auto p = brusselator_steady(cfg);
  EXPECT_LE(color_columns(detect_pattern(p)).num_colors, 12);
  expect_matches_dense(p, p.initial_guess(), 1e-10);
}

TEST(CompressedJacobian, ExactOnAllProblemsUpTo256) {
  std::vector<NonlinearProblem> probs{chandrasekhar({16, 0.9}), chandrasekhar({64, 0.5})};
  for (int k : {3, 4, 8, 11}) {
    BrusselatorConfig cfg;
    cfg.K = k;
    probs.push_back(brusselator_steady(cfg));
  }
  for (const auto& p : probs) {
    ASSERT_LE(p.size(), 256u);
    expect_matches_dense(p, p.initial_guess(), 1e-12);
  }
}

TEST(DetectPattern, SupersetOfNumericalNonzeros) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  std::vector<NonlinearProblem> probs{chandrasekhar({6, 0.9}), periodic_laplacian(9), dirichlet_laplacian(7)};
  BrusselatorConfig cfg;
  cfg.K = 4;
  probs.push_back(brusselator_steady(cfg));
  for (const auto& p : probs) {
    const auto pat = detect_pattern(p);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> x(p.size());
      for (auto& v : x) v = u(rng);
      const DenseMatrix j = dense_jacobian(p, x);
      for (std::size_t r = 0; r < p.size(); ++r)
        for (std::size_t c = 0; c < p.size(); ++c)
          if (std::abs(j(r, c)) > 1e-10) {
            EXPECT_TRUE(pat.contains(static_cast<int>(r), static_cast<int>(c)));
          }
    }
  }
}

TEST(WritePattern, CoordinateList) {
  const auto pat = make_pattern({{0, 1}, {1}});
  std::ostringstream os;
  write_pattern(os, pat);
  EXPECT_EQ(os.str(), "0 0\n0 1\n1 1\n");
}
