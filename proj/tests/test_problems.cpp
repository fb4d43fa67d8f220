#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hosolve/halley.hpp"
#include "hosolve/problems.hpp"
#include "hosolve/sparsity.hpp"

using namespace hosolve;

namespace {

double bisect(double (*f)(double), double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(mid) < 0.0) == (f(lo) < 0.0) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MvSolveConfig mv(MvMethod m, JacobianStrategy j, double tol = 1e-8) {
  MvSolveConfig c;
  c.method = m;
  c.jacobian = j;
  c.tol = tol;
  return c;
}

std::vector<double> homogeneous(const BrusselatorConfig& cfg) {
  const std::size_t nn = static_cast<std::size_t>(cfg.K * cfg.K);
  std::vector<double> z(2 * nn, cfg.B);
  for (std::size_t i = nn; i < 2 * nn; ++i) z[i] = cfg.A / cfg.B;
  return z;
}

}  // namespace

TEST(UnivariateSuite, SixCasesWithReferenceRoots) {
  const auto suite = univariate_suite();
  ASSERT_EQ(suite.size(), 6u);
  const std::vector<double> x0{1.0, 10.0, 0.0, 3.3, 0.5, 1.0};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(suite[i].id, static_cast<int>(i) + 1);
    EXPECT_EQ(suite[i].x0, x0[i]);
    EXPECT_LE(std::abs(suite[i].f(suite[i].reference_root)), 1e-12) << "f" << i + 1;
  }
  EXPECT_DOUBLE_EQ(suite[0].reference_root, 1.4142135623730951);
  EXPECT_DOUBLE_EQ(suite[1].reference_root, 9.869604401089358);
  EXPECT_EQ(suite[3].reference_root, 4.0);
  const double f4 = bisect([](double x) { return x * x - std::pow(2.0, x); }, 3.5, 4.5);
  const double f5 = bisect([](double x) { return x + std::sin(x) - 1.0; }, 0.0, 1.0);
  EXPECT_NEAR(suite[3].reference_root, f4, 1e-13);
  EXPECT_NEAR(suite[4].reference_root, f5, 1e-15);
  const double omega = bisect([](double x) { return x - std::exp(-x); }, 0.0, 1.0);
  EXPECT_NEAR(suite[2].reference_root, omega, 1e-15);
  EXPECT_NEAR(suite[5].reference_root, omega, 1e-15);
}

TEST(UnivariateSuite, Case4ReachesTheRootAtFour) {
  const auto c = univariate_suite()[3];
  for (int p = 1; p <= 5; ++p) {
    ScalarSolveConfig cfg;
    cfg.order = p;
    const auto r = householder_solve(c.f, c.x0, cfg);
    ASSERT_TRUE(r.converged());
    EXPECT_NEAR(r.root, 4.0, 1e-12);
  }
}

TEST(Chandrasekhar, NoScatteringLimit) {
  const auto p = chandrasekhar({8, 1e-17});
  for (double v : p(std::vector<double>(8, 1.0))) EXPECT_EQ(v, 0.0);
}

TEST(Chandrasekhar, TwoNodeFixedPoint) {
  const ChandrasekharConfig cfg{2, 0.9};
  // Damped fixed-point iteration H <- (H + G(H)) / 2 with the map written out.
  const double mu[2] = {0.25, 0.75};
  std::vector<double> h{1.0, 1.0};
  for (int it = 0; it < 10000; ++it) {
    std::vector<double> g(2);
    for (int i = 0; i < 2; ++i) {
      double s = 0.0;
      for (int j = 0; j < 2; ++j) s += mu[i] * h[static_cast<std::size_t>(j)] / (mu[i] + mu[j]);
      g[static_cast<std::size_t>(i)] = 1.0 / (1.0 - cfg.c / 4.0 * s);
    }
    const double change = std::max(std::abs(g[0] - h[0]), std::abs(g[1] - h[1]));
    h[0] = 0.5 * (h[0] + g[0]);
    h[1] = 0.5 * (h[1] + g[1]);
    if (change < 1e-14) break;
  }
  const auto r = solve(chandrasekhar(cfg), mv(MvMethod::Halley, JacobianStrategy::Dense, 1e-13));
  ASSERT_TRUE(r.converged());
  EXPECT_NEAR(r.root[0], h[0], 1e-12);
  EXPECT_NEAR(r.root[1], h[1], 1e-12);
  EXPECT_GE(r.root[0], 1.0);
  EXPECT_GT(r.root[1], r.root[0]);
}

TEST(Chandrasekhar, DensePattern) {
  const auto pat = detect_pattern(chandrasekhar({7, 0.9}));
  EXPECT_EQ(pat.nnz(), 49u);
}

TEST(Chandrasekhar, SolutionIsMonotoneAndAtLeastOne) {
  for (int n : {4, 8, 16}) {
    const auto r = solve(chandrasekhar({n, 0.9}), mv(MvMethod::Halley, JacobianStrategy::Dense));
    ASSERT_TRUE(r.converged());
    EXPECT_GE(r.root[0], 1.0);
    for (std::size_t i = 1; i < r.root.size(); ++i) EXPECT_GE(r.root[i], r.root[i - 1]);
  }
}

TEST(Brusselator, HomogeneousStateIsExactRoot) {
  for (int k : {3, 4, 8}) {
    BrusselatorConfig cfg;
    cfg.K = k;
    cfg.source_active = false;
    for (double v : brusselator_steady(cfg)(homogeneous(cfg))) EXPECT_EQ(v, 0.0);
    const auto ode = brusselator_rhs(cfg);
    const auto z = homogeneous(cfg);
    const auto du = ode(0.5, z);  // before the source switches on
    for (double v : du) EXPECT_EQ(v, 0.0);
  }
}

TEST(Brusselator, InitialFieldAndPacking) {
  BrusselatorConfig cfg;
  cfg.K = 4;
  BrusselatorOperator op(cfg);
  EXPECT_EQ(op.size(), 32u);
  EXPECT_EQ(op.u_index(1, 2), 6u);
  EXPECT_EQ(op.v_index(1, 2), 22u);
  const auto z = brusselator_steady(cfg).initial_guess();
  // u depends on y only, v on x only.
  EXPECT_DOUBLE_EQ(z[op.u_index(3, 1)], 22.0 * std::pow(0.25 * 0.75, 1.5));
  EXPECT_DOUBLE_EQ(z[op.v_index(1, 3)], 27.0 * std::pow(0.25 * 0.75, 1.5));
  EXPECT_EQ(z[op.u_index(2, 0)], 0.0);
}

TEST(Brusselator, SourceDisk) {
  EXPECT_EQ(brusselator_source(0.3, 0.6), 5.0);
  EXPECT_EQ(brusselator_source(0.9, 0.1), 0.0);
  EXPECT_EQ(brusselator_source(0.35, 0.65), 5.0);
  EXPECT_EQ(brusselator_source(0.45, 0.6), 0.0);
}

TEST(Brusselator, RhsByHandForK3) {
  BrusselatorConfig cfg;
  cfg.K = 3;
  const auto ode = brusselator_rhs(cfg);
  BrusselatorOperator op(cfg);
  const auto dy = ode(0.0, ode.y0());
  // Node (i, j) = (1, 1): grid y = 1/3, so u = 22 (2/9)^1.5, v = 27 (2/9)^1.5.
  // u is 0 at j = 0 and equal to u11 at j = 2, so the stencil sum is -u11;
  // likewise for v along x. The diffusion factor is alpha K^2 = 90.
  const double s = std::pow(2.0 / 9.0, 1.5);
  const double u = 22.0 * s, v = 27.0 * s;
  const double du = 1.0 + u * u * v - 4.4 * u + 90.0 * (-u);
  const double dv = 3.4 * u - u * u * v + 90.0 * (-v);
  EXPECT_NEAR(dy[op.u_index(1, 1)], du, 1e-12 * std::abs(du));
  EXPECT_NEAR(dy[op.v_index(1, 1)], dv, 1e-12 * std::abs(dv));
  // Of the 3 x 3 nodes only (1/3, 2/3) lies in the source disk.
  const auto dy2 = ode(2.0, ode.y0());
  for (std::size_t i = 0; i < dy.size(); ++i) {
    if (i == op.u_index(1, 2))
      EXPECT_NEAR(dy2[i] - dy[i], 5.0, 1e-12);
    else
      EXPECT_EQ(dy2[i], dy[i]) << i;
  }
}

TEST(Brusselator, SourceSwitchesOnAt1_1) {
  BrusselatorConfig cfg;
  cfg.K = 10;  // node (3, 6) sits at the disk center
  BrusselatorOperator op(cfg);
  const auto ode = brusselator_rhs(cfg);
  const auto before = ode(1.0, ode.y0()), after = ode(2.0, ode.y0());
  const std::size_t c = op.u_index(3, 6);
  EXPECT_NEAR(after[c] - before[c], 5.0, 1e-12);
  EXPECT_EQ(after[op.v_index(3, 6)], before[op.v_index(3, 6)]);
}

TEST(Brusselator, TranslationEquivariance) {
  BrusselatorConfig cfg;
  cfg.K = 5;
  cfg.source_active = false;
  BrusselatorOperator op(cfg);
  const auto p = brusselator_steady(cfg);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  std::vector<double> z(p.size());
  for (auto& v : z) v = u(rng);
  const std::size_t k = 5;
  for (std::size_t si : {1u, 3u})
    for (std::size_t sj : {0u, 2u}) {
      std::vector<double> shifted(z.size());
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
          const std::size_t ti = (i + si) % k, tj = (j + sj) % k;
          shifted[op.u_index(ti, tj)] = z[op.u_index(i, j)];
          shifted[op.v_index(ti, tj)] = z[op.v_index(i, j)];
        }
      const auto r = p(z), rs = p(shifted);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
          const std::size_t ti = (i + si) % k, tj = (j + sj) % k;
          EXPECT_EQ(rs[op.u_index(ti, tj)], r[op.u_index(i, j)]);
          EXPECT_EQ(rs[op.v_index(ti, tj)], r[op.v_index(i, j)]);
        }
    }
}

TEST(Brusselator, RhsVanishesAtSteadySolution) {
  BrusselatorConfig cfg;
  cfg.K = 8;
  const double tol = 1e-8;
  const auto r = solve(brusselator_steady(cfg), mv(MvMethod::Halley, JacobianStrategy::Sparse, tol));
  ASSERT_TRUE(r.converged());
  const auto ode = brusselator_rhs(cfg);
  EXPECT_LE(max_abs(ode(5.0, r.root)), 10.0 * tol);
}

TEST(Problems, PrimalAgreesAcrossModes) {
  std::vector<NonlinearProblem> probs{chandrasekhar({9, 0.9})};
  BrusselatorConfig cfg;
  cfg.K = 4;
  probs.push_back(brusselator_steady(cfg));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  for (const auto& p : probs) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> x(p.size()), v(p.size());
      for (auto& e : x) e = u(rng);
      for (auto& e : v) e = u(rng) - 1.0;
      const auto plain = p(x);
      for (int order = 1; order <= 3; ++order) {
        const auto t = push_forward(p, x, v, order);
        for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(t[i][0], plain[i]);
      }
      std::vector<IndexSet> xs, out(p.size());
      for (std::size_t j = 0; j < p.size(); ++j) xs.push_back(IndexSet::variable(x[j], static_cast<int>(j)));
      p.evaluate<IndexSet>(xs, out);
      for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(out[i].value(), plain[i]);
    }
  }
}

TEST(Problems, ConfigValidation) {
  EXPECT_THROW(chandrasekhar({0, 0.9}), std::invalid_argument);
  EXPECT_THROW(chandrasekhar({4, 1.0}), std::invalid_argument);
  BrusselatorConfig cfg;
  cfg.K = 2;
  EXPECT_THROW(brusselator_steady(cfg), std::invalid_argument);
}
