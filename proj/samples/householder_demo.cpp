/**
 * @file householder_demo.cpp
 * @brief Solve x^2 = 2 with Householder methods of order 1..5 and print the
 *        error after each iteration.
 */

#include <cmath>
#include <cstdio>

#include "hosolve/householder.hpp"

int main() {
  const auto f = hosolve::UnivariateFunction::from_generic([](auto x) { return x * x - 2.0; });
  const double root = std::sqrt(2.0);
  for (int p = 1; p <= 5; ++p) {
    hosolve::ScalarSolveConfig cfg;
    cfg.order = p;
    cfg.tol = 1e-15;
    const auto r = hosolve::householder_solve(f, 1.0, cfg);
    std::printf("p=%d  %-9s iterations=%d  errors:", p, std::string(hosolve::to_string(r.status)).c_str(),
                r.iterations);
    for (double x : r.iterate_history) std::printf(" %.1e", std::abs(x - root));
    std::printf("\n");
  }
}
