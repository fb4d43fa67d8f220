/**
 * @file halley_demo.cpp
 * @brief Newton vs Halley on the Chandrasekhar H-equation and the sparse
 *        Brusselator steady state, with the work counters of each solve.
 */

#include <cstdio>
#include <string>

#include "hosolve/halley.hpp"
#include "hosolve/problems.hpp"

namespace {

void report(const char* label, const hosolve::NonlinearProblem& prob, hosolve::MvSolveConfig cfg) {
  for (auto m : {hosolve::MvMethod::Newton, hosolve::MvMethod::Halley}) {
    cfg.method = m;
    const auto r = hosolve::solve(prob, cfg);
    std::printf("%-22s %-7s %-9s iter=%d  factorizations=%lld  back_solves=%lld  |F|=%.2e\n", label,
                std::string(hosolve::to_string(m)).c_str(), std::string(hosolve::to_string(r.status)).c_str(),
                r.iterations, static_cast<long long>(r.counters.factorizations),
                static_cast<long long>(r.counters.back_solves), r.final_residual());
  }
}

}  // namespace

int main() {
  hosolve::MvSolveConfig cfg;
  cfg.tol = 1e-10;
  report("chandrasekhar n=64", hosolve::chandrasekhar({64, 0.9}), cfg);

  hosolve::BrusselatorConfig bc;
  bc.K = 16;
  cfg.jacobian = hosolve::JacobianStrategy::Sparse;
  report("brusselator K=16", hosolve::brusselator_steady(bc), cfg);
}
