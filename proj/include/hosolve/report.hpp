#pragma once

/**
 * @file report.hpp
 * @brief Result record shared by the scalar and multivariate solvers.
 */

#include <cstdint>
#include <string_view>
#include <vector>

namespace hosolve {

enum class SolveStatus { Converged, MaxIter, Degenerate, Diverged };

constexpr std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::Degenerate: return "Degenerate";
    case SolveStatus::Diverged: return "Diverged";
  }
  return "?";
}

/// Work performed by a solve. Every residual evaluation counts as one
/// f_eval regardless of scalar mode.
struct SolveCounters {
  std::int64_t f_evals = 0;
  std::int64_t factorizations = 0;
  std::int64_t back_solves = 0;

  SolveCounters& operator+=(const SolveCounters& o) {
    f_evals += o.f_evals;
    factorizations += o.factorizations;
    back_solves += o.back_solves;
    return *this;
  }
};

/// @tparam X real for univariate solves, std::vector<double> otherwise.
/// residual_history and iterate_history hold iterations + 1 entries.
template <class X>
struct SolveReport {
  X root{};
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  std::vector<double> residual_history;
  std::vector<X> iterate_history;
  SolveCounters counters;

  bool converged() const { return status == SolveStatus::Converged; }
  double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
};

}  // namespace hosolve
