#pragma once

/**
 * @file hosolve.hpp
 * @brief Umbrella header: Taylor-mode AD, Householder/Halley solvers,
 *        sparsity tooling, LU factorizations, stiff integrators and the
 *        benchmark problem library.
 */

#include "hosolve/errors.hpp"
#include "hosolve/halley.hpp"
#include "hosolve/householder.hpp"
#include "hosolve/index_set.hpp"
#include "hosolve/linalg.hpp"
#include "hosolve/ode.hpp"
#include "hosolve/problem.hpp"
#include "hosolve/problems.hpp"
#include "hosolve/report.hpp"
#include "hosolve/scalar.hpp"
#include "hosolve/sparsity.hpp"
#include "hosolve/taylor.hpp"
