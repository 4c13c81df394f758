#pragma once

#include "steerftrl/common.hpp"

namespace steerftrl {

// Equality-form linear program
//
//   minimize    c' x
//   subject to  A x = b,   0 <= x <= upper
//
// where entries of `upper` may be +infinity. Callers encode general
// bounds by shifting and free variables by splitting into differences
// of two nonnegative columns.
struct LinearProgram {
  Matrix A;
  Vector b;
  Vector c;
  Vector upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
};

// Two-phase bounded-variable primal simplex with Bland's rule, so the
// solve terminates on degenerate vertices. Intended for the small,
// dense programs that arise here (tens of rows and columns).
LpResult solve_lp(const LinearProgram& lp);

}  // namespace steerftrl
