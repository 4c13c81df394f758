#include "steerftrl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace steerftrl {
namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState { Basic, AtLower, AtUpper };

struct Tableau {
  Matrix cols;              // structural columns followed by artificials
  Vector b;
  Vector upper;             // per-column upper bound (lower bound is 0)
  std::vector<VarState> state;
  std::vector<int> basis;   // basis[row] = column index
  int num_structural = 0;

  int num_cols() const { return static_cast<int>(cols.cols()); }
  int num_rows() const { return static_cast<int>(cols.rows()); }

  double nonbasic_value(int j) const {
    return state[j] == VarState::AtUpper ? upper[j] : 0.0;
  }

  Vector values() const {
    int n = num_cols();
    Vector x(n);
    for (int j = 0; j < n; ++j) x[j] = state[j] == VarState::Basic ? 0.0 : nonbasic_value(j);
    Vector rhs = b;
    for (int j = 0; j < n; ++j)
      if (state[j] != VarState::Basic && x[j] != 0.0) rhs -= cols.col(j) * x[j];
    Matrix B(num_rows(), num_rows());
    for (int r = 0; r < num_rows(); ++r) B.col(r) = cols.col(basis[r]);
    Vector xb = B.fullPivLu().solve(rhs);
    for (int r = 0; r < num_rows(); ++r) x[basis[r]] = xb[r];
    return x;
  }
};

// Runs simplex iterations for the objective `c` until optimality or
// unboundedness. Entering and leaving choices follow Bland's rule.
LpStatus iterate(Tableau& t, const Vector& c) {
  const int m = t.num_rows();
  const int n = t.num_cols();
  for (long iter = 0; iter < 20000; ++iter) {
    Matrix B(m, m);
    for (int r = 0; r < m; ++r) B.col(r) = t.cols.col(t.basis[r]);
    Eigen::FullPivLU<Matrix> lu(B);

    Vector rhs = t.b;
    for (int j = 0; j < n; ++j) {
      if (t.state[j] == VarState::Basic) continue;
      double v = t.nonbasic_value(j);
      if (v != 0.0) rhs -= t.cols.col(j) * v;
    }
    Vector xb = lu.solve(rhs);

    Vector cb(m);
    for (int r = 0; r < m; ++r) cb[r] = c[t.basis[r]];
    Vector y = lu.transpose().solve(cb);

    int enter = -1;
    int dir = 0;
    for (int j = 0; j < n; ++j) {
      if (t.state[j] == VarState::Basic) continue;
      double d = c[j] - y.dot(t.cols.col(j));
      if (t.state[j] == VarState::AtLower && d < -kReducedCostTol) {
        enter = j;
        dir = 1;
        break;
      }
      if (t.state[j] == VarState::AtUpper && d > kReducedCostTol) {
        enter = j;
        dir = -1;
        break;
      }
    }
    if (enter < 0) return LpStatus::Optimal;

    Vector w = lu.solve(t.cols.col(enter));

    // Step length before the entering column's own opposite bound.
    double best = std::isfinite(t.upper[enter]) ? t.upper[enter] : kInf;
    int leave_row = -1;   // -1 with finite best means a bound flip
    for (int r = 0; r < m; ++r) {
      double rate = -dir * w[r];  // d(basic_r)/d(step)
      int var = t.basis[r];
      double limit = kInf;
      if (rate < -kPivotTol) {
        limit = xb[r] / (-rate);
      } else if (rate > kPivotTol && std::isfinite(t.upper[var])) {
        limit = (t.upper[var] - xb[r]) / rate;
      }
      if (limit < -1e-12) limit = 0.0;
      if (limit < best - 1e-12 ||
          (limit < best + 1e-12 && leave_row >= 0 && var < t.basis[leave_row])) {
        best = std::max(limit, 0.0);
        leave_row = r;
      }
    }
    if (!std::isfinite(best)) return LpStatus::Unbounded;

    if (leave_row < 0) {
      // The entering variable travels to its other bound; basis unchanged.
      t.state[enter] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
      continue;
    }

    int leaving = t.basis[leave_row];
    double rate = -dir * w[leave_row];
    t.state[leaving] = rate < 0 ? VarState::AtLower : VarState::AtUpper;
    t.basis[leave_row] = enter;
    t.state[enter] = VarState::Basic;
  }
  throw std::runtime_error("simplex failed to terminate");
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const int m = static_cast<int>(lp.A.rows());
  const int n = static_cast<int>(lp.A.cols());
  if (lp.b.size() != m || lp.c.size() != n || lp.upper.size() != n)
    throw DomainError("linear program dimensions disagree");

  Tableau t;
  t.num_structural = n;
  t.cols.resize(m, n + m);
  t.cols.leftCols(n) = lp.A;
  t.b = lp.b;
  t.upper.resize(n + m);
  t.upper.head(n) = lp.upper;
  t.state.assign(n + m, VarState::AtLower);
  t.basis.resize(m);
  for (int r = 0; r < m; ++r) {
    double s = lp.b[r] >= 0 ? 1.0 : -1.0;
    t.cols.col(n + r) = s * Vector::Unit(m, r);
    t.upper[n + r] = kInf;
    t.basis[r] = n + r;
    t.state[n + r] = VarState::Basic;
  }

  Vector phase1 = Vector::Zero(n + m);
  phase1.tail(m).setOnes();
  LpStatus s1 = iterate(t, phase1);
  Vector x1 = t.values();
  double infeas = x1.tail(m).sum();
  double scale = std::max(1.0, lp.b.cwiseAbs().maxCoeff());
  if (s1 != LpStatus::Optimal || infeas > 1e-8 * scale) {
    return {LpStatus::Infeasible, Vector(), 0.0};
  }

  // Artificials are pinned at zero for phase 2; basic ones may remain
  // in the basis at value zero on degenerate problems.
  for (int r = 0; r < m; ++r) t.upper[n + r] = 0.0;
  for (int j = n; j < n + m; ++j)
    if (t.state[j] == VarState::AtUpper) t.state[j] = VarState::AtLower;

  Vector phase2 = Vector::Zero(n + m);
  phase2.head(n) = lp.c;
  LpStatus s2 = iterate(t, phase2);
  if (s2 == LpStatus::Unbounded) return {LpStatus::Unbounded, Vector(), 0.0};

  Vector x = t.values().head(n);
  return {LpStatus::Optimal, x, lp.c.dot(x)};
}

}  // namespace steerftrl
