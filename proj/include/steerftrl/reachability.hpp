#pragma once

#include <cstdint>
#include <optional>

#include "steerftrl/dynamics.hpp"

namespace steerftrl {

// All controller strategies with coordinates i/density summing to 1,
// in lexicographic order of the integer compositions.
std::vector<Vector> simplex_lattice(int density, int dim);

struct CloudPoint {
  int start_idx = 0;
  int u_idx = 0;
  int t_idx = 0;
  double t = 0.0;
  Vector x_flat;
};

struct PointCloud {
  std::vector<CloudPoint> points;
  std::vector<StrategyProfile> starts;
  std::vector<Vector> controls;
  std::vector<double> horizons;
  long guard_skipped = 0;
};

// Endpoint sweep: every lattice control of the given density, held
// constant from each start for every horizon on the uniform grid of
// `horizon_count` times over [0, horizon]. Endpoints past a boundary
// guard violation are counted in guard_skipped instead of recorded.
PointCloud attainable_cloud(const FiniteGame& game, const RegularizerBundle& bundle,
                            const std::vector<StrategyProfile>& starts,
                            int density, double horizon, int horizon_count,
                            double dt = 1e-3);

// Fraction of simplex grid cells at the given resolution that contain
// at least one cloud point. Cells are the boxes of the coordinatewise
// floor grid that meet the simplex, taken per learner and combined as
// a product; every such cell's center clears 1/(2*resolution) in all
// coordinates, so boundary-hugging slivers do not enter the count.
double coverage(const PointCloud& cloud, int resolution);

// Separating certificate for a two-player game: a direction w in the
// zero-sum hyperplane that no admissible control can decrease, making
// <w, z(t)> non-decreasing along every dual trajectory. `degenerate`
// marks witnesses orthogonal to every projected payoff column (they
// arise from rank deficiency and have all-zero slacks).
struct MonotoneWitness {
  Vector w;
  Vector slacks;
  bool degenerate = false;
};

// Solves the witness feasibility program by maximizing the smallest
// slack <w, P_H A e_j>; returns nothing exactly when w = 0 is the only
// feasible direction, which happens iff the game is controllable.
std::optional<MonotoneWitness> monotone_witness(const FiniteGame& game);

struct MonotonicityCheck {
  double most_negative_increment = 0.0;
  int trials_completed = 0;
  int trials_guarded = 0;
};

// Simulates seeded random schedules from seeded random interior starts
// and returns the most negative increment of <w, z> between consecutive
// samples; a valid witness keeps this above a small negative roundoff.
MonotonicityCheck witness_monotonicity(const FiniteGame& game,
                                       const RegularizerBundle& bundle,
                                       const Vector& w, int trials, double dt,
                                       std::uint64_t seed);

}  // namespace steerftrl
