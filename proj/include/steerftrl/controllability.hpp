#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "steerftrl/reachability.hpp"

namespace steerftrl {

// Controller strategy that freezes every learner's payoff differences,
// with the interiority margin that decides whether trajectories can be
// driven in all directions around it.
struct NeutralizerCertificate {
  Vector u0;
  Vector k_values;  // per-learner payoff level at the uniform profile
  double interiority = 0.0;
  double residual = 0.0;
};

// Largest-interiority u in the simplex with A u proportional to the
// ones vector; nothing when no such mixed strategy exists at all.
std::optional<NeutralizerCertificate> neutralizer_lp(const Matrix& a);

// Rank of the projected payoff matrix P_H A with its singular values.
struct ProjectedRank {
  int rank = 0;
  Vector singular_values;
};
ProjectedRank projected_rank(const Matrix& a);

// Largest-interiority u neutralizing every learner at every pure
// profile of the others; by multilinearity this neutralizes uniformly
// over all mixed profiles. Reduces to neutralizer_lp for one learner.
std::optional<NeutralizerCertificate> uniform_neutralizer(const FiniteGame& game);

using VectorField = std::function<Vector(const Vector&)>;

// Control field k (against the last controller action) and the drift
// field, as functions of the flattened primal profile.
VectorField control_field(const FiniteGame& game, const RegularizerBundle& bundle,
                          int k);
VectorField drift_field(const FiniteGame& game, const RegularizerBundle& bundle);

// [f, g] = Dg f - Df g by central finite differences along the field
// values, with the given displacement in the flattened primal chart.
Vector lie_bracket(const VectorField& f, const VectorField& g, const Vector& x_flat,
                   double step = kBracketFdStep);

struct LieRankEvidence {
  int target_rank = 0;
  int depth = 0;
  bool include_drift = false;
  int num_fields = 0;
  std::vector<Vector> samples;
  std::vector<int> ranks;
  std::vector<double> smallest_retained;
  int min_rank = 0;
  bool full_rank_everywhere = false;
};

// Evaluates the control fields and their iterated brackets up to the
// given depth at seeded random interior profiles and reports the rank
// of their span at each point.
LieRankEvidence lie_rank_sample(const FiniteGame& game,
                                const RegularizerBundle& bundle, int num_points,
                                int depth, bool include_drift, std::uint64_t seed);

struct PeriodicityEvidence {
  int num_points = 0;
  std::vector<double> return_distance;
  std::vector<double> return_time;
  int guard_failures = 0;
  double horizon = 0.0;
  double t_min = 0.0;
  bool periodic = false;
};

// Integrates the pure drift from seeded random interior starts and
// measures how closely each trajectory returns to its start after
// t_min; near-returns everywhere are evidence of a periodic drift.
PeriodicityEvidence drift_periodicity_probe(const FiniteGame& game,
                                            const RegularizerBundle& bundle,
                                            int num_points, double horizon,
                                            double dt, std::uint64_t seed);

enum class Verdict {
  Controllable,
  NotControllable,
  SufficientConditionMet,
  Inconclusive,
};

std::string verdict_name(Verdict v);

struct ControllabilityReport {
  Verdict verdict = Verdict::Inconclusive;
  int theorem = 0;  // which sufficient/exact condition fired, 0 if none
  std::optional<NeutralizerCertificate> neutralizer;
  int rank = -1;
  Vector singular_values;
  std::optional<MonotoneWitness> witness;
  std::optional<LieRankEvidence> lie;
  std::optional<PeriodicityEvidence> periodicity;
  std::string caveat;
};

// Exact decision for one learner: controllable iff a fully mixed
// neutralizer exists and the projected payoff has full rank; otherwise
// not controllable, with a monotone witness attached.
ControllabilityReport two_player_verdict(const FiniteGame& game);

struct MultiVerdictOptions {
  int num_points = 100;
  int depth = 2;
  double probe_horizon = 200.0;
  double dt = 1e-3;
  std::uint64_t seed = 42;
};

// Sufficient tests for several learners: a fully mixed uniform
// neutralizer plus full Lie rank, or a periodic drift plus full Lie
// rank. Never returns a hard negative; failures are inconclusive.
ControllabilityReport multi_player_verdict(const FiniteGame& game,
                                           const RegularizerBundle& bundle,
                                           const MultiVerdictOptions& opts = {});

}  // namespace steerftrl
