#include "steerftrl/steering.hpp"

#include <cmath>
#include <limits>

#include "steerftrl/controllability.hpp"
#include "steerftrl/parallel.hpp"
#include "steerftrl/reachability.hpp"

namespace steerftrl {
namespace {

constexpr double kResidualTol = 1e-8;

void require_interior(const FiniteGame& game, const StrategyProfile& x,
                      const char* label) {
  game.validate_profile(x);
  if (!x.is_interior(kInteriorEpsilon))
    throw DomainError(std::string(label) + " must lie in the simplex interior");
}

}  // namespace

SteeringPlan plan_two_player(const FiniteGame& game, const RegularizerBundle& bundle,
                             const StrategyProfile& x0,
                             const StrategyProfile& x_target, double margin) {
  if (game.num_learners() != 1)
    throw DomainError("single-segment planning needs a two-player game");
  if (!(margin > 0.0 && margin < 1.0))
    throw DomainError("margin must lie strictly between 0 and 1");
  require_interior(game, x0, "start");
  require_interior(game, x_target, "target");

  ControllabilityReport report = two_player_verdict(game);
  if (report.verdict != Verdict::Controllable)
    throw DomainError("game failed the exact controllability test");
  const Vector u0 = report.neutralizer->u0;

  SteeringPlan plan;
  plan.margin = margin;
  plan.neutralizer = u0;
  plan.method = "two_player_exact";
  plan.dual_displacement = bundle.mirror_inverse(x_target) - bundle.mirror_inverse(x0);
  plan.predicted_endpoint = x_target;

  const Vector& d = plan.dual_displacement;
  if (d.lpNorm<Eigen::Infinity>() == 0.0) {
    plan.correction = Vector::Zero(game.controller_actions());
    plan.reached = true;
    return plan;
  }

  // Minimum-norm w in the zero-sum hyperplane with (P_H A) w = d: solve
  // the stacked system [P_H A; 1^T] w = [d; 0] by least squares.
  Matrix a = game.payoff_block(0, game.uniform_profile());
  Matrix projected = a;
  projected.rowwise() -= projected.colwise().mean();
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  Matrix stacked(n + 1, m);
  stacked.topRows(n) = projected;
  stacked.bottomRows(1).setOnes();
  Vector rhs(n + 1);
  rhs.head(n) = d;
  rhs[n] = 0.0;
  Vector w = stacked.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
  double residual = (projected * w - d).lpNorm<Eigen::Infinity>();
  if (residual > kResidualTol)
    throw DomainError("projected payoff equation is inconsistent with the rank test");
  plan.correction = w;

  double t_min = 0.0;
  for (int j = 0; j < m; ++j)
    if (w[j] < 0.0) t_min = std::max(t_min, -w[j] / ((1.0 - margin) * u0[j]));
  double duration = t_min > 0.0 ? t_min : 1.0;
  plan.schedule.push_back({u0 + w / duration, duration});
  return plan;
}

double verify_plan(const FiniteGame& game, const RegularizerBundle& bundle,
                   const StrategyProfile& x0, const SteeringPlan& plan, double dt) {
  if (plan.schedule.empty())
    return (x0.flatten() - plan.predicted_endpoint.flatten())
        .lpNorm<Eigen::Infinity>();
  SimulateOptions opts;
  opts.dt = dt;
  opts.record_every = std::numeric_limits<int>::max();
  Trajectory traj = simulate_primal_chart(game, bundle, x0, plan.schedule, opts);
  return (traj.primal.back().flatten() - plan.predicted_endpoint.flatten())
      .lpNorm<Eigen::Infinity>();
}

SteeringPlan greedy_steer_multi(const FiniteGame& game, const RegularizerBundle& bundle,
                                const StrategyProfile& x0,
                                const StrategyProfile& x_target,
                                const GreedyOptions& opts) {
  if (!(opts.segment_duration > 0.0))
    throw DomainError("segment duration must be positive");
  if (opts.lattice_density < 1) throw DomainError("lattice density must be positive");
  if (opts.max_segments < 1) throw DomainError("need at least one segment");
  require_interior(game, x0, "start");
  require_interior(game, x_target, "target");

  SteeringPlan plan;
  plan.method = "greedy_receding_horizon";
  plan.neutralizer = Vector::Constant(game.controller_actions(),
                                      1.0 / game.controller_actions());
  plan.correction = Vector::Zero(game.controller_actions());
  Vector z_target = bundle.mirror_inverse(x_target);
  Vector z = bundle.mirror_inverse(x0);
  plan.dual_displacement = z_target - z;

  std::vector<Vector> lattice =
      simplex_lattice(opts.lattice_density, game.controller_actions());

  double best = (z - z_target).norm();
  Vector best_z = z;
  std::size_t best_prefix = 0;
  std::vector<double> times{opts.segment_duration};
  int stall = 0;
  for (int seg = 0; seg < opts.max_segments && best >= opts.tol_reach; ++seg) {
    std::vector<double> scores(lattice.size(),
                               std::numeric_limits<double>::infinity());
    std::vector<Vector> endpoints(lattice.size());
    parallel_for(static_cast<int>(lattice.size()), [&](int c) {
      auto samples =
          sample_constant_control(game, bundle, z, lattice[c], times, opts.dt);
      if (!samples[0].valid) return;
      Vector z_next = bundle.mirror_inverse(game.unflatten(samples[0].x_flat));
      endpoints[c] = z_next;
      scores[c] = (z_next - z_target).norm();
    });
    int pick = -1;
    double pick_score = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < lattice.size(); ++c)
      if (scores[c] < pick_score) {
        pick_score = scores[c];
        pick = static_cast<int>(c);
      }
    if (pick < 0) {
      plan.stalled = true;
      break;
    }
    plan.schedule.push_back({lattice[pick], opts.segment_duration});
    z = endpoints[pick];
    if (pick_score < best - 1e-12) {
      stall = 0;
      best = pick_score;
      best_z = z;
      best_prefix = plan.schedule.size();
    } else if (++stall >= opts.stall_limit) {
      plan.stalled = true;
      break;
    }
  }

  // Keep only the prefix that ends at the closest visited state, so the
  // recorded distance is reproducible by replaying the schedule.
  plan.schedule.resize(best_prefix);
  plan.achieved_distance = best;
  plan.reached = best < opts.tol_reach;
  plan.predicted_endpoint = bundle.choice(best_z);
  return plan;
}

}  // namespace steerftrl
