#pragma once

#include <string>

#include "steerftrl/common.hpp"
#include "steerftrl/dynamics.hpp"
#include "steerftrl/game.hpp"
#include "steerftrl/mirror.hpp"

namespace steerftrl {

// A synthesized control schedule together with the data used to build it.
struct SteeringPlan {
  ControlSchedule schedule;
  StrategyProfile predicted_endpoint;
  Vector dual_displacement;
  Vector neutralizer;
  Vector correction;
  double margin = 0.0;
  // Greedy planner bookkeeping.
  bool reached = false;
  bool stalled = false;
  double achieved_distance = 0.0;
  std::string method;
};

// Exact single-segment plan for a controllable two-player game: the
// segment control is u0 + w/T where w solves the projected payoff
// equation for the dual displacement and T keeps the control inside
// the simplex with the requested margin.
SteeringPlan plan_two_player(const FiniteGame& game, const RegularizerBundle& bundle,
                             const StrategyProfile& x0,
                             const StrategyProfile& x_target, double margin = 0.1);

// Simulates the plan's schedule from x0 in the primal chart and
// returns the sup-norm gap to the plan's predicted endpoint.
double verify_plan(const FiniteGame& game, const RegularizerBundle& bundle,
                   const StrategyProfile& x0, const SteeringPlan& plan, double dt);

struct GreedyOptions {
  double segment_duration = 0.1;
  int lattice_density = 10;
  int max_segments = 400;
  double dt = 1e-3;
  double tol_reach = 1e-2;
  int stall_limit = 10;
};

// Best-effort receding-horizon steering for several learners: each
// segment greedily minimizes the dual distance to the target over a
// lattice of constant controls. Makes no optimality claim.
SteeringPlan greedy_steer_multi(const FiniteGame& game, const RegularizerBundle& bundle,
                                const StrategyProfile& x0,
                                const StrategyProfile& x_target,
                                const GreedyOptions& opts = {});

}  // namespace steerftrl
