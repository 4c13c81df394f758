#pragma once

#include <functional>
#include <vector>

#include "steerftrl/mirror.hpp"

namespace steerftrl {

// Constant controller strategy held for a duration.
struct ControlSegment {
  Vector u;
  double duration = 0.0;
};

using ControlSchedule = std::vector<ControlSegment>;

struct Trajectory {
  std::vector<double> times;
  std::vector<StrategyProfile> primal;
  std::vector<Vector> dual;  // filled only when duals are recorded
  ControlSchedule schedule;

  int num_samples() const { return static_cast<int>(times.size()); }
};

struct SimulateOptions {
  double dt = 1e-3;
  int record_every = 10;
  bool record_dual = false;
};

// Integrates the learning dynamics from an interior primal profile by
// fourth-order Runge-Kutta on the projected dual state, sampling the
// primal trajectory. Segment boundaries are hit exactly. Raises
// GuardError if the primal state approaches the boundary and
// IntegrationError on non-finite states.
Trajectory simulate(const FiniteGame& game, const RegularizerBundle& bundle,
                    const StrategyProfile& x0, const ControlSchedule& schedule,
                    const SimulateOptions& opts = {});

// Same integration started from a flattened dual state (blockwise
// zero-sum, mapping to an interior profile); dual samples are recorded.
Trajectory simulate_dual(const FiniteGame& game, const RegularizerBundle& bundle,
                         const Vector& z0, const ControlSchedule& schedule,
                         const SimulateOptions& opts = {});

// Reference integration in the primal chart itself (Runge-Kutta on the
// strategy profile). Used to cross-check the dual-chart integrator and
// to measure step-size convergence of plan endpoints.
Trajectory simulate_primal_chart(const FiniteGame& game,
                                 const RegularizerBundle& bundle,
                                 const StrategyProfile& x0,
                                 const ControlSchedule& schedule,
                                 const SimulateOptions& opts = {});

// Runs the dual-chart and primal-chart integrations on the same sample
// grid and returns the largest sup-norm gap between the primal states.
double equivalence_check(const FiniteGame& game, const RegularizerBundle& bundle,
                         const StrategyProfile& x0, const ControlSchedule& schedule,
                         const SimulateOptions& opts = {});

// Right-hand side of the projected dual dynamics at dual state z.
Vector dual_field(const FiniteGame& game, const RegularizerBundle& bundle,
                  const Vector& z, const Vector& u);

// Right-hand side of the primal dynamics at interior profile x.
Vector primal_field(const FiniteGame& game, const RegularizerBundle& bundle,
                    const StrategyProfile& x, const Vector& u);

struct EndpointSample {
  double t = 0.0;
  bool valid = false;
  Vector x_flat;
};

// Integrates under one constant control and reports the primal state at
// each requested time (ascending). Once the trajectory trips the
// interior guard, remaining entries are reported invalid rather than
// throwing, so sweeps can skip them.
std::vector<EndpointSample> sample_constant_control(
    const FiniteGame& game, const RegularizerBundle& bundle, const Vector& z0,
    const Vector& u, const std::vector<double>& times, double dt);

void validate_schedule(const FiniteGame& game, const ControlSchedule& schedule);

}  // namespace steerftrl
