#include "steerftrl/dynamics.hpp"

#include <cmath>
#include <string>

namespace steerftrl {
namespace {

void blockwise_project(const FiniteGame& game, Vector& v) {
  for (int i = 0; i < game.num_learners(); ++i) {
    auto seg = v.segment(game.block_offset(i), game.learner_actions()[i]);
    seg.array() -= seg.mean();
  }
}

void check_options(const SimulateOptions& opts) {
  if (!(opts.dt > 0)) throw DomainError("step size must be positive");
  if (opts.record_every < 1) throw DomainError("record_every must be at least 1");
}

double guarded_min(const StrategyProfile& x) {
  double lo = std::numeric_limits<double>::infinity();
  for (const Vector& b : x.blocks) lo = std::min(lo, b.minCoeff());
  return lo;
}

// Shared fixed-step driver. `step` advances the state in place by h
// under segment control u; `record` is called at t = 0, at every
// record_every-th accepted step, and at each segment boundary.
template <typename State, typename Step, typename Record>
void drive(const ControlSchedule& schedule, double dt, int record_every,
           State& state, Step step, Record record) {
  double t = 0;
  record(t, state);
  int since_record = 0;
  double segment_start = 0;
  for (const ControlSegment& seg : schedule) {
    if (seg.duration == 0) continue;
    long n = static_cast<long>(std::ceil(seg.duration / dt - 1e-12));
    if (n < 1) n = 1;
    for (long k = 0; k < n; ++k) {
      bool last = k + 1 == n;
      double h = last ? seg.duration - static_cast<double>(n - 1) * dt : dt;
      step(state, seg.u, h, t);
      t = last ? segment_start + seg.duration
               : segment_start + static_cast<double>(k + 1) * dt;
      ++since_record;
      if (last || since_record >= record_every) {
        record(t, state);
        since_record = 0;
      }
    }
    segment_start += seg.duration;
  }
}

}  // namespace

void validate_schedule(const FiniteGame& game, const ControlSchedule& schedule) {
  for (const ControlSegment& seg : schedule) {
    game.validate_control(seg.u);
    if (!(seg.duration >= 0) || !std::isfinite(seg.duration))
      throw DomainError("segment durations must be finite and nonnegative");
  }
}

Vector dual_field(const FiniteGame& game, const RegularizerBundle& bundle,
                  const Vector& z, const Vector& u) {
  StrategyProfile x = bundle.choice(z);
  Vector v = game.stacked_payoff(x) * u;
  blockwise_project(game, v);
  return v;
}

Vector primal_field(const FiniteGame& game, const RegularizerBundle& bundle,
                    const StrategyProfile& x, const Vector& u) {
  return bundle.jacobian_apply(x, game.stacked_payoff(x) * u);
}

namespace {

Trajectory run_dual(const FiniteGame& game, const RegularizerBundle& bundle,
                    Vector z0, const ControlSchedule& schedule,
                    const SimulateOptions& opts, bool record_dual) {
  check_options(opts);
  validate_schedule(game, schedule);
  {
    StrategyProfile x0 = bundle.choice(z0);
    if (guarded_min(x0) < kGuardMinCoord)
      throw DomainError("initial state is not safely interior");
  }

  Trajectory traj;
  traj.schedule = schedule;

  auto step = [&](Vector& z, const Vector& u, double h, double t) {
    Vector k1 = dual_field(game, bundle, z, u);
    Vector k2 = dual_field(game, bundle, z + 0.5 * h * k1, u);
    Vector k3 = dual_field(game, bundle, z + 0.5 * h * k2, u);
    Vector k4 = dual_field(game, bundle, z + h * k3, u);
    z += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!z.allFinite())
      throw IntegrationError("dual state became non-finite", t + h);
    if (guarded_min(bundle.choice(z)) < kGuardMinCoord)
      throw GuardError("primal state left the guarded interior", t + h);
  };
  auto record = [&](double t, const Vector& z) {
    traj.times.push_back(t);
    traj.primal.push_back(bundle.choice(z));
    if (record_dual) traj.dual.push_back(z);
  };
  drive(schedule, opts.dt, opts.record_every, z0, step, record);
  return traj;
}

}  // namespace

Trajectory simulate(const FiniteGame& game, const RegularizerBundle& bundle,
                    const StrategyProfile& x0, const ControlSchedule& schedule,
                    const SimulateOptions& opts) {
  game.validate_profile(x0);
  if (!x0.is_interior())
    throw DomainError("simulation starts at an interior profile");
  return run_dual(game, bundle, bundle.mirror_inverse(x0), schedule, opts,
                  opts.record_dual);
}

Trajectory simulate_dual(const FiniteGame& game, const RegularizerBundle& bundle,
                         const Vector& z0, const ControlSchedule& schedule,
                         const SimulateOptions& opts) {
  if (z0.size() != game.total_actions())
    throw DomainError("dual state has the wrong length");
  return run_dual(game, bundle, z0, schedule, opts, true);
}

Trajectory simulate_primal_chart(const FiniteGame& game,
                                 const RegularizerBundle& bundle,
                                 const StrategyProfile& x0,
                                 const ControlSchedule& schedule,
                                 const SimulateOptions& opts) {
  check_options(opts);
  validate_schedule(game, schedule);
  game.validate_profile(x0);
  if (!x0.is_interior())
    throw DomainError("simulation starts at an interior profile");

  Trajectory traj;
  traj.schedule = schedule;

  auto field = [&](const Vector& flat, const Vector& u, double t) {
    StrategyProfile x = game.unflatten(flat);
    if (guarded_min(x) < kGuardMinCoord)
      throw GuardError("primal state left the guarded interior", t);
    return primal_field(game, bundle, x, u);
  };
  auto step = [&](Vector& flat, const Vector& u, double h, double t) {
    Vector k1 = field(flat, u, t);
    Vector k2 = field(flat + 0.5 * h * k1, u, t);
    Vector k3 = field(flat + 0.5 * h * k2, u, t);
    Vector k4 = field(flat + h * k3, u, t);
    flat += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!flat.allFinite())
      throw IntegrationError("primal state became non-finite", t + h);
    if (guarded_min(game.unflatten(flat)) < kGuardMinCoord)
      throw GuardError("primal state left the guarded interior", t + h);
  };
  auto record = [&](double t, const Vector& flat) {
    traj.times.push_back(t);
    traj.primal.push_back(game.unflatten(flat));
  };
  Vector state = x0.flatten();
  drive(schedule, opts.dt, opts.record_every, state, step, record);
  return traj;
}

double equivalence_check(const FiniteGame& game, const RegularizerBundle& bundle,
                         const StrategyProfile& x0, const ControlSchedule& schedule,
                         const SimulateOptions& opts) {
  Trajectory via_dual = simulate(game, bundle, x0, schedule, opts);
  Trajectory via_primal = simulate_primal_chart(game, bundle, x0, schedule, opts);
  double worst = 0;
  for (int s = 0; s < via_dual.num_samples(); ++s) {
    Vector gap = via_dual.primal[s].flatten() - via_primal.primal[s].flatten();
    worst = std::max(worst, gap.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

std::vector<EndpointSample> sample_constant_control(
    const FiniteGame& game, const RegularizerBundle& bundle, const Vector& z0,
    const Vector& u, const std::vector<double>& times, double dt) {
  if (!(dt > 0)) throw DomainError("step size must be positive");
  game.validate_control(u);
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (times[i + 1] < times[i])
      throw DomainError("sample times must be ascending");

  std::vector<EndpointSample> out(times.size());
  Vector z = z0;
  double t = 0;
  bool alive = guarded_min(bundle.choice(z)) >= kGuardMinCoord;
  auto rk4 = [&](double h) {
    Vector k1 = dual_field(game, bundle, z, u);
    Vector k2 = dual_field(game, bundle, z + 0.5 * h * k1, u);
    Vector k3 = dual_field(game, bundle, z + 0.5 * h * k2, u);
    Vector k4 = dual_field(game, bundle, z + h * k3, u);
    z += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
  };
  for (std::size_t i = 0; i < times.size(); ++i) {
    double target = times[i];
    if (!(target >= 0) || !std::isfinite(target))
      throw DomainError("sample times must be finite and nonnegative");
    while (alive && t < target - 1e-12) {
      double remaining = target - t;
      double h = remaining > dt ? dt : remaining;
      rk4(h);
      t = remaining > dt ? t + dt : target;
      if (!z.allFinite() || guarded_min(bundle.choice(z)) < kGuardMinCoord)
        alive = false;
    }
    out[i].t = target;
    out[i].valid = alive;
    if (alive) out[i].x_flat = bundle.choice(z).flatten();
  }
  return out;
}

}  // namespace steerftrl
