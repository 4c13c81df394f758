#include "steerftrl/controllability.hpp"

#include <algorithm>
#include <cmath>

#include "steerftrl/lp.hpp"
#include "steerftrl/parallel.hpp"
#include "steerftrl/rng.hpp"

namespace steerftrl {
namespace {

constexpr double kProbeTMin = 0.1;
constexpr double kProbeReturnTol = 1e-3;
const char* kSufficiencyCaveat =
    "sufficient conditions checked at sampled points; a failed check does "
    "not certify uncontrollability";

Matrix project_block_rows(const FiniteGame& game, Matrix a) {
  for (int i = 0; i < game.num_learners(); ++i) {
    auto rows = a.middleRows(game.block_offset(i), game.learner_actions()[i]);
    rows.rowwise() -= rows.colwise().mean();
  }
  return a;
}

// Shared LP core: maximize t subject to rows * u = 0 (projected
// neutrality), sum(u) = 1, u >= t >= 0. The rows already have zero
// column sums, so feasibility means a simplex neutralizer exists.
std::optional<Vector> max_interiority_lp(const Matrix& rows) {
  const int m = static_cast<int>(rows.cols());
  const int r = static_cast<int>(rows.rows());
  const double inf = std::numeric_limits<double>::infinity();

  // Columns: u (m), t, sigma (m) with u_i - t - sigma_i = 0.
  LinearProgram lp;
  lp.A = Matrix::Zero(r + 1 + m, 2 * m + 1);
  lp.b = Vector::Zero(r + 1 + m);
  lp.c = Vector::Zero(2 * m + 1);
  lp.upper = Vector::Constant(2 * m + 1, inf);
  lp.upper.head(m).setOnes();
  lp.upper[m] = 1.0;
  lp.A.topLeftCorner(r, m) = rows;
  lp.A.row(r).head(m).setOnes();
  lp.b[r] = 1.0;
  for (int i = 0; i < m; ++i) {
    lp.A(r + 1 + i, i) = 1;
    lp.A(r + 1 + i, m) = -1;
    lp.A(r + 1 + i, m + 1 + i) = -1;
  }
  lp.c[m] = -1;
  LpResult res = solve_lp(lp);
  if (res.status != LpStatus::Optimal) return std::nullopt;
  return res.x.head(m);
}

}  // namespace

std::optional<NeutralizerCertificate> neutralizer_lp(const Matrix& a) {
  if (a.rows() < 2 || a.cols() < 2)
    throw DomainError("payoff matrix must be at least 2x2");
  Matrix projected = a;
  projected.rowwise() -= projected.colwise().mean();
  std::optional<Vector> u = max_interiority_lp(projected);
  if (!u) return std::nullopt;
  NeutralizerCertificate cert;
  cert.u0 = *u;
  Vector img = a * cert.u0;
  cert.k_values = Vector::Constant(1, img.mean());
  cert.interiority = cert.u0.minCoeff();
  cert.residual = (img.array() - img.mean()).abs().maxCoeff();
  return cert;
}

ProjectedRank projected_rank(const Matrix& a) {
  Matrix projected = a;
  projected.rowwise() -= projected.colwise().mean();
  Eigen::JacobiSVD<Matrix> svd(projected);
  ProjectedRank out;
  out.singular_values = svd.singularValues();
  double smax = out.singular_values.size() ? out.singular_values[0] : 0.0;
  for (int i = 0; i < out.singular_values.size(); ++i)
    if (smax > 0 && out.singular_values[i] > kRankThreshold * smax) ++out.rank;
  return out;
}

std::optional<NeutralizerCertificate> uniform_neutralizer(const FiniteGame& game) {
  const int n_learners = game.num_learners();
  if (n_learners == 1)
    return neutralizer_lp(game.payoff_block(0, game.uniform_profile()));

  // Neutrality at every pure profile of the other learners; the payoff
  // blocks are multilinear in those profiles, so the pure constraints
  // imply neutrality at every mixed profile.
  std::vector<Matrix> constraint_rows;
  long total_rows = 0;
  for (int i = 0; i < n_learners; ++i) {
    std::vector<int> others;
    for (int j = 0; j < n_learners; ++j)
      if (j != i) others.push_back(j);
    std::vector<int> assignment(others.size(), 0);
    while (true) {
      StrategyProfile vertex;
      vertex.blocks.resize(n_learners);
      for (int j = 0; j < n_learners; ++j)
        vertex.blocks[j] = Vector::Unit(game.learner_actions()[j], 0);
      for (std::size_t d = 0; d < others.size(); ++d)
        vertex.blocks[others[d]] =
            Vector::Unit(game.learner_actions()[others[d]], assignment[d]);
      Matrix block = game.payoff_block(i, vertex);
      block.rowwise() -= block.colwise().mean();
      constraint_rows.push_back(block);
      total_rows += block.rows();

      int d = static_cast<int>(others.size()) - 1;
      while (d >= 0) {
        if (++assignment[d] < game.learner_actions()[others[d]]) break;
        assignment[d] = 0;
        --d;
      }
      if (d < 0) break;
    }
  }
  Matrix rows(total_rows, game.controller_actions());
  long at = 0;
  for (const Matrix& blk : constraint_rows) {
    rows.middleRows(at, blk.rows()) = blk;
    at += blk.rows();
  }

  std::optional<Vector> u = max_interiority_lp(rows);
  if (!u) return std::nullopt;
  NeutralizerCertificate cert;
  cert.u0 = *u;
  cert.interiority = cert.u0.minCoeff();
  StrategyProfile uniform = game.uniform_profile();
  cert.k_values.resize(n_learners);
  for (int i = 0; i < n_learners; ++i)
    cert.k_values[i] = (game.payoff_block(i, uniform) * cert.u0).mean();
  cert.residual = (rows * cert.u0).cwiseAbs().maxCoeff();
  return cert;
}

VectorField control_field(const FiniteGame& game, const RegularizerBundle& bundle,
                          int k) {
  if (k < 0 || k + 1 >= game.controller_actions())
    throw DomainError("control field index out of range");
  return [&game, &bundle, k](const Vector& flat) {
    return eta_fields(game, bundle, game.unflatten(flat)).controls[k];
  };
}

VectorField drift_field(const FiniteGame& game, const RegularizerBundle& bundle) {
  return [&game, &bundle](const Vector& flat) {
    return eta_fields(game, bundle, game.unflatten(flat)).drift;
  };
}

Vector lie_bracket(const VectorField& f, const VectorField& g, const Vector& x_flat,
                   double step) {
  Vector fx = f(x_flat);
  Vector gx = g(x_flat);
  auto directional = [&](const VectorField& h, const Vector& v) -> Vector {
    double scale = v.norm();
    if (scale == 0) return Vector::Zero(x_flat.size());
    Vector unit = v / scale;
    Vector plus = h(x_flat + step * unit);
    Vector minus = h(x_flat - step * unit);
    return (plus - minus) * (scale / (2 * step));
  };
  return directional(g, fx) - directional(f, gx);
}

LieRankEvidence lie_rank_sample(const FiniteGame& game,
                                const RegularizerBundle& bundle, int num_points,
                                int depth, bool include_drift, std::uint64_t seed) {
  if (num_points < 1) throw DomainError("at least one sample point is required");
  if (depth < 1) throw DomainError("bracket depth must be at least 1");

  // Base fields, then right-nested brackets [f_i, [...]] by length.
  std::vector<VectorField> base;
  for (int k = 0; k + 1 < game.controller_actions(); ++k)
    base.push_back(control_field(game, bundle, k));
  if (include_drift) base.push_back(drift_field(game, bundle));

  struct Item {
    VectorField field;
    int head;  // base index of the outermost bracket argument
  };
  std::vector<VectorField> all;
  std::vector<Item> level;
  for (std::size_t i = 0; i < base.size(); ++i) {
    all.push_back(base[i]);
    level.push_back({base[i], static_cast<int>(i)});
  }
  for (int len = 2; len <= depth; ++len) {
    std::vector<Item> next;
    for (std::size_t i = 0; i < base.size(); ++i)
      for (const Item& item : level) {
        if (len == 2 && static_cast<int>(i) >= item.head)
          continue;  // [f,f] = 0 and [f,g] = -[g,f]
        VectorField inner = item.field;
        VectorField outer = base[i];
        VectorField bracket = [outer, inner](const Vector& x) {
          return lie_bracket(outer, inner, x);
        };
        next.push_back({bracket, static_cast<int>(i)});
        all.push_back(bracket);
      }
    level = std::move(next);
  }

  LieRankEvidence ev;
  ev.target_rank = game.tangent_dim();
  ev.depth = depth;
  ev.include_drift = include_drift;
  ev.num_fields = static_cast<int>(all.size());
  ev.samples.resize(num_points);
  ev.ranks.assign(num_points, 0);
  ev.smallest_retained.assign(num_points, 0.0);

  parallel_for(num_points, [&](int p) {
    Rng rng = Rng::stream(seed, 0x11e7, static_cast<std::uint64_t>(p));
    StrategyProfile x;
    for (int ni : game.learner_actions())
      x.blocks.push_back(rng.interior_simplex_point(ni, 1e-3));
    Vector flat = x.flatten();
    ev.samples[p] = flat;
    Matrix span(game.total_actions(), static_cast<int>(all.size()));
    for (std::size_t f = 0; f < all.size(); ++f) span.col(f) = all[f](flat);
    Eigen::JacobiSVD<Matrix> svd(span);
    const Vector& sv = svd.singularValues();
    double smax = sv.size() ? sv[0] : 0.0;
    int rank = 0;
    double smallest = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (smax > 0 && sv[i] > kBracketRankThreshold * smax) {
        ++rank;
        smallest = sv[i];
      }
    ev.ranks[p] = rank;
    ev.smallest_retained[p] = smallest;
  });

  ev.min_rank = *std::min_element(ev.ranks.begin(), ev.ranks.end());
  ev.full_rank_everywhere = ev.min_rank >= ev.target_rank;
  return ev;
}

PeriodicityEvidence drift_periodicity_probe(const FiniteGame& game,
                                            const RegularizerBundle& bundle,
                                            int num_points, double horizon,
                                            double dt, std::uint64_t seed) {
  if (num_points < 1) throw DomainError("at least one probe point is required");
  if (!(horizon > kProbeTMin))
    throw DomainError("probe horizon must exceed the settle time");
  if (!(dt > 0)) throw DomainError("step size must be positive");

  PeriodicityEvidence ev;
  ev.num_points = num_points;
  ev.horizon = horizon;
  ev.t_min = kProbeTMin;
  ev.return_distance.assign(num_points, std::numeric_limits<double>::infinity());
  ev.return_time.assign(num_points, 0.0);
  std::vector<int> guarded(num_points, 0);

  const Vector uniform_u = Vector::Constant(
      game.controller_actions(), 1.0 / game.controller_actions());

  parallel_for(num_points, [&](int p) {
    Rng rng = Rng::stream(seed, 0xd21f, static_cast<std::uint64_t>(p));
    StrategyProfile x0;
    for (int ni : game.learner_actions())
      x0.blocks.push_back(rng.interior_simplex_point(ni, 1e-3));
    Vector ref = x0.flatten();
    Vector z = bundle.mirror_inverse(x0);

    auto field = [&](const Vector& state) {
      return dual_field(game, bundle, state, uniform_u);
    };
    double t = 0;
    long steps = static_cast<long>(std::ceil(horizon / dt - 1e-12));
    for (long s = 0; s < steps; ++s) {
      double h = s + 1 == steps ? horizon - static_cast<double>(s) * dt : dt;
      Vector k1 = field(z);
      Vector k2 = field(z + 0.5 * h * k1);
      Vector k3 = field(z + 0.5 * h * k2);
      Vector k4 = field(z + h * k3);
      z += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
      t = s + 1 == steps ? horizon : t + dt;
      StrategyProfile x = bundle.choice(z);
      double lo = std::numeric_limits<double>::infinity();
      for (const Vector& b : x.blocks) lo = std::min(lo, b.minCoeff());
      if (!z.allFinite() || lo < kGuardMinCoord) {
        guarded[p] = 1;
        return;
      }
      if (t >= kProbeTMin) {
        double dist = (x.flatten() - ref).lpNorm<Eigen::Infinity>();
        if (dist < ev.return_distance[p]) {
          ev.return_distance[p] = dist;
          ev.return_time[p] = t;
        }
      }
    }
  });

  bool all_return = true;
  for (int p = 0; p < num_points; ++p) {
    if (guarded[p]) ++ev.guard_failures;
    if (!(ev.return_distance[p] < kProbeReturnTol)) all_return = false;
  }
  ev.periodic = all_return;
  return ev;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Controllable: return "controllable";
    case Verdict::NotControllable: return "not_controllable";
    case Verdict::SufficientConditionMet: return "sufficient_condition_met";
    case Verdict::Inconclusive: return "inconclusive";
  }
  throw DomainError("unknown verdict");
}

ControllabilityReport two_player_verdict(const FiniteGame& game) {
  if (game.num_learners() != 1)
    throw DomainError("the exact verdict applies to two-player games");
  ControllabilityReport report;
  Matrix a = game.payoff_block(0, game.uniform_profile());
  report.neutralizer = neutralizer_lp(a);
  ProjectedRank pr = projected_rank(a);
  report.rank = pr.rank;
  report.singular_values = pr.singular_values;
  report.theorem = 1;

  bool mixed = report.neutralizer &&
               report.neutralizer->interiority > kInteriorEpsilon;
  bool full = pr.rank == game.learner_actions()[0] - 1;
  if (mixed && full) {
    report.verdict = Verdict::Controllable;
  } else {
    report.verdict = Verdict::NotControllable;
    report.witness = monotone_witness(game);
  }
  return report;
}

ControllabilityReport multi_player_verdict(const FiniteGame& game,
                                           const RegularizerBundle& bundle,
                                           const MultiVerdictOptions& opts) {
  if (game.num_learners() < 2)
    throw DomainError("the sampled verdict applies to games with several learners");
  ControllabilityReport report;
  report.caveat = kSufficiencyCaveat;

  report.neutralizer = uniform_neutralizer(game);
  report.lie = lie_rank_sample(game, bundle, opts.num_points, opts.depth,
                               /*include_drift=*/false, opts.seed);

  bool mixed = report.neutralizer &&
               report.neutralizer->interiority > kInteriorEpsilon;
  if (mixed && report.lie->full_rank_everywhere) {
    report.verdict = Verdict::SufficientConditionMet;
    report.theorem = 2;
    return report;
  }

  report.periodicity = drift_periodicity_probe(
      game, bundle, opts.num_points < 20 ? opts.num_points : 20,
      opts.probe_horizon, opts.dt, opts.seed);
  if (report.periodicity->periodic && report.lie->full_rank_everywhere) {
    report.verdict = Verdict::SufficientConditionMet;
    report.theorem = 3;
    return report;
  }

  report.verdict = Verdict::Inconclusive;
  return report;
}

}  // namespace steerftrl
