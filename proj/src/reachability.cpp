#include "steerftrl/reachability.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_set>

#include "steerftrl/lp.hpp"
#include "steerftrl/parallel.hpp"
#include "steerftrl/rng.hpp"

namespace steerftrl {

std::vector<Vector> simplex_lattice(int density, int dim) {
  if (density < 1) throw DomainError("lattice density must be at least 1");
  if (dim < 1) throw DomainError("lattice dimension must be at least 1");
  std::vector<Vector> points;
  std::vector<int> parts(dim, 0);
  // Lexicographic enumeration of compositions of `density` into `dim`
  // nonnegative parts.
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == dim - 1) {
      parts[pos] = remaining;
      Vector u(dim);
      for (int i = 0; i < dim; ++i) u[i] = static_cast<double>(parts[i]) / density;
      points.push_back(u);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      parts[pos] = v;
      rec(pos + 1, remaining - v);
    }
  };
  rec(0, density);
  return points;
}

PointCloud attainable_cloud(const FiniteGame& game, const RegularizerBundle& bundle,
                            const std::vector<StrategyProfile>& starts,
                            int density, double horizon, int horizon_count,
                            double dt) {
  if (starts.empty()) throw DomainError("the sweep needs at least one start");
  if (horizon < 0) throw DomainError("sweep horizon must be nonnegative");
  if (horizon_count < 1) throw DomainError("sweep needs at least one horizon");
  for (const StrategyProfile& x0 : starts) {
    game.validate_profile(x0);
    if (!x0.is_interior()) throw DomainError("sweep starts must be interior");
  }

  PointCloud cloud;
  cloud.starts = starts;
  cloud.controls = simplex_lattice(density, game.controller_actions());
  cloud.horizons.resize(horizon_count);
  for (int j = 0; j < horizon_count; ++j)
    cloud.horizons[j] = horizon_count == 1
                            ? horizon
                            : horizon * static_cast<double>(j) / (horizon_count - 1);

  const int num_controls = static_cast<int>(cloud.controls.size());
  const int num_starts = static_cast<int>(starts.size());
  std::vector<Vector> duals;
  duals.reserve(num_starts);
  for (const StrategyProfile& x0 : starts)
    duals.push_back(bundle.mirror_inverse(x0));

  struct Row {
    std::vector<EndpointSample> samples;
  };
  std::vector<Row> rows(static_cast<std::size_t>(num_starts) * num_controls);
  parallel_for(num_starts * num_controls, [&](int job) {
    int s = job / num_controls;
    int u = job % num_controls;
    rows[job].samples = sample_constant_control(game, bundle, duals[s],
                                                cloud.controls[u], cloud.horizons, dt);
  });

  for (int s = 0; s < num_starts; ++s)
    for (int u = 0; u < num_controls; ++u) {
      const Row& row = rows[static_cast<std::size_t>(s) * num_controls + u];
      for (int j = 0; j < horizon_count; ++j) {
        const EndpointSample& e = row.samples[j];
        if (!e.valid) {
          ++cloud.guard_skipped;
          continue;
        }
        cloud.points.push_back({s, u, j, e.t, e.x_flat});
      }
    }
  return cloud;
}

namespace {

// Number of floor-grid cells meeting one simplex of the given dimension:
// integer vectors c >= 0 with g - n < sum(c) <= g - 1.
long block_cell_count(int g, int n) {
  auto binomial = [](long a, long b) {
    if (b < 0 || b > a) return 0L;
    long r = 1;
    for (long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  long total = 0;
  for (int s = std::max(0, g - n + 1); s <= g - 1; ++s)
    total += binomial(s + n - 1, n - 1);
  if (g >= 1 && total == 0) total = 1;  // g=1 keeps the single whole-simplex cell
  return total;
}

}  // namespace

double coverage(const PointCloud& cloud, int resolution) {
  if (resolution < 1) throw DomainError("coverage resolution must be at least 1");
  if (cloud.starts.empty()) throw DomainError("coverage needs a populated cloud");
  const int g = resolution;

  std::vector<int> block_sizes;
  for (const Vector& b : cloud.starts.front().blocks)
    block_sizes.push_back(static_cast<int>(b.size()));

  double total_cells = 1;
  for (int n : block_sizes) total_cells *= static_cast<double>(block_cell_count(g, n));

  std::unordered_set<std::uint64_t> covered;
  std::vector<int> cell;
  for (const CloudPoint& p : cloud.points) {
    std::uint64_t key = 0;
    int at = 0;
    for (int n : block_sizes) {
      cell.assign(n, 0);
      int sum = 0;
      for (int i = 0; i < n; ++i) {
        int c = static_cast<int>(std::floor(p.x_flat[at + i] * g));
        c = std::clamp(c, 0, g - 1);
        cell[i] = c;
        sum += c;
      }
      // Points sitting exactly on grid planes can floor to sum = g;
      // push them into the adjacent valid cell.
      for (int i = 0; sum > g - 1 && i < n; ++i)
        while (cell[i] > 0 && sum > g - 1) {
          --cell[i];
          --sum;
        }
      for (int i = 0; i < n; ++i) key = key * (g + 1) + cell[i];
      at += n;
    }
    covered.insert(key);
  }
  return static_cast<double>(covered.size()) / total_cells;
}

namespace {

Matrix projected_columns(const FiniteGame& game) {
  if (game.num_learners() != 1)
    throw DomainError("the monotone witness applies to two-player games");
  Matrix a = game.payoff_block(0, game.uniform_profile());
  Matrix b = a;
  for (int c = 0; c < b.cols(); ++c) b.col(c).array() -= b.col(c).mean();
  return b;
}

void canonical_sign(Vector& w) {
  int lead = 0;
  for (int i = 1; i < w.size(); ++i)
    if (std::abs(w[i]) > std::abs(w[lead])) lead = i;
  if (w[lead] < 0) w = -w;
}

}  // namespace

std::optional<MonotoneWitness> monotone_witness(const FiniteGame& game) {
  Matrix b = projected_columns(game);
  const int n = static_cast<int>(b.rows());
  const int m = static_cast<int>(b.cols());
  const double inf = std::numeric_limits<double>::infinity();

  // Columns: p (n), q (n) with w = p - q, slack s (m), min-slack t.
  // Rows: <w, b_j> - t - s_j = 0 for each j, and sum(w) = 0.
  auto make_lp = [&](double t_upper, double t_lower) {
    LinearProgram lp;
    int cols = 2 * n + m + 1 + (t_lower > 0 ? 1 : 0);
    int rows = m + 1 + (t_lower > 0 ? 1 : 0);
    lp.A = Matrix::Zero(rows, cols);
    lp.b = Vector::Zero(rows);
    lp.c = Vector::Zero(cols);
    lp.upper = Vector::Constant(cols, inf);
    lp.upper.head(2 * n).setOnes();
    lp.upper[2 * n + m] = t_upper;
    for (int j = 0; j < m; ++j) {
      lp.A.row(j).head(n) = b.col(j).transpose();
      lp.A.row(j).segment(n, n) = -b.col(j).transpose();
      lp.A(j, 2 * n + j) = -1;
      lp.A(j, 2 * n + m) = -1;
    }
    lp.A.row(m).head(n).setOnes();
    lp.A.row(m).segment(n, n) = -Vector::Ones(n).transpose();
    if (t_lower > 0) {
      // t - excess = t_lower
      lp.A(m + 1, 2 * n + m) = 1;
      lp.A(m + 1, 2 * n + m + 1) = -1;
      lp.b[m + 1] = t_lower;
    }
    return lp;
  };

  // Stage 1: largest achievable total slack with t pinned to zero.
  LinearProgram total = make_lp(0.0, 0.0);
  for (int j = 0; j < m; ++j) total.c[2 * n + j] = -1;
  LpResult r1 = solve_lp(total);
  if (r1.status != LpStatus::Optimal)
    throw std::runtime_error("witness program did not solve");

  if (-r1.objective <= 1e-9) {
    // Every feasible direction has all-zero slacks; a nonzero one
    // exists only in the left null space of the projected columns.
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU);
    const Vector& sv = svd.singularValues();
    double smax = sv.size() > 0 ? sv[0] : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > kRankThreshold * std::max(smax, 1e-300)) ++rank;
    Matrix null_cols = svd.matrixU().rightCols(n - rank);
    Matrix projected = null_cols;
    for (int c = 0; c < projected.cols(); ++c)
      projected.col(c) = project_zero_sum(projected.col(c));
    if (projected.cols() == 0) return std::nullopt;
    Eigen::JacobiSVD<Matrix> dir(projected, Eigen::ComputeFullU);
    if (dir.singularValues().size() == 0 || dir.singularValues()[0] <= 1e-9)
      return std::nullopt;
    Vector w = dir.matrixU().col(0);
    w = project_zero_sum(w);
    w /= w.lpNorm<Eigen::Infinity>();
    canonical_sign(w);
    return MonotoneWitness{w, b.transpose() * w, true};
  }

  // Stage 2: maximize the smallest slack.
  LinearProgram minslack = make_lp(inf, 0.0);
  minslack.c[2 * n + m] = -1;
  LpResult r2 = solve_lp(minslack);
  if (r2.status != LpStatus::Optimal)
    throw std::runtime_error("witness program did not solve");
  double tstar = std::max(0.0, -r2.objective);

  // Stage 3: among max-min-slack witnesses, maximize the total slack to
  // pin a canonical nontrivial one.
  LinearProgram final_lp = make_lp(inf, tstar > 1e-12 ? tstar : 0.0);
  for (int j = 0; j < m; ++j) final_lp.c[2 * n + j] = -1;
  LpResult r3 = solve_lp(final_lp);
  if (r3.status != LpStatus::Optimal)
    throw std::runtime_error("witness program did not solve");

  Vector w = r3.x.head(n) - r3.x.segment(n, n);
  double norm = w.lpNorm<Eigen::Infinity>();
  if (norm <= 1e-9) return std::nullopt;
  w /= norm;
  w = project_zero_sum(w);
  return MonotoneWitness{w, b.transpose() * w, false};
}

MonotonicityCheck witness_monotonicity(const FiniteGame& game,
                                       const RegularizerBundle& bundle,
                                       const Vector& w, int trials, double dt,
                                       std::uint64_t seed) {
  if (w.size() != game.total_actions())
    throw DomainError("witness has the wrong length");
  if (w.lpNorm<Eigen::Infinity>() <= 0)
    throw DomainError("witness direction must be nonzero");
  if (trials < 1) throw DomainError("at least one trial is required");

  const int m = game.controller_actions();
  std::vector<double> worst(trials, 0.0);
  std::vector<int> guarded(trials, 0);
  parallel_for(trials, [&](int trial) {
    Rng rng = Rng::stream(seed, 0x3a17, static_cast<std::uint64_t>(trial));
    StrategyProfile x0;
    for (int ni : game.learner_actions())
      x0.blocks.push_back(rng.interior_simplex_point(ni, 1e-3));
    ControlSchedule schedule;
    for (int s = 0; s < 5; ++s)
      schedule.push_back({rng.simplex_point(m), rng.uniform(0.1, 1.0)});
    SimulateOptions opts;
    opts.dt = dt;
    opts.record_dual = true;
    Trajectory traj;
    try {
      traj = simulate(game, bundle, x0, schedule, opts);
    } catch (const GuardError&) {
      guarded[trial] = 1;
      return;
    }
    double lo = 0;
    for (std::size_t k = 1; k < traj.dual.size(); ++k)
      lo = std::min(lo, w.dot(traj.dual[k] - traj.dual[k - 1]));
    worst[trial] = lo;
  });

  MonotonicityCheck check;
  for (int trial = 0; trial < trials; ++trial) {
    if (guarded[trial]) {
      ++check.trials_guarded;
      continue;
    }
    ++check.trials_completed;
    check.most_negative_increment =
        std::min(check.most_negative_increment, worst[trial]);
  }
  return check;
}

}  // namespace steerftrl
