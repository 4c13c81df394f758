#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "steerftrl/artifacts.hpp"
#include "steerftrl/controllability.hpp"
#include "steerftrl/dynamics.hpp"
#include "steerftrl/game.hpp"
#include "steerftrl/gamespec.hpp"
#include "steerftrl/mirror.hpp"
#include "steerftrl/reachability.hpp"
#include "steerftrl/steering.hpp"

namespace py = pybind11;
using namespace steerftrl;

namespace {

ControlSchedule to_schedule(const std::vector<std::pair<Vector, double>>& raw) {
  ControlSchedule schedule;
  schedule.reserve(raw.size());
  for (const auto& [u, duration] : raw) schedule.push_back({u, duration});
  return schedule;
}

std::vector<std::pair<Vector, double>> from_schedule(const ControlSchedule& schedule) {
  std::vector<std::pair<Vector, double>> raw;
  raw.reserve(schedule.size());
  for (const ControlSegment& seg : schedule) raw.emplace_back(seg.u, seg.duration);
  return raw;
}

Matrix rows_to_matrix(const std::vector<Vector>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<long>(rows.size()), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<long>(i)) = rows[i];
  return m;
}

py::dict trajectory_dict(const Trajectory& t) {
  py::dict d;
  Vector times(static_cast<long>(t.times.size()));
  for (std::size_t i = 0; i < t.times.size(); ++i)
    times[static_cast<long>(i)] = t.times[i];
  d["times"] = times;
  std::vector<Vector> primal_rows;
  primal_rows.reserve(t.primal.size());
  for (const StrategyProfile& p : t.primal) primal_rows.push_back(p.flatten());
  d["primal"] = rows_to_matrix(primal_rows);
  if (!t.dual.empty()) d["dual"] = rows_to_matrix(t.dual);
  d["schedule"] = from_schedule(t.schedule);
  return d;
}

py::dict neutralizer_dict(const NeutralizerCertificate& cert) {
  py::dict d;
  d["u0"] = cert.u0;
  d["k_values"] = cert.k_values;
  d["interiority"] = cert.interiority;
  d["residual"] = cert.residual;
  return d;
}

py::dict lie_dict(const LieRankEvidence& lie) {
  py::dict d;
  d["target_rank"] = lie.target_rank;
  d["depth"] = lie.depth;
  d["include_drift"] = lie.include_drift;
  d["num_fields"] = lie.num_fields;
  d["ranks"] = lie.ranks;
  d["smallest_retained"] = lie.smallest_retained;
  d["min_rank"] = lie.min_rank;
  d["full_rank_everywhere"] = lie.full_rank_everywhere;
  d["samples"] = rows_to_matrix(lie.samples);
  return d;
}

py::dict report_dict(const ControllabilityReport& report) {
  py::dict d;
  d["verdict"] = verdict_name(report.verdict);
  d["theorem"] = report.theorem;
  if (report.neutralizer) d["neutralizer"] = neutralizer_dict(*report.neutralizer);
  if (report.rank >= 0) {
    d["rank"] = report.rank;
    d["singular_values"] = report.singular_values;
  }
  if (report.witness) {
    py::dict w;
    w["w"] = report.witness->w;
    w["slacks"] = report.witness->slacks;
    w["degenerate"] = report.witness->degenerate;
    d["witness"] = w;
  }
  if (report.lie) d["lie"] = lie_dict(*report.lie);
  if (report.periodicity) {
    py::dict p;
    p["periodic"] = report.periodicity->periodic;
    p["return_distance"] = report.periodicity->return_distance;
    p["return_time"] = report.periodicity->return_time;
    p["guard_failures"] = report.periodicity->guard_failures;
    d["periodicity"] = p;
  }
  if (!report.caveat.empty()) d["caveat"] = report.caveat;
  return d;
}

RegularizerBundle make_bundle(const FiniteGame& game, const py::object& kinds) {
  if (py::isinstance<py::str>(kinds))
    return RegularizerBundle(game, regularizer_from_name(kinds.cast<std::string>()));
  std::vector<RegularizerKind> parsed;
  for (const auto& item : kinds.cast<py::list>())
    parsed.push_back(regularizer_from_name(item.cast<std::string>()));
  return RegularizerBundle(game, parsed);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "steering analysis for finite games with regularized learners";

  py::register_exception<GuardError>(m, "GuardError");
  py::register_exception<ParseError>(m, "SpecParseError");

  py::class_<StrategyProfile>(m, "StrategyProfile")
      .def(py::init([](std::vector<Vector> blocks) {
             StrategyProfile p;
             p.blocks = std::move(blocks);
             return p;
           }),
           py::arg("blocks"))
      .def_readwrite("blocks", &StrategyProfile::blocks)
      .def("flatten", &StrategyProfile::flatten)
      .def("is_interior", &StrategyProfile::is_interior,
           py::arg("eps") = kInteriorEpsilon);

  py::class_<FiniteGame>(m, "FiniteGame")
      .def_property_readonly("name", &FiniteGame::name)
      .def_property_readonly("num_learners", &FiniteGame::num_learners)
      .def_property_readonly("learner_actions", &FiniteGame::learner_actions)
      .def_property_readonly("controller_actions", &FiniteGame::controller_actions)
      .def_property_readonly("total_actions", &FiniteGame::total_actions)
      .def_property_readonly("tangent_dim", &FiniteGame::tangent_dim)
      .def("payoff_block", &FiniteGame::payoff_block, py::arg("learner"),
           py::arg("profile"))
      .def("stacked_payoff", &FiniteGame::stacked_payoff, py::arg("profile"))
      .def("expected_payoff", &FiniteGame::expected_payoff, py::arg("learner"),
           py::arg("profile"), py::arg("u"))
      .def("uniform_profile", &FiniteGame::uniform_profile)
      .def("unflatten", &FiniteGame::unflatten, py::arg("flat"));

  m.def("make_builtin",
        [](const std::string& name, const std::vector<double>& params) {
          return make_builtin(builtin_from_name(name), params);
        },
        py::arg("name"), py::arg("params") = std::vector<double>{});

  py::class_<RegularizerBundle>(m, "RegularizerBundle")
      .def(py::init(&make_bundle), py::arg("game"), py::arg("kinds"))
      .def_property_readonly("kinds",
                             [](const RegularizerBundle& b) {
                               std::vector<std::string> names;
                               for (RegularizerKind k : b.kinds())
                                 names.push_back(regularizer_name(k));
                               return names;
                             })
      .def("choice", &RegularizerBundle::choice, py::arg("z"))
      .def("mirror_inverse", &RegularizerBundle::mirror_inverse, py::arg("x"));

  m.def("parse_spec_text", [](const std::string& text) {
    ParsedSpec spec = parse_spec_text(text);
    py::dict defaults;
    defaults["dt"] = spec.defaults.dt;
    defaults["seed"] = spec.defaults.seed;
    defaults["lattice"] = spec.defaults.lattice;
    defaults["horizon"] = spec.defaults.horizon;
    defaults["horizon_count"] = spec.defaults.horizon_count;
    defaults["points"] = spec.defaults.points;
    defaults["depth"] = spec.defaults.depth;
    defaults["margin"] = spec.defaults.margin;
    return py::make_tuple(spec.game, spec.bundle, defaults);
  });

  m.def("eta_fields",
        [](const FiniteGame& game, const RegularizerBundle& bundle,
           const StrategyProfile& profile) {
          EtaFields fields = eta_fields(game, bundle, profile);
          py::dict d;
          d["drift"] = fields.drift;
          d["controls"] = fields.controls;
          return d;
        },
        py::arg("game"), py::arg("bundle"), py::arg("profile"));

  m.def("simulate",
        [](const FiniteGame& game, const RegularizerBundle& bundle,
           const StrategyProfile& x0,
           const std::vector<std::pair<Vector, double>>& schedule, double dt,
           int record_every, bool record_dual) {
          SimulateOptions opts{dt, record_every, record_dual};
          return trajectory_dict(simulate(game, bundle, x0, to_schedule(schedule),
                                          opts));
        },
        py::arg("game"), py::arg("bundle"), py::arg("x0"), py::arg("schedule"),
        py::arg("dt") = 1e-3, py::arg("record_every") = 10,
        py::arg("record_dual") = false);

  m.def("equivalence_check",
        [](const FiniteGame& game, const RegularizerBundle& bundle,
           const StrategyProfile& x0,
           const std::vector<std::pair<Vector, double>>& schedule, double dt) {
          SimulateOptions opts;
          opts.dt = dt;
          return equivalence_check(game, bundle, x0, to_schedule(schedule), opts);
        },
        py::arg("game"), py::arg("bundle"), py::arg("x0"), py::arg("schedule"),
        py::arg("dt") = 1e-3);

  m.def("two_player_verdict",
        [](const FiniteGame& game) { return report_dict(two_player_verdict(game)); },
        py::arg("game"));

  m.def("multi_player_verdict",
        [](const FiniteGame& game, const RegularizerBundle& bundle, int num_points,
           int depth, double probe_horizon, double dt, std::uint64_t seed) {
          return report_dict(multi_player_verdict(
              game, bundle, {num_points, depth, probe_horizon, dt, seed}));
        },
        py::arg("game"), py::arg("bundle"), py::arg("num_points") = 100,
        py::arg("depth") = 2, py::arg("probe_horizon") = 200.0,
        py::arg("dt") = 1e-3, py::arg("seed") = 42);

  m.def("monotone_witness",
        [](const FiniteGame& game) -> py::object {
          std::optional<MonotoneWitness> w = monotone_witness(game);
          if (!w) return py::none();
          py::dict d;
          d["w"] = w->w;
          d["slacks"] = w->slacks;
          d["degenerate"] = w->degenerate;
          return d;
        },
        py::arg("game"));

  m.def("witness_monotonicity",
        [](const FiniteGame& game, const RegularizerBundle& bundle, const Vector& w,
           int trials, double dt, std::uint64_t seed) {
          MonotonicityCheck check =
              witness_monotonicity(game, bundle, w, trials, dt, seed);
          py::dict d;
          d["most_negative_increment"] = check.most_negative_increment;
          d["trials_completed"] = check.trials_completed;
          d["trials_guarded"] = check.trials_guarded;
          return d;
        },
        py::arg("game"), py::arg("bundle"), py::arg("w"), py::arg("trials") = 100,
        py::arg("dt") = 1e-3, py::arg("seed") = 42);

  m.def("simplex_lattice", &simplex_lattice, py::arg("density"), py::arg("dim"));

  py::class_<PointCloud>(m, "PointCloud")
      .def_property_readonly("num_points",
                             [](const PointCloud& c) { return c.points.size(); })
      .def_readonly("guard_skipped", &PointCloud::guard_skipped)
      .def("to_matrix", [](const PointCloud& c) {
        int width = c.points.empty() ? 4 : 4 + static_cast<int>(c.points[0].x_flat.size());
        Matrix m(static_cast<long>(c.points.size()), width);
        for (std::size_t i = 0; i < c.points.size(); ++i) {
          const CloudPoint& p = c.points[i];
          long r = static_cast<long>(i);
          m(r, 0) = p.start_idx;
          m(r, 1) = p.u_idx;
          m(r, 2) = p.t_idx;
          m(r, 3) = p.t;
          m.row(r).tail(p.x_flat.size()) = p.x_flat.transpose();
        }
        return m;
      });

  m.def("attainable_cloud",
        [](const FiniteGame& game, const RegularizerBundle& bundle,
           const std::vector<StrategyProfile>& starts, int density, double horizon,
           int horizon_count, double dt) {
          return attainable_cloud(game, bundle, starts, density, horizon,
                                  horizon_count, dt);
        },
        py::arg("game"), py::arg("bundle"), py::arg("starts"), py::arg("density"),
        py::arg("horizon"), py::arg("horizon_count"), py::arg("dt") = 1e-3);

  m.def("coverage", &coverage, py::arg("cloud"), py::arg("resolution"));

  py::class_<SteeringPlan>(m, "SteeringPlan")
      .def_property_readonly("schedule",
                             [](const SteeringPlan& p) {
                               return from_schedule(p.schedule);
                             })
      .def_readonly("predicted_endpoint", &SteeringPlan::predicted_endpoint)
      .def_readonly("dual_displacement", &SteeringPlan::dual_displacement)
      .def_readonly("neutralizer", &SteeringPlan::neutralizer)
      .def_readonly("correction", &SteeringPlan::correction)
      .def_readonly("margin", &SteeringPlan::margin)
      .def_readonly("reached", &SteeringPlan::reached)
      .def_readonly("stalled", &SteeringPlan::stalled)
      .def_readonly("achieved_distance", &SteeringPlan::achieved_distance)
      .def_readonly("method", &SteeringPlan::method);

  m.def("plan_two_player", &plan_two_player, py::arg("game"), py::arg("bundle"),
        py::arg("x0"), py::arg("x_target"), py::arg("margin") = 0.1);

  m.def("verify_plan", &verify_plan, py::arg("game"), py::arg("bundle"),
        py::arg("x0"), py::arg("plan"), py::arg("dt") = 1e-3);

  m.def("greedy_steer_multi",
        [](const FiniteGame& game, const RegularizerBundle& bundle,
           const StrategyProfile& x0, const StrategyProfile& x_target,
           double segment_duration, int lattice_density, int max_segments, double dt,
           double tol_reach, int stall_limit) {
          GreedyOptions opts{segment_duration, lattice_density, max_segments,
                             dt,               tol_reach,       stall_limit};
          return greedy_steer_multi(game, bundle, x0, x_target, opts);
        },
        py::arg("game"), py::arg("bundle"), py::arg("x0"), py::arg("x_target"),
        py::arg("segment_duration") = 0.1, py::arg("lattice_density") = 10,
        py::arg("max_segments") = 400, py::arg("dt") = 1e-3,
        py::arg("tol_reach") = 1e-2, py::arg("stall_limit") = 10);

  m.def("lie_rank_sample",
        [](const FiniteGame& game, const RegularizerBundle& bundle, int num_points,
           int depth, bool include_drift, std::uint64_t seed) {
          return lie_dict(
              lie_rank_sample(game, bundle, num_points, depth, include_drift, seed));
        },
        py::arg("game"), py::arg("bundle"), py::arg("num_points") = 100,
        py::arg("depth") = 2, py::arg("include_drift") = false, py::arg("seed") = 42);

  m.def("neutralizer_lp",
        [](const Matrix& a) -> py::object {
          std::optional<NeutralizerCertificate> cert = neutralizer_lp(a);
          if (!cert) return py::none();
          return neutralizer_dict(*cert);
        },
        py::arg("a"));

  m.def("uniform_neutralizer",
        [](const FiniteGame& game) -> py::object {
          std::optional<NeutralizerCertificate> cert = uniform_neutralizer(game);
          if (!cert) return py::none();
          return neutralizer_dict(*cert);
        },
        py::arg("game"));

  m.def("projected_rank", [](const Matrix& a) {
    ProjectedRank pr = projected_rank(a);
    return py::make_tuple(pr.rank, pr.singular_values);
  });
}
