#include "steerftrl/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "steerftrl/artifacts.hpp"
#include "steerftrl/controllability.hpp"
#include "steerftrl/dynamics.hpp"
#include "steerftrl/game.hpp"
#include "steerftrl/gamespec.hpp"
#include "steerftrl/mirror.hpp"
#include "steerftrl/reachability.hpp"
#include "steerftrl/rng.hpp"
#include "steerftrl/steering.hpp"

namespace steerftrl {
namespace {

std::string trim_copy(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

Vector parse_number_list(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim_copy(tok);
    std::size_t used = 0;
    values.push_back(std::stod(tok, &used));
    if (used != tok.size()) throw DomainError("not a number: " + tok);
  }
  Vector v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i];
  return v;
}

// Profiles on the command line: blocks joined by ';', coordinates by ','.
StrategyProfile parse_profile_arg(const FiniteGame& game, const std::string& text) {
  StrategyProfile profile;
  std::istringstream in(text);
  std::string block;
  while (std::getline(in, block, ';'))
    profile.blocks.push_back(parse_number_list(block));
  game.validate_profile(profile);
  return profile;
}

// Schedule files: one "c1,...,cm duration" line per segment.
ControlSchedule parse_schedule_file(const FiniteGame& game, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open schedule file: " + path);
  ControlSchedule schedule;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    raw = trim_copy(raw);
    if (raw.empty()) continue;
    std::size_t split = raw.find_last_of(" \t");
    if (split == std::string::npos)
      throw ParseError("expected 'control duration'", line_no);
    ControlSegment segment;
    try {
      segment.u = parse_number_list(trim_copy(raw.substr(0, split)));
      std::string dur = trim_copy(raw.substr(split + 1));
      std::size_t used = 0;
      segment.duration = std::stod(dur, &used);
      if (used != dur.size()) throw DomainError("not a number: " + dur);
      game.validate_control(segment.u);
    } catch (const std::exception& err) {
      throw ParseError(err.what(), line_no);
    }
    schedule.push_back(segment);
  }
  if (schedule.empty()) throw ParseError("schedule file has no segments", 0);
  validate_schedule(game, schedule);
  return schedule;
}

std::string kinds_tag(const RegularizerBundle& bundle) {
  std::vector<RegularizerKind> kinds = bundle.kinds();
  bool uniform = true;
  for (RegularizerKind k : kinds)
    if (k != kinds[0]) uniform = false;
  if (uniform) return regularizer_name(kinds[0]);
  std::string tag;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (i) tag += '-';
    tag += regularizer_name(kinds[i]);
  }
  return tag;
}

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

void describe_game(const FiniteGame& game, const RegularizerBundle& bundle,
                   Report& report) {
  report.emplace_back("game", game.name());
  std::string actions;
  for (int i = 0; i < game.num_learners(); ++i) {
    if (i) actions += ',';
    actions += std::to_string(game.learner_actions()[i]);
  }
  report.emplace_back("learner_actions", actions);
  report.emplace_back("controller_actions",
                      std::to_string(game.controller_actions()));
  report.emplace_back("regularizers", kinds_tag(bundle));
}

void append_neutralizer(const std::optional<NeutralizerCertificate>& cert,
                        Report& report) {
  if (!cert) {
    report.emplace_back("neutralizer", "none");
    return;
  }
  report.emplace_back("neutralizer", format_vector(cert->u0));
  report.emplace_back("neutralizer_interiority", format_full(cert->interiority));
  report.emplace_back("neutralizer_residual", format_full(cert->residual));
  report.emplace_back("k_values", format_vector(cert->k_values));
}

void append_witness(const std::optional<MonotoneWitness>& witness, Report& report) {
  if (!witness) {
    report.emplace_back("witness", "none");
    return;
  }
  report.emplace_back("witness", format_vector(witness->w));
  report.emplace_back("witness_slacks", format_vector(witness->slacks));
  report.emplace_back("witness_degenerate", witness->degenerate ? "true" : "false");
}

void append_lie(const LieRankEvidence& lie, Report& report) {
  report.emplace_back("lie_target_rank", std::to_string(lie.target_rank));
  report.emplace_back("lie_min_rank", std::to_string(lie.min_rank));
  report.emplace_back("lie_depth", std::to_string(lie.depth));
  report.emplace_back("lie_num_fields", std::to_string(lie.num_fields));
  report.emplace_back("lie_points", std::to_string(lie.ranks.size()));
  report.emplace_back("lie_include_drift", lie.include_drift ? "true" : "false");
  report.emplace_back("lie_full_rank_everywhere",
                      lie.full_rank_everywhere ? "true" : "false");
}

struct CommonArgs {
  std::string spec_path;
  std::string out_dir = ".";
  double dt = 0;
  std::uint64_t seed = 0;
  bool dt_set = false;
  bool seed_set = false;
};

void apply_defaults(CommonArgs& args, const AnalysisDefaults& defaults) {
  if (!args.dt_set) args.dt = defaults.dt;
  if (!args.seed_set) args.seed = defaults.seed;
}

int cmd_analyze(const CommonArgs& args, int points, int depth, bool flags_set[2],
                double probe_horizon) {
  ParsedSpec spec = parse_spec_file(args.spec_path);
  CommonArgs eff = args;
  apply_defaults(eff, spec.defaults);
  if (!flags_set[0]) points = spec.defaults.points;
  if (!flags_set[1]) depth = spec.defaults.depth;

  Report report;
  describe_game(spec.game, spec.bundle, report);
  ControllabilityReport result =
      spec.game.num_learners() == 1
          ? two_player_verdict(spec.game)
          : multi_player_verdict(spec.game, spec.bundle,
                                 {points, depth, probe_horizon, eff.dt, eff.seed});
  report.emplace_back("verdict", verdict_name(result.verdict));
  report.emplace_back("theorem", std::to_string(result.theorem));
  append_neutralizer(result.neutralizer, report);
  if (result.rank >= 0) {
    report.emplace_back("rank", std::to_string(result.rank));
    report.emplace_back("singular_values", format_vector(result.singular_values));
  }
  if (result.verdict == Verdict::NotControllable)
    append_witness(result.witness, report);
  if (result.lie) append_lie(*result.lie, report);
  if (result.periodicity) {
    const PeriodicityEvidence& ev = *result.periodicity;
    report.emplace_back("periodic", ev.periodic ? "true" : "false");
    double worst = 0;
    for (double d : ev.return_distance) worst = std::max(worst, d);
    report.emplace_back("max_return_distance", format_full(worst));
    report.emplace_back("probe_points", std::to_string(ev.num_points));
    report.emplace_back("probe_horizon", format_full(ev.horizon));
    report.emplace_back("probe_guard_failures", std::to_string(ev.guard_failures));
  }
  if (!result.caveat.empty()) report.emplace_back("caveat", result.caveat);

  write_text(out_path(eff.out_dir, "report.txt"), render_report(report));
  std::cout << "verdict: " << verdict_name(result.verdict) << "\n";
  switch (result.verdict) {
    case Verdict::Controllable:
    case Verdict::SufficientConditionMet: return 0;
    case Verdict::NotControllable: return 2;
    case Verdict::Inconclusive: return 3;
  }
  return 1;
}

int cmd_simulate(const CommonArgs& args, const std::string& schedule_path,
                 const std::string& x0_text, bool dual) {
  ParsedSpec spec = parse_spec_file(args.spec_path);
  CommonArgs eff = args;
  apply_defaults(eff, spec.defaults);
  ControlSchedule schedule = parse_schedule_file(spec.game, schedule_path);
  StrategyProfile x0 = x0_text.empty() ? spec.game.uniform_profile()
                                       : parse_profile_arg(spec.game, x0_text);
  Trajectory trajectory =
      simulate(spec.game, spec.bundle, x0, schedule, {eff.dt, 10, dual});
  std::string path = out_path(eff.out_dir, "trajectory.csv");
  write_text(path, trajectory_csv(spec.game, trajectory, dual));
  std::cout << "samples: " << trajectory.times.size() << "\n";
  std::cout << "wrote: " << path << "\n";
  return 0;
}

int cmd_reach(const CommonArgs& args, int lattice, double horizon, int horizon_count,
              bool flags_set[3]) {
  ParsedSpec spec = parse_spec_file(args.spec_path);
  CommonArgs eff = args;
  apply_defaults(eff, spec.defaults);
  if (!flags_set[0]) lattice = spec.defaults.lattice;
  if (!flags_set[1]) horizon = spec.defaults.horizon;
  if (!flags_set[2]) horizon_count = spec.defaults.horizon_count;

  std::vector<StrategyProfile> starts;
  for (int s = 0; s < 3; ++s) {
    Rng rng = Rng::stream(eff.seed, 0x57a7, static_cast<std::uint64_t>(s));
    StrategyProfile x;
    for (int ni : spec.game.learner_actions())
      x.blocks.push_back(rng.interior_simplex_point(ni, 1e-2));
    starts.push_back(x);
  }

  PointCloud cloud = attainable_cloud(spec.game, spec.bundle, starts, lattice,
                                      horizon, horizon_count, eff.dt);
  std::string tag = kinds_tag(spec.bundle);
  std::string csv_path = out_path(eff.out_dir, "cloud_" + tag + ".csv");
  write_text(csv_path, cloud_csv(spec.game, cloud));

  Report report;
  describe_game(spec.game, spec.bundle, report);
  report.emplace_back("starts", std::to_string(starts.size()));
  report.emplace_back("lattice_density", std::to_string(lattice));
  report.emplace_back("horizon", format_full(horizon));
  report.emplace_back("horizon_count", std::to_string(horizon_count));
  report.emplace_back("dt", format_full(eff.dt));
  report.emplace_back("seed", std::to_string(eff.seed));
  report.emplace_back("points", std::to_string(cloud.points.size()));
  report.emplace_back("guard_skipped", std::to_string(cloud.guard_skipped));
  report.emplace_back("coverage_resolution", "20");
  report.emplace_back("coverage", format_full(coverage(cloud, 20)));
  write_text(out_path(eff.out_dir, "reach_report_" + tag + ".txt"),
             render_report(report));

  if (spec.game.num_learners() == 1 && spec.game.learner_actions()[0] == 3) {
    std::vector<Vector> pts;
    pts.reserve(cloud.points.size());
    for (const CloudPoint& p : cloud.points) pts.push_back(p.x_flat);
    std::vector<std::string> labels = spec.game.action_labels();
    if (labels.size() != 3) labels = {"a1", "a2", "a3"};
    write_text(out_path(eff.out_dir, "cloud_" + tag + ".svg"),
               ternary_svg(pts, labels));
  }
  std::cout << "points: " << cloud.points.size() << "\n";
  std::cout << "coverage(20): " << format_full(coverage(cloud, 20)) << "\n";
  std::cout << "wrote: " << csv_path << "\n";
  return 0;
}

int cmd_steer(const CommonArgs& args, const std::string& target_text,
              const std::string& x0_text, double margin, int lattice,
              bool flags_set[2]) {
  ParsedSpec spec = parse_spec_file(args.spec_path);
  CommonArgs eff = args;
  apply_defaults(eff, spec.defaults);
  if (!flags_set[0]) margin = spec.defaults.margin;
  if (!flags_set[1]) lattice = 10;

  StrategyProfile x0 = x0_text.empty() ? spec.game.uniform_profile()
                                       : parse_profile_arg(spec.game, x0_text);
  StrategyProfile target = parse_profile_arg(spec.game, target_text);

  SteeringPlan plan;
  if (spec.game.num_learners() == 1) {
    plan = plan_two_player(spec.game, spec.bundle, x0, target, margin);
  } else {
    GreedyOptions opts;
    opts.lattice_density = lattice;
    opts.dt = eff.dt;
    plan = greedy_steer_multi(spec.game, spec.bundle, x0, target, opts);
  }
  double error = verify_plan(spec.game, spec.bundle, x0, plan, eff.dt);

  Report report;
  describe_game(spec.game, spec.bundle, report);
  report.emplace_back("method", plan.method);
  report.emplace_back("margin", format_full(plan.margin));
  report.emplace_back("dual_displacement", format_vector(plan.dual_displacement));
  report.emplace_back("neutralizer", format_vector(plan.neutralizer));
  report.emplace_back("correction", format_vector(plan.correction));
  report.emplace_back("segments", std::to_string(plan.schedule.size()));
  double total = 0;
  for (const ControlSegment& seg : plan.schedule) total += seg.duration;
  report.emplace_back("total_duration", format_full(total));
  for (std::size_t k = 0; k < plan.schedule.size(); ++k) {
    report.emplace_back("segment_" + std::to_string(k + 1) + "_control",
                        format_vector(plan.schedule[k].u));
    report.emplace_back("segment_" + std::to_string(k + 1) + "_duration",
                        format_full(plan.schedule[k].duration));
  }
  report.emplace_back("predicted_endpoint",
                      format_vector(plan.predicted_endpoint.flatten()));
  report.emplace_back("reached", plan.reached ? "true" : "false");
  report.emplace_back("stalled", plan.stalled ? "true" : "false");
  if (plan.method == "greedy_receding_horizon")
    report.emplace_back("achieved_dual_distance", format_full(plan.achieved_distance));
  report.emplace_back("endpoint_error", format_full(error));
  write_text(out_path(eff.out_dir, "plan.txt"), render_report(report));
  std::cout << "segments: " << plan.schedule.size() << "\n";
  std::cout << "endpoint_error: " << format_full(error) << "\n";
  return 0;
}

int cmd_witness(const CommonArgs& args, int trials, bool trials_set) {
  ParsedSpec spec = parse_spec_file(args.spec_path);
  CommonArgs eff = args;
  apply_defaults(eff, spec.defaults);
  if (!trials_set) trials = spec.defaults.points;
  if (spec.game.num_learners() != 1)
    throw DomainError("witness certificates are defined for two-player games");

  std::optional<MonotoneWitness> witness = monotone_witness(spec.game);
  Report report;
  describe_game(spec.game, spec.bundle, report);
  append_witness(witness, report);
  if (witness) {
    MonotonicityCheck check =
        witness_monotonicity(spec.game, spec.bundle, witness->w, trials, eff.dt,
                             eff.seed);
    report.emplace_back("trials", std::to_string(trials));
    report.emplace_back("trials_completed", std::to_string(check.trials_completed));
    report.emplace_back("trials_guarded", std::to_string(check.trials_guarded));
    report.emplace_back("most_negative_increment",
                        format_full(check.most_negative_increment));
  }
  write_text(out_path(eff.out_dir, "witness.txt"), render_report(report));
  std::cout << "witness: " << (witness ? "found" : "none") << "\n";
  return 0;
}

int cmd_brackets(const CommonArgs& args, int points, int depth, bool include_drift,
                 bool flags_set[2]) {
  ParsedSpec spec = parse_spec_file(args.spec_path);
  CommonArgs eff = args;
  apply_defaults(eff, spec.defaults);
  if (!flags_set[0]) points = spec.defaults.points;
  if (!flags_set[1]) depth = spec.defaults.depth;

  LieRankEvidence lie = lie_rank_sample(spec.game, spec.bundle, points, depth,
                                        include_drift, eff.seed);
  Report report;
  describe_game(spec.game, spec.bundle, report);
  append_lie(lie, report);
  int worst = lie.ranks.empty() ? 0 : lie.ranks[0];
  double smallest = lie.smallest_retained.empty() ? 0 : lie.smallest_retained[0];
  for (std::size_t p = 0; p < lie.ranks.size(); ++p) {
    worst = std::min(worst, lie.ranks[p]);
    smallest = std::min(smallest, lie.smallest_retained[p]);
  }
  report.emplace_back("min_retained_singular_value", format_full(smallest));
  write_text(out_path(eff.out_dir, "brackets.txt"), render_report(report));
  std::cout << "min_rank: " << lie.min_rank << " target: " << lie.target_rank
            << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"steering analysis for games with regularized learners"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--spec", args.spec_path, "game spec file")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--dt", args.dt, "integration step")
        ->check(CLI::PositiveNumber)
        ->each([&](const std::string&) { args.dt_set = true; });
    cmd->add_option("--seed", args.seed, "random seed")->each([&](const std::string&) {
      args.seed_set = true;
    });
  };

  int points = 100;
  int depth = 2;
  double probe_horizon = 200.0;
  bool analyze_set[2] = {false, false};
  CLI::App* analyze = app.add_subcommand("analyze", "decide controllability");
  add_common(analyze);
  analyze->add_option("--points", points, "interior sample count")
      ->each([&](const std::string&) { analyze_set[0] = true; });
  analyze->add_option("--depth", depth, "bracket depth")
      ->each([&](const std::string&) { analyze_set[1] = true; });
  analyze->add_option("--probe-horizon", probe_horizon, "periodicity probe horizon");

  std::string schedule_path;
  std::string x0_text;
  bool dual = false;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "integrate a schedule");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--schedule", schedule_path, "schedule file")->required();
  simulate_cmd->add_option("--x0", x0_text, "start profile (blocks ';', coords ',')");
  simulate_cmd->add_flag("--dual", dual, "record dual coordinates");

  int lattice = 50;
  double horizon = 12.0;
  int horizon_count = 45;
  bool reach_set[3] = {false, false, false};
  CLI::App* reach = app.add_subcommand("reach", "sample the attainable set");
  add_common(reach);
  reach->add_option("--lattice", lattice, "control lattice density")
      ->each([&](const std::string&) { reach_set[0] = true; });
  reach->add_option("--horizon", horizon, "largest horizon")
      ->each([&](const std::string&) { reach_set[1] = true; });
  reach->add_option("--horizon-count", horizon_count, "number of horizons")
      ->each([&](const std::string&) { reach_set[2] = true; });

  std::string target_text;
  double margin = 0.1;
  int steer_lattice = 10;
  bool steer_set[2] = {false, false};
  CLI::App* steer = app.add_subcommand("steer", "synthesize a control schedule");
  add_common(steer);
  steer->add_option("--target", target_text, "target profile")->required();
  steer->add_option("--x0", x0_text, "start profile (defaults to uniform)");
  steer->add_option("--margin", margin, "interiority margin")
      ->each([&](const std::string&) { steer_set[0] = true; });
  steer->add_option("--lattice", steer_lattice, "greedy control lattice density")
      ->each([&](const std::string&) { steer_set[1] = true; });

  int trials = 100;
  bool trials_set = false;
  CLI::App* witness = app.add_subcommand("witness", "monotone witness certificate");
  add_common(witness);
  witness->add_option("--points", trials, "monotonicity trial count")
      ->each([&](const std::string&) { trials_set = true; });

  int b_points = 100;
  int b_depth = 2;
  bool include_drift = false;
  bool bracket_set[2] = {false, false};
  CLI::App* brackets = app.add_subcommand("brackets", "sampled Lie rank evidence");
  add_common(brackets);
  brackets->add_option("--points", b_points, "interior sample count")
      ->each([&](const std::string&) { bracket_set[0] = true; });
  brackets->add_option("--depth", b_depth, "bracket depth")
      ->each([&](const std::string&) { bracket_set[1] = true; });
  brackets->add_flag("--include-drift", include_drift, "add the drift field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (analyze->parsed())
      return cmd_analyze(args, points, depth, analyze_set, probe_horizon);
    if (simulate_cmd->parsed())
      return cmd_simulate(args, schedule_path, x0_text, dual);
    if (reach->parsed())
      return cmd_reach(args, lattice, horizon, horizon_count, reach_set);
    if (steer->parsed())
      return cmd_steer(args, target_text, x0_text, margin, steer_lattice, steer_set);
    if (witness->parsed()) return cmd_witness(args, trials, trials_set);
    if (brackets->parsed())
      return cmd_brackets(args, b_points, b_depth, include_drift, bracket_set);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  std::cerr << "error: no command\n";
  return 1;
}

}  // namespace steerftrl
