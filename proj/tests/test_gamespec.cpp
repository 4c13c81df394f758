#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "steerftrl/gamespec.hpp"
#include "steerftrl/rng.hpp"
#include "test_helpers.hpp"

using namespace steerftrl;

TEST_CASE("builtin dispatch with the default regularizer") {
  ParsedSpec spec = parse_spec_text("[game]\nbuiltin: rps\nepsilon: 0.5\n");
  CHECK(spec.game.name() == "rps");
  CHECK(spec.game.num_learners() == 1);
  CHECK(spec.game.controller_actions() == 3);
  Matrix a = spec.game.payoff_block(0, spec.game.uniform_profile());
  CHECK(a(0, 0) == 0.5);
  CHECK(a(1, 1) == 0.5);
  CHECK(spec.bundle.part(0).kind() == RegularizerKind::NegEntropy);
  CHECK(spec.defaults.dt == 1e-3);
  CHECK(spec.defaults.seed == 42);
  CHECK(spec.defaults.lattice == 50);
  CHECK(spec.defaults.horizon == 12.0);
  CHECK(spec.defaults.horizon_count == 45);
  CHECK(spec.defaults.margin == 0.1);

  ParsedSpec plain = parse_spec_text("[game]\nbuiltin: rps\n");
  Matrix a0 = plain.game.payoff_block(0, plain.game.uniform_profile());
  CHECK(a0(0, 0) == 0.0);

  for (const char* name :
       {"modified_rps", "brockett", "regulated_matching_pennies"}) {
    ParsedSpec parsed =
        parse_spec_text(std::string("[game]\nbuiltin: ") + name + "\n");
    CHECK(parsed.game.name() == name);
  }
}

TEST_CASE("explicit tensors reproduce the builtin payoffs") {
  std::string text =
      "# a hand-written copy of the tilted cyclic game\n"
      "[game]\n"
      "learner_actions: 3\n"
      "controller_actions: 3\n"
      "shape_1: 3 3\n"
      "payoff_1: [[0.5,-1,1],[1,0.5,-1],[-1,1,0.5]]\n"
      "\n"
      "[learners]\n"
      "regularizer: neg_entropy\n";
  ParsedSpec spec = parse_spec_text(text);
  FiniteGame builtin = make_builtin(BuiltinGame::Rps, {0.5});
  Matrix got = spec.game.payoff_block(0, spec.game.uniform_profile());
  Matrix want = builtin.payoff_block(0, builtin.uniform_profile());
  CHECK((got - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parser reports shaped and located errors") {
  CHECK_THROWS_WITH_AS(parse_spec_text(""), "missing [game] section", ParseError);
  CHECK_THROWS_AS(parse_spec_text("x: 1\n"), ParseError);
  CHECK_THROWS_AS(parse_spec_text("[weird]\nx: 1\n"), ParseError);
  CHECK_THROWS_AS(parse_spec_text("[game\nbuiltin: rps\n"), ParseError);
  CHECK_THROWS_AS(parse_spec_text("[game]\n[game]\nbuiltin: rps\n"), ParseError);
  CHECK_THROWS_AS(parse_spec_text("[game]\nbuiltin: rps\nbuiltin: rps\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_spec_text("[game]\nno_colon_here\n"), ParseError);
  CHECK_THROWS_AS(parse_spec_text("[game]\nbuiltin:\n"), ParseError);
  CHECK_THROWS_AS(parse_spec_text("[game]\nbuiltin: no_such_game\n"), ParseError);
  CHECK_THROWS_AS(parse_spec_text("[game]\nbuiltin: rps\nmystery: 1\n"),
                  ParseError);
  CHECK_THROWS_AS(
      parse_spec_text("[game]\nbuiltin: rps\n[learners]\nregularizer: huber\n"),
      ParseError);

  try {
    parse_spec_text("[game]\nbuiltin: rps\nepsilon: 1.5\n");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.line() == 3);
    CHECK(std::string(err.what()).find("line 3") != std::string::npos);
  }

  CHECK_THROWS_AS(
      parse_spec_text("[game]\nbuiltin: brockett\nepsilon: 0.5\n"), ParseError);
  CHECK_THROWS_AS(parse_spec_text("[game]\nbuiltin: rps\nepsilon: fast\n"),
                  ParseError);
}

TEST_CASE("tensor shape mismatches name the offending entry") {
  std::string bad_shape =
      "[game]\n"
      "learner_actions: 3\n"
      "controller_actions: 3\n"
      "shape_1: 3 3\n"
      "payoff_1: [[0,1],[1,0],[0,0]]\n";
  try {
    parse_spec_text(bad_shape);
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(std::string(err.what()).find("payoff_1") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_spec_text("[game]\nlearner_actions: 3\n"
                                  "controller_actions: 3\n"
                                  "shape_1: 3 3\n"
                                  "payoff_1: [[0,1,2],[3,4,5],[6,7,not]]\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_spec_text("[game]\nlearner_actions: 3\n"
                                  "controller_actions: 3\n"),
                  ParseError);
}

TEST_CASE("per-learner regularizer overrides") {
  std::string text =
      "[game]\nbuiltin: brockett\n"
      "[learners]\n"
      "regularizer: neg_entropy\n"
      "regularizer_2: squared_norm\n";
  ParsedSpec spec = parse_spec_text(text);
  CHECK(spec.bundle.part(0).kind() == RegularizerKind::NegEntropy);
  CHECK(spec.bundle.part(1).kind() == RegularizerKind::SquaredNorm);
  CHECK(spec.bundle.part(2).kind() == RegularizerKind::NegEntropy);

  CHECK_THROWS_AS(parse_spec_text("[game]\nbuiltin: rps\n"
                                  "[learners]\nregularizer_2: squared_norm\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_spec_text("[game]\nbuiltin: rps\n"
                                  "[learners]\nregularizer_0: squared_norm\n"),
                  ParseError);
}

TEST_CASE("analysis overrides survive parsing") {
  std::string text =
      "[game]\nbuiltin: rps\n"
      "[analysis]\n"
      "dt: 0.01\n"
      "seed: 7\n"
      "lattice: 20\n"
      "horizon: 3.5\n"
      "horizon_count: 9\n"
      "points: 12\n"
      "depth: 3\n"
      "margin: 0.25\n";
  AnalysisDefaults d = parse_spec_text(text).defaults;
  CHECK(d.dt == 0.01);
  CHECK(d.seed == 7);
  CHECK(d.lattice == 20);
  CHECK(d.horizon == 3.5);
  CHECK(d.horizon_count == 9);
  CHECK(d.points == 12);
  CHECK(d.depth == 3);
  CHECK(d.margin == 0.25);

  CHECK_THROWS_AS(parse_spec_text("[game]\nbuiltin: rps\n[analysis]\nwat: 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_spec_text("[game]\nbuiltin: rps\n[analysis]\ndt: soon\n"),
                  ParseError);
}

TEST_CASE("emitting and reparsing preserves every builtin exactly") {
  AnalysisDefaults defaults;
  defaults.dt = 0.00125;
  defaults.seed = 99;
  defaults.horizon = 7.75;
  std::vector<std::pair<BuiltinGame, std::vector<double>>> cases = {
      {BuiltinGame::Rps, {0.5}},
      {BuiltinGame::Rps, {-0.9}},
      {BuiltinGame::ModifiedRps, {}},
      {BuiltinGame::Brockett, {}},
      {BuiltinGame::RegulatedMatchingPennies, {}},
  };
  for (const auto& [which, params] : cases) {
    FiniteGame game = make_builtin(which, params);
    std::vector<RegularizerKind> kinds(game.num_learners(),
                                       RegularizerKind::NegEntropy);
    if (kinds.size() > 1) kinds[1] = RegularizerKind::SquaredNorm;
    RegularizerBundle bundle(game, kinds);
    std::string text = emit_spec(game, bundle, defaults);
    ParsedSpec spec = parse_spec_text(text);

    CHECK(spec.game.name() == game.name());
    CHECK(spec.game.learner_actions() == game.learner_actions());
    CHECK(spec.game.controller_actions() == game.controller_actions());
    CHECK(spec.game.action_labels() == game.action_labels());
    for (int i = 0; i < game.num_learners(); ++i) {
      const std::vector<double>& got = spec.game.payoff(i).data();
      const std::vector<double>& want = game.payoff(i).data();
      REQUIRE(got.size() == want.size());
      for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == want[k]);
      CHECK(spec.bundle.part(i).kind() == bundle.part(i).kind());
    }
    CHECK(spec.defaults.dt == defaults.dt);
    CHECK(spec.defaults.seed == defaults.seed);
    CHECK(spec.defaults.horizon == defaults.horizon);
  }
}

TEST_CASE("multilinear payoffs survive an emit round trip at random profiles") {
  FiniteGame game = make_builtin(BuiltinGame::RegulatedMatchingPennies);
  RegularizerBundle bundle(game, RegularizerKind::NegEntropy);
  ParsedSpec spec = parse_spec_text(emit_spec(game, bundle, AnalysisDefaults{}));
  Rng rng(431);
  for (int t = 0; t < 25; ++t) {
    StrategyProfile x = testutil::random_interior_profile(game, rng, 1e-3);
    Matrix got = spec.game.payoff_block(1, x);
    Matrix want = game.payoff_block(1, x);
    CHECK((got - want).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("spec files come from disk with readable failure modes") {
  namespace fs = std::filesystem;
  fs::path dir = testutil::fresh_dir("gamespec");
  fs::path good = dir / "game.spec";
  testutil::write_file(good.string(), "[game]\nbuiltin: modified_rps\n");
  ParsedSpec spec = parse_spec_file(good.string());
  CHECK(spec.game.name() == "modified_rps");
  CHECK_THROWS_AS(parse_spec_file((dir / "absent.spec").string()), ParseError);
  fs::remove_all(dir);
}
