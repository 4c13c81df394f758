#pragma once

#include <cstdint>
#include <string>

#include "steerftrl/game.hpp"
#include "steerftrl/mirror.hpp"

namespace steerftrl {

// Tunables shared by the command-line front end, overridable per spec
// file in the [analysis] section and again by command flags.
struct AnalysisDefaults {
  double dt = 1e-3;
  std::uint64_t seed = 42;
  int lattice = 50;
  double horizon = 12.0;
  int horizon_count = 45;
  int points = 100;
  int depth = 2;
  double margin = 0.1;
};

struct ParsedSpec {
  FiniteGame game;
  RegularizerBundle bundle;
  AnalysisDefaults defaults;
};

// Parses the structured-text game description (sections [game],
// [learners], [analysis]; "key: value" lines, # comments). Errors cite
// the offending line and section.
ParsedSpec parse_spec_text(const std::string& text);
ParsedSpec parse_spec_file(const std::string& path);

// Renders a game plus regularizer choice back into spec text that
// parse_spec_text accepts, with custom games serialized as explicit
// payoff tensors.
std::string emit_spec(const FiniteGame& game, const RegularizerBundle& bundle,
                      const AnalysisDefaults& defaults);

}  // namespace steerftrl
