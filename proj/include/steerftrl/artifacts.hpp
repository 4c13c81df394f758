#pragma once

#include <string>
#include <utility>
#include <vector>

#include "steerftrl/dynamics.hpp"
#include "steerftrl/game.hpp"
#include "steerftrl/reachability.hpp"

namespace steerftrl {

// All numeric output goes through one formatter (17 significant
// digits) so artifacts are byte-stable across runs.
std::string format_full(double v);
std::string format_vector(const Vector& v);

// Ordered key-value report document, one "key: value" line each.
using Report = std::vector<std::pair<std::string, std::string>>;
std::string render_report(const Report& report);
void write_text(const std::string& path, const std::string& text);

// Column names follow the flattened profile: x<learner>_<action>,
// both indices 1-based; dual columns z<learner>_<action> optional.
std::string trajectory_csv(const FiniteGame& game, const Trajectory& trajectory,
                           bool include_dual);

// start_idx, u_idx, t_idx, t, then the flattened profile columns.
std::string cloud_csv(const FiniteGame& game, const PointCloud& cloud);

// Equilateral-triangle scatter plot of three-action points; only
// meaningful for a single learner with three actions.
std::string ternary_svg(const std::vector<Vector>& points,
                        const std::vector<std::string>& corner_labels);

}  // namespace steerftrl
