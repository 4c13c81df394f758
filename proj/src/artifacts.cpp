#include "steerftrl/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace steerftrl {

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_vector(const Vector& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_full(v[i]);
  }
  return out;
}

std::string render_report(const Report& report) {
  std::string out;
  for (const auto& [key, value] : report) {
    out += key;
    out += ": ";
    out += value;
    out += '\n';
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open output file: " + path);
  out << text;
  if (!out) throw DomainError("failed writing output file: " + path);
}

namespace {

void append_profile_header(const FiniteGame& game, char prefix, std::string& out) {
  for (int i = 0; i < game.num_learners(); ++i)
    for (int a = 0; a < game.learner_actions()[i]; ++a) {
      out += ',';
      out += prefix;
      out += std::to_string(i + 1);
      out += '_';
      out += std::to_string(a + 1);
    }
}

void append_row_values(const Vector& v, std::string& out) {
  for (int i = 0; i < v.size(); ++i) {
    out += ',';
    out += format_full(v[i]);
  }
}

}  // namespace

std::string trajectory_csv(const FiniteGame& game, const Trajectory& trajectory,
                           bool include_dual) {
  if (include_dual && trajectory.dual.empty())
    throw DomainError("trajectory carries no dual samples");
  std::string out = "t";
  append_profile_header(game, 'x', out);
  if (include_dual) append_profile_header(game, 'z', out);
  out += '\n';
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    out += format_full(trajectory.times[k]);
    append_row_values(trajectory.primal[k].flatten(), out);
    if (include_dual) append_row_values(trajectory.dual[k], out);
    out += '\n';
  }
  return out;
}

std::string cloud_csv(const FiniteGame& game, const PointCloud& cloud) {
  std::string out = "start_idx,u_idx,t_idx,t";
  append_profile_header(game, 'x', out);
  out += '\n';
  for (const CloudPoint& p : cloud.points) {
    out += std::to_string(p.start_idx);
    out += ',';
    out += std::to_string(p.u_idx);
    out += ',';
    out += std::to_string(p.t_idx);
    out += ',';
    out += format_full(p.t);
    append_row_values(p.x_flat, out);
    out += '\n';
  }
  return out;
}

std::string ternary_svg(const std::vector<Vector>& points,
                        const std::vector<std::string>& corner_labels) {
  const double side = 560.0;
  const double pad = 40.0;
  const double height = side * std::sqrt(3.0) / 2.0;
  const double width = side + 2 * pad;
  const double total_height = height + 2 * pad;
  // Barycentric corners: coordinate 1 at bottom-left, 2 at bottom-right,
  // 3 at the apex.
  auto map_point = [&](const Vector& x) {
    double px = pad + side * (x[1] + 0.5 * x[2]);
    double py = pad + height * (1.0 - x[2]);
    return std::pair<double, double>(px, py);
  };

  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
                "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                width, total_height, width, total_height);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<polygon points=\"%.2f,%.2f %.2f,%.2f %.2f,%.2f\" fill=\"none\" "
                "stroke=\"#333333\" stroke-width=\"1\"/>\n",
                pad, pad + height, pad + side, pad + height, pad + side / 2, pad);
  out += buf;
  const char* anchors[3] = {"end", "start", "middle"};
  const double label_x[3] = {pad - 6, pad + side + 6, pad + side / 2};
  const double label_y[3] = {pad + height + 16, pad + height + 16, pad - 10};
  for (int c = 0; c < 3 && c < static_cast<int>(corner_labels.size()); ++c) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" "
                  "font-size=\"14\" text-anchor=\"%s\">%s</text>\n",
                  label_x[c], label_y[c], anchors[c], corner_labels[c].c_str());
    out += buf;
  }
  for (const Vector& x : points) {
    if (x.size() != 3) throw DomainError("ternary plots need three coordinates");
    auto [px, py] = map_point(x);
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"1.5\" fill=\"#1f77b4\" "
                  "fill-opacity=\"0.45\"/>\n",
                  px, py);
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace steerftrl
