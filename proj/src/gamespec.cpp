#include "steerftrl/gamespec.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace steerftrl {
namespace {

struct Entry {
  int line = 0;
  std::string value;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const Entry& e, const std::string& key) {
  try {
    std::size_t used = 0;
    double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument(e.value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("value of '" + key + "' is not a number: " + e.value, e.line);
  }
}

long long parse_int(const Entry& e, const std::string& key) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument(e.value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("value of '" + key + "' is not an integer: " + e.value, e.line);
  }
}

std::vector<int> parse_int_list(const Entry& e, const std::string& key) {
  std::string cleaned = e.value;
  for (char& ch : cleaned)
    if (ch == ',') ch = ' ';
  std::istringstream in(cleaned);
  std::vector<int> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError("value of '" + key + "' is not an integer list: " + e.value,
                       e.line);
    }
  }
  if (out.empty())
    throw ParseError("value of '" + key + "' is empty", e.line);
  return out;
}

void flatten_json(const nlohmann::json& node, const std::vector<int>& shape,
                  std::size_t depth, std::vector<double>& out, int line,
                  const std::string& key) {
  if (depth == shape.size()) {
    if (!node.is_number())
      throw ParseError("[game] " + key + ": expected a number at depth " +
                           std::to_string(depth),
                       line);
    out.push_back(node.get<double>());
    return;
  }
  if (!node.is_array() || static_cast<int>(node.size()) != shape[depth])
    throw ParseError("[game] " + key + ": expected an array of length " +
                         std::to_string(shape[depth]) + " at depth " +
                         std::to_string(depth),
                     line);
  for (const auto& child : node) flatten_json(child, shape, depth + 1, out, line, key);
}

Entry& require(Section& section, const std::string& name, const std::string& key) {
  auto it = section.find(key);
  if (it == section.end())
    throw ParseError("[" + name + "] section is missing the '" + key + "' key", 0);
  it->second.used = true;
  return it->second;
}

Entry* lookup(Section& section, const std::string& key) {
  auto it = section.find(key);
  if (it == section.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

void reject_unused(const Section& section, const std::string& name) {
  for (const auto& [key, entry] : section)
    if (!entry.used)
      throw ParseError("unknown key '" + key + "' in section [" + name + "]",
                       entry.line);
}

FiniteGame build_game(Section& game_section) {
  if (Entry* builtin = lookup(game_section, "builtin")) {
    std::vector<double> params;
    BuiltinGame which;
    try {
      which = builtin_from_name(builtin->value);
    } catch (const DomainError& err) {
      throw ParseError(err.what(), builtin->line);
    }
    Entry* eps = lookup(game_section, "epsilon");
    if (eps) {
      if (which != BuiltinGame::Rps)
        throw ParseError("'epsilon' only applies to the rps builtin", eps->line);
      params.push_back(parse_double(*eps, "epsilon"));
    }
    try {
      return make_builtin(which, params);
    } catch (const DomainError& err) {
      throw ParseError(err.what(), eps ? eps->line : builtin->line);
    }
  }

  Entry& learners = require(game_section, "game", "learner_actions");
  std::vector<int> learner_actions = parse_int_list(learners, "learner_actions");
  Entry& ctrl = require(game_section, "game", "controller_actions");
  int m = static_cast<int>(parse_int(ctrl, "controller_actions"));

  std::vector<PayoffTensor> payoffs;
  for (std::size_t i = 0; i < learner_actions.size(); ++i) {
    std::string tag = std::to_string(i + 1);
    Entry& shape_entry = require(game_section, "game", "shape_" + tag);
    std::vector<int> shape = parse_int_list(shape_entry, "shape_" + tag);
    Entry& payoff_entry = require(game_section, "game", "payoff_" + tag);
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(payoff_entry.value);
    } catch (const nlohmann::json::exception& err) {
      throw ParseError("[game] payoff_" + tag + ": " + err.what(),
                       payoff_entry.line);
    }
    std::vector<double> data;
    flatten_json(parsed, shape, 0, data, payoff_entry.line, "payoff_" + tag);
    try {
      payoffs.emplace_back(shape, std::move(data));
    } catch (const DomainError& err) {
      throw ParseError("[game] payoff_" + tag + ": " + err.what(),
                       payoff_entry.line);
    }
  }

  std::vector<std::string> labels;
  if (Entry* label_entry = lookup(game_section, "labels")) {
    std::istringstream in(label_entry->value);
    std::string tok;
    while (std::getline(in, tok, ',')) labels.push_back(trim(tok));
  }

  Entry* name_entry = lookup(game_section, "name");
  try {
    FiniteGame game(learner_actions, m, std::move(payoffs), labels);
    if (name_entry) game.set_name(name_entry->value);
    return game;
  } catch (const DomainError& err) {
    throw ParseError(std::string("[game] ") + err.what(), learners.line);
  }
}

std::vector<RegularizerKind> build_kinds(Section& section, const FiniteGame& game) {
  std::vector<RegularizerKind> kinds(game.num_learners(),
                                     RegularizerKind::NegEntropy);
  if (Entry* shared = lookup(section, "regularizer")) {
    try {
      std::fill(kinds.begin(), kinds.end(), regularizer_from_name(shared->value));
    } catch (const DomainError& err) {
      throw ParseError(err.what(), shared->line);
    }
  }
  for (int i = 0; i < game.num_learners(); ++i) {
    if (Entry* one = lookup(section, "regularizer_" + std::to_string(i + 1))) {
      try {
        kinds[i] = regularizer_from_name(one->value);
      } catch (const DomainError& err) {
        throw ParseError(err.what(), one->line);
      }
    }
  }
  for (const auto& [key, entry] : section)
    if (!entry.used && key.rfind("regularizer_", 0) == 0)
      throw ParseError("key '" + key + "' names a learner outside 1.." +
                           std::to_string(game.num_learners()),
                       entry.line);
  return kinds;
}

AnalysisDefaults build_defaults(Section& section) {
  AnalysisDefaults d;
  if (Entry* e = lookup(section, "dt")) d.dt = parse_double(*e, "dt");
  if (Entry* e = lookup(section, "seed"))
    d.seed = static_cast<std::uint64_t>(parse_int(*e, "seed"));
  if (Entry* e = lookup(section, "lattice"))
    d.lattice = static_cast<int>(parse_int(*e, "lattice"));
  if (Entry* e = lookup(section, "horizon")) d.horizon = parse_double(*e, "horizon");
  if (Entry* e = lookup(section, "horizon_count"))
    d.horizon_count = static_cast<int>(parse_int(*e, "horizon_count"));
  if (Entry* e = lookup(section, "points"))
    d.points = static_cast<int>(parse_int(*e, "points"));
  if (Entry* e = lookup(section, "depth"))
    d.depth = static_cast<int>(parse_int(*e, "depth"));
  if (Entry* e = lookup(section, "margin")) d.margin = parse_double(*e, "margin");
  return d;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_tensor(std::ostringstream& out, const PayoffTensor& tensor,
                 const std::vector<int>& shape, std::size_t depth,
                 std::vector<int>& index) {
  if (depth == shape.size()) {
    out << format_number(tensor.at(index));
    return;
  }
  out << '[';
  for (int i = 0; i < shape[depth]; ++i) {
    if (i) out << ',';
    index.push_back(i);
    emit_tensor(out, tensor, shape, depth + 1, index);
    index.pop_back();
  }
  out << ']';
}

}  // namespace

ParsedSpec parse_spec_text(const std::string& text) {
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_lines;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("malformed section header: " + line, line_no);
      current = line.substr(1, line.size() - 2);
      if (current != "game" && current != "learners" && current != "analysis")
        throw ParseError("unknown section [" + current + "]", line_no);
      if (sections.count(current))
        throw ParseError("duplicate section [" + current + "]", line_no);
      sections[current];
      section_lines[current] = line_no;
      continue;
    }
    if (current.empty())
      throw ParseError("content before the first section header", line_no);
    std::size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError("expected 'key: value' in section [" + current + "]",
                       line_no);
    std::string key = trim(line.substr(0, colon));
    std::string value = trim(line.substr(colon + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (value.empty())
      throw ParseError("key '" + key + "' has an empty value", line_no);
    auto [it, inserted] = sections[current].insert({key, Entry{line_no, value}});
    if (!inserted)
      throw ParseError("duplicate key '" + key + "' in section [" + current + "]",
                       line_no);
  }
  if (!sections.count("game")) throw ParseError("missing [game] section", 0);

  FiniteGame game = build_game(sections["game"]);
  Section learners_section =
      sections.count("learners") ? sections["learners"] : Section{};
  RegularizerBundle bundle(game, build_kinds(learners_section, game));
  AnalysisDefaults defaults;
  if (sections.count("analysis")) defaults = build_defaults(sections["analysis"]);

  reject_unused(sections["game"], "game");
  reject_unused(learners_section, "learners");
  if (sections.count("analysis")) reject_unused(sections["analysis"], "analysis");
  return ParsedSpec{std::move(game), std::move(bundle), defaults};
}

ParsedSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file: " + path, 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_spec_text(buffer.str());
}

std::string emit_spec(const FiniteGame& game, const RegularizerBundle& bundle,
                      const AnalysisDefaults& defaults) {
  std::ostringstream out;
  out << "[game]\n";
  out << "name: " << game.name() << "\n";
  out << "learner_actions:";
  for (int n : game.learner_actions()) out << ' ' << n;
  out << "\ncontroller_actions: " << game.controller_actions() << "\n";
  for (int i = 0; i < game.num_learners(); ++i) {
    const PayoffTensor& tensor = game.payoff(i);
    out << "shape_" << i + 1 << ':';
    for (int s : tensor.shape()) out << ' ' << s;
    out << "\npayoff_" << i + 1 << ": ";
    std::vector<int> index;
    emit_tensor(out, tensor, tensor.shape(), 0, index);
    out << "\n";
  }
  if (!game.action_labels().empty()) {
    out << "labels: ";
    for (std::size_t i = 0; i < game.action_labels().size(); ++i) {
      if (i) out << ',';
      out << game.action_labels()[i];
    }
    out << "\n";
  }
  out << "\n[learners]\n";
  for (int i = 0; i < bundle.num_learners(); ++i)
    out << "regularizer_" << i + 1 << ": " << regularizer_name(bundle.part(i).kind())
        << "\n";
  out << "\n[analysis]\n";
  out << "dt: " << format_number(defaults.dt) << "\n";
  out << "seed: " << defaults.seed << "\n";
  out << "lattice: " << defaults.lattice << "\n";
  out << "horizon: " << format_number(defaults.horizon) << "\n";
  out << "horizon_count: " << defaults.horizon_count << "\n";
  out << "points: " << defaults.points << "\n";
  out << "depth: " << defaults.depth << "\n";
  out << "margin: " << format_number(defaults.margin) << "\n";
  return out.str();
}

}  // namespace steerftrl
