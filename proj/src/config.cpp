#include "frm/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "frm/errors.hpp"

namespace frm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size())
    throw ConfigError("config: key '" + key + "': expected a number, got '" + value + "'");
  return v;
}

long to_long(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size())
    throw ConfigError("config: key '" + key + "': expected an integer, got '" + value + "'");
  return v;
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError("config: key '" + key + "': empty list");
  return out;
}

FairKind to_fair_kind(const std::string& key, const std::string& value) {
  if (value == "rp" || value == "risk_parity") return FairKind::RiskParity;
  if (value == "crp" || value == "conditional_risk_parity") return FairKind::ConditionalRiskParity;
  throw ConfigError("config: key '" + key + "': expected rp or crp, got '" + value + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  bool saw_mode = false;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;

  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const std::string at = origin + ":" + std::to_string(lineno);

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(at + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "simulate" && section != "geometry" && section != "tabular" &&
          section != "audit")
        throw ConfigError(at + ": unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(at + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(at + ": empty key");

    if (section.empty()) {
      if (key == "mode") {
        saw_mode = true;
        if (value == "simulate") cfg.mode = Mode::Simulate;
        else if (value == "geometry") cfg.mode = Mode::Geometry;
        else if (value == "tabular") cfg.mode = Mode::Tabular;
        else if (value == "audit") cfg.mode = Mode::Audit;
        else throw ConfigError(at + ": unknown mode '" + value + "'");
      } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(to_long(key, value));
      } else if (key == "out") {
        cfg.out_dir = value;
      } else if (key == "workers") {
        cfg.workers = static_cast<int>(to_long(key, value));
        if (cfg.workers < 1) throw ConfigError(at + ": workers must be >= 1");
      } else {
        throw ConfigError(at + ": unknown key '" + key + "'");
      }
    } else if (section == "simulate") {
      auto& s = cfg.simulate;
      if (key == "p_minor") s.p_minor = to_double_list(key, value);
      else if (key == "reps") s.reps = static_cast<int>(to_long(key, value));
      else if (key == "n_train") s.n_train = static_cast<std::size_t>(to_long(key, value));
      else if (key == "n_test") s.n_test = static_cast<std::size_t>(to_long(key, value));
      else if (key == "iterations") s.iterations = static_cast<int>(to_long(key, value));
      else if (key == "eps_baseline") s.eps_baseline = to_double(key, value);
      else if (key == "eps_fair") s.eps_fair = to_double(key, value);
      else if (key == "bias") {
        if (value == "joint") s.bias = TrainBias::Joint;
        else if (value == "underrepresentation") s.bias = TrainBias::UnderRepresentation;
        else if (value == "resample") s.bias = TrainBias::Resample;
        else throw ConfigError(at + ": bias must be joint, underrepresentation or resample");
      } else if (key == "bias_group") s.bias_group = value;
      else if (key == "bias_label") s.bias_label = value;
      else if (key == "beta") s.beta = to_double_list(key, value);
      else throw ConfigError(at + ": unknown key '" + key + "' in [simulate]");
    } else if (section == "geometry") {
      auto& g = cfg.geometry;
      if (key == "fixture_dir") g.fixture_dir = value;
      else if (key == "sweep_points") g.sweep_points = static_cast<int>(to_long(key, value));
      else throw ConfigError(at + ": unknown key '" + key + "' in [geometry]");
    } else if (section == "tabular") {
      auto& t = cfg.tabular;
      if (key == "data") t.data_path = value;
      else if (key == "label") t.label_column = value;
      else if (key == "positive_label") t.positive_label = value;
      else if (key == "protected") t.protected_columns = split_list(value);
      else if (key == "numeric_features") t.numeric_features = split_list(value);
      else if (key == "categorical_features") t.categorical_features = split_list(value);
      else if (key == "reps") t.reps = static_cast<int>(to_long(key, value));
      else if (key == "iterations") t.iterations = static_cast<int>(to_long(key, value));
      else if (key == "eps_baseline") t.eps_baseline = to_double(key, value);
      else if (key == "eps_fair") t.eps_fair = to_double(key, value);
      else if (key == "train_ratio") t.train_ratio = to_double(key, value);
      else throw ConfigError(at + ": unknown key '" + key + "' in [tabular]");
    } else if (section == "audit") {
      auto& a = cfg.audit;
      if (key == "vertices") a.vertices_path = value;
      else if (key == "p_star") a.p_star_path = value;
      else if (key == "p_tilde") a.p_tilde_path = value;
      else if (key == "fair") a.fair = to_fair_kind(key, value);
      else throw ConfigError(at + ": unknown key '" + key + "' in [audit]");
    }
  }

  if (!saw_mode) throw ConfigError(origin + ": missing required key 'mode'");

  if (cfg.mode == Mode::Simulate) {
    const auto& s = cfg.simulate;
    if (s.reps < 1) throw ConfigError("config: [simulate] reps must be >= 1");
    if (s.iterations < 1) throw ConfigError("config: [simulate] iterations must be >= 1");
    if (s.n_train < 10 || s.n_test < 10)
      throw ConfigError("config: [simulate] n_train and n_test must be >= 10");
    for (double p : s.p_minor) {
      if (!(p > 0.0) || !(p <= 0.25))
        throw ConfigError("config: [simulate] p_minor entries must lie in (0, 0.25]");
    }
    for (double b : s.beta) {
      if (!(b >= 0.0) || !(b <= 1.0))
        throw ConfigError("config: [simulate] beta entries must lie in [0, 1]");
    }
    if (s.bias == TrainBias::UnderRepresentation &&
        (s.bias_group.empty() || s.bias_label.empty()))
      throw ConfigError("config: [simulate] bias_group and bias_label are required");
    if (s.eps_fair < 0.0 || s.eps_baseline < 0.0)
      throw ConfigError("config: [simulate] epsilons must be >= 0");
  } else if (cfg.mode == Mode::Geometry) {
    if (cfg.geometry.sweep_points < 3)
      throw ConfigError("config: [geometry] sweep_points must be >= 3");
  } else if (cfg.mode == Mode::Tabular) {
    const auto& t = cfg.tabular;
    if (t.data_path.empty())
      throw ConfigError(
          "config: [tabular] data is required: supply a CSV path (public tabular datasets must "
          "be downloaded separately; see README)");
    if (t.label_column.empty() || t.positive_label.empty())
      throw ConfigError("config: [tabular] label and positive_label are required");
    if (t.protected_columns.empty())
      throw ConfigError("config: [tabular] protected columns are required");
    if (t.numeric_features.empty() && t.categorical_features.empty())
      throw ConfigError("config: [tabular] at least one feature column is required");
    if (!(t.train_ratio > 0.0) || !(t.train_ratio < 1.0))
      throw ConfigError("config: [tabular] train_ratio must lie in (0, 1)");
    if (t.reps < 1 || t.iterations < 1)
      throw ConfigError("config: [tabular] reps and iterations must be >= 1");
  } else if (cfg.mode == Mode::Audit) {
    const auto& a = cfg.audit;
    if (a.vertices_path.empty() || a.p_star_path.empty() || a.p_tilde_path.empty())
      throw ConfigError("config: [audit] vertices, p_star and p_tilde paths are required");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

}  // namespace frm
