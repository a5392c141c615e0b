#pragma once

#include <array>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "topp/pipeline.hpp"

namespace topp {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One problem per file: flat key/value text with array literals.
struct PlanConfig {
  std::string model_name;
  std::vector<Vec> control_points;  // exactly 4
  bool linear_orientation = false;
  Vec v_max, a_max;
  double sdot0 = 0.0;
  double sdote = 0.0;
  std::optional<double> epsilon;
  std::optional<std::array<double, 3>> sweep;  // [eps_min, eps_max, steps]
  int grid = 1000;
  double wheel_offset = 0.2;
  double velocity_cap = 100.0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_top_level(const std::string& body) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char ch : body) {
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!trim(cur).empty()) parts.push_back(trim(cur));
  return parts;
}

inline double parse_number(const std::string& tok, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw config_error("line " + std::to_string(line) + ": expected a number, got '" +
                       tok + "'");
  }
}

inline std::vector<double> parse_flat_array(const std::string& val, int line) {
  const std::string v = trim(val);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw config_error("line " + std::to_string(line) + ": expected an array literal");
  std::vector<double> out;
  for (const std::string& tok : split_top_level(v.substr(1, v.size() - 2)))
    out.push_back(parse_number(tok, line));
  return out;
}

inline std::vector<std::vector<double>> parse_nested_array(const std::string& val,
                                                           int line) {
  const std::string v = trim(val);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw config_error("line " + std::to_string(line) + ": expected an array literal");
  std::vector<std::vector<double>> out;
  for (const std::string& tok : split_top_level(v.substr(1, v.size() - 2)))
    out.push_back(parse_flat_array(tok, line));
  return out;
}

}  // namespace detail

inline PlanConfig parse_config(std::istream& in) {
  PlanConfig cfg;
  bool have_model = false, have_points = false, have_vmax = false, have_amax = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string s = detail::trim(raw);
    if (s.empty()) continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(line) + ": expected 'key = value'");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string val = detail::trim(s.substr(eq + 1));

    if (key == "model") {
      cfg.model_name = val;
      have_model = true;
    } else if (key == "control_points") {
      const auto rows = detail::parse_nested_array(val, line);
      if (rows.size() != 4)
        throw config_error("line " + std::to_string(line) +
                           ": control_points must list exactly 4 points");
      cfg.control_points.clear();
      for (const auto& r : rows) {
        if (r.empty())
          throw config_error("line " + std::to_string(line) + ": empty control point");
        Vec p(static_cast<int>(r.size()));
        for (int i = 0; i < p.size(); ++i) p[i] = r[static_cast<std::size_t>(i)];
        cfg.control_points.push_back(p);
      }
      for (const auto& p : cfg.control_points)
        if (p.size() != cfg.control_points[0].size())
          throw config_error("line " + std::to_string(line) +
                             ": control points must share one dimension");
      have_points = true;
    } else if (key == "orientation") {
      if (val != "linear")
        throw config_error("line " + std::to_string(line) +
                           ": orientation supports only 'linear'");
      cfg.linear_orientation = true;
    } else if (key == "v_max") {
      const auto a = detail::parse_flat_array(val, line);
      cfg.v_max = Eigen::Map<const Vec>(a.data(), static_cast<int>(a.size()));
      have_vmax = true;
    } else if (key == "a_max") {
      const auto a = detail::parse_flat_array(val, line);
      cfg.a_max = Eigen::Map<const Vec>(a.data(), static_cast<int>(a.size()));
      have_amax = true;
    } else if (key == "sdot0") {
      cfg.sdot0 = detail::parse_number(val, line);
    } else if (key == "sdote") {
      cfg.sdote = detail::parse_number(val, line);
    } else if (key == "epsilon") {
      cfg.epsilon = detail::parse_number(val, line);
    } else if (key == "sweep") {
      const auto a = detail::parse_flat_array(val, line);
      if (a.size() != 3)
        throw config_error("line " + std::to_string(line) +
                           ": sweep must be [eps_min, eps_max, steps]");
      cfg.sweep = {a[0], a[1], a[2]};
    } else if (key == "grid") {
      cfg.grid = static_cast<int>(detail::parse_number(val, line));
    } else if (key == "wheel_offset") {
      cfg.wheel_offset = detail::parse_number(val, line);
    } else if (key == "velocity_cap") {
      cfg.velocity_cap = detail::parse_number(val, line);
    } else {
      throw config_error("line " + std::to_string(line) + ": unknown field '" + key + "'");
    }
  }
  if (!have_model) throw config_error("missing required field 'model'");
  if (!have_points) throw config_error("missing required field 'control_points'");
  if (!have_vmax) throw config_error("missing required field 'v_max'");
  if (!have_amax) throw config_error("missing required field 'a_max'");
  if (cfg.sdot0 < 0.0 || cfg.sdote < 0.0)
    throw config_error("sdot0 and sdote must be >= 0");
  if (cfg.v_max.minCoeff() <= 0.0) throw config_error("v_max entries must be positive");
  if (cfg.a_max.minCoeff() <= 0.0) throw config_error("a_max entries must be positive");
  if (cfg.grid < 16) throw config_error("grid must be >= 16");
  return cfg;
}

inline PlanConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  return parse_config(in);
}

/// Model selection by name: `unit` (identity, any dim) or `diffcaster`.
inline Problem make_problem(const PlanConfig& cfg) {
  Problem prob;
  prob.path.control = {cfg.control_points[0], cfg.control_points[1],
                       cfg.control_points[2], cfg.control_points[3]};
  prob.path.linear_orientation = cfg.linear_orientation;
  if (cfg.model_name == "unit") {
    prob.model = KinematicModel::unit(prob.path.config_dim());
  } else if (cfg.model_name == "diffcaster") {
    if (prob.path.config_dim() != 3)
      throw config_error("diffcaster requires 2-D control points with orientation = linear");
    prob.model = KinematicModel::diff_caster(cfg.wheel_offset);
  } else {
    throw config_error("unknown model '" + cfg.model_name + "'");
  }
  if (cfg.v_max.size() != prob.model.actuator_dim || cfg.a_max.size() != prob.model.actuator_dim)
    throw config_error("v_max/a_max must have one entry per actuator (" +
                       std::to_string(prob.model.actuator_dim) + ")");
  prob.limits = {cfg.v_max, cfg.a_max};
  prob.sdot_start = cfg.sdot0;
  prob.sdot_end = cfg.sdote;
  prob.grid = cfg.grid;
  prob.velocity_cap = cfg.velocity_cap;
  return prob;
}

}  // namespace topp
