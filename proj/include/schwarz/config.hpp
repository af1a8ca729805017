#pragma once

// Problem configuration files: "[section]" headers, "key = value" lines, and
// '#' comments. The integrand and constraint keys may repeat, one line per
// component; a single constraint line is shared by all components.
//
//   [grid]        dim, M, L
//   [problem]     p, integrand (repeatable), coupling, constraint (repeatable)
//   [flow]        step, max_iterations, symmetrize_every, stop_tolerance,
//                 stop_window, divergence_floor, seed, init

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "schwarz/gf1.hpp"
#include "schwarz/minimize.hpp"
#include "schwarz/presets.hpp"

namespace schwarz {

struct ProblemConfig {
  Problem problem;
  FlowOptions flow;
  std::vector<std::string> init_files;  // empty: Upsilon_1 start
  Json resolved = Json::object();
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <class T>
T config_number(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  T x{};
  is >> x;
  if (!is || !(is >> std::ws).eof())
    throw FormatError("config: bad value '" + v + "' for " + key);
  return x;
}

} // namespace detail

inline ProblemConfig parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;  // "section.key" -> value
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError("config line " + std::to_string(lineno) + ": bad section");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) + ": expected key = value");
    entries.emplace_back(section + "." + detail::trim(line.substr(0, eq)),
                         detail::trim(line.substr(eq + 1)));
  }

  int dim = 1, cells = 0;
  double extent = 0.0, p = 2.0;
  std::vector<std::string> integrands, constraints;
  std::string coupling = "zero";
  ProblemConfig cfg;
  FlowOptions& f = cfg.flow;
  std::string init = "upsilon";
  for (const auto& [key, v] : entries) {
    if (key == "grid.dim") dim = detail::config_number<int>(key, v);
    else if (key == "grid.M") cells = detail::config_number<int>(key, v);
    else if (key == "grid.L") extent = detail::config_number<double>(key, v);
    else if (key == "problem.p") p = detail::config_number<double>(key, v);
    else if (key == "problem.integrand") integrands.push_back(v);
    else if (key == "problem.constraint") constraints.push_back(v);
    else if (key == "problem.coupling") coupling = v;
    else if (key == "flow.step") f.step = detail::config_number<double>(key, v);
    else if (key == "flow.max_iterations") f.max_iterations = detail::config_number<int>(key, v);
    else if (key == "flow.symmetrize_every") f.symmetrize_every = detail::config_number<int>(key, v);
    else if (key == "flow.stop_tolerance") f.stop_tolerance = detail::config_number<double>(key, v);
    else if (key == "flow.stop_window") f.stop_window = detail::config_number<int>(key, v);
    else if (key == "flow.divergence_floor") f.divergence_floor = detail::config_number<double>(key, v);
    else if (key == "flow.seed") f.seed = detail::config_number<std::uint64_t>(key, v);
    else if (key == "flow.init") init = v;
    else throw FormatError("config: unknown key '" + key + "'");
  }
  if (integrands.empty()) throw FormatError("config: no [problem] integrand");
  const int m = static_cast<int>(integrands.size());
  if (constraints.empty()) constraints.push_back("power:p=" + std::to_string(p));
  if (constraints.size() == 1 && m > 1) constraints.assign(m, constraints.front());

  std::vector<Integrand> js;
  for (const auto& s : integrands) js.push_back(presets::integrand(s));
  std::vector<ConstraintDensity> gs;
  for (const auto& s : constraints) gs.push_back(presets::constraint(s));
  cfg.problem = Problem::make(GridSpec::make(dim, cells, extent), p, std::move(js),
                              presets::coupling(coupling, m), std::move(gs));
  if (init != "upsilon") {
    std::istringstream is(init);
    std::string path;
    while (std::getline(is, path, ',')) cfg.init_files.push_back(detail::trim(path));
    if (static_cast<int>(cfg.init_files.size()) != m)
      throw FormatError("config: flow.init needs one GF1 file per component");
  }
  f.validate();

  cfg.resolved = {{"grid", {{"dim", dim}, {"M", cells}, {"L", extent}}},
                  {"problem",
                   {{"p", p}, {"integrand", integrands}, {"coupling", coupling}, {"constraint", constraints}}},
                  {"flow",
                   {{"step", f.step},
                    {"max_iterations", f.max_iterations},
                    {"symmetrize_every", f.symmetrize_every},
                    {"stop_tolerance", f.stop_tolerance},
                    {"stop_window", f.stop_window},
                    {"divergence_floor", f.divergence_floor},
                    {"seed", f.seed},
                    {"init", init}}}};
  return cfg;
}

inline ProblemConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config '" + path + "'");
  return parse_config(in);
}

/// Starting state named by the config, or nullopt for the Upsilon_1 default.
inline std::optional<std::vector<GridFunction>> initial_from_config(const ProblemConfig& cfg) {
  if (cfg.init_files.empty()) return std::nullopt;
  std::vector<GridFunction> u;
  for (const auto& path : cfg.init_files) {
    u.push_back(gf1::read_file(path));
    if (!(u.back().spec() == cfg.problem.grid))
      throw FormatError("init file '" + path + "' is on a different grid than [grid]");
  }
  return u;
}

} // namespace schwarz
