#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace schwarz {

using Json = nlohmann::ordered_json;

/// JSON has no inf/nan; encode them as strings so reports stay parseable.
inline Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

/// One machine-checkable claim. residual <= 0 means the inequality holds
/// outright; pass iff residual <= tolerance.
struct Verdict {
  std::string claim;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  Json meta = Json::object();

  static Verdict make(std::string claim, double lhs, double rhs, double residual,
                      double tolerance, Json meta = Json::object()) {
    Verdict v;
    v.claim = std::move(claim);
    v.lhs = lhs;
    v.rhs = rhs;
    v.residual = residual;
    v.tolerance = tolerance;
    v.pass = residual <= tolerance;
    v.meta = std::move(meta);
    return v;
  }

  Json to_json() const {
    Json j;
    j["claim"] = claim;
    j["lhs"] = number(lhs);
    j["rhs"] = number(rhs);
    j["residual"] = number(residual);
    j["tolerance"] = number(tolerance);
    j["pass"] = pass;
    j["meta"] = meta;
    return j;
  }
};

/// A single sampled hypothesis check inside a Report.
struct Check {
  std::string name;
  bool pass = true;
  double worst_residual = 0.0;  // largest violation seen; <= 0 when satisfied
  double tolerance = 0.0;
  bool indicative = false;      // reported, never gates Report::pass
  std::string note;

  Json to_json() const {
    Json j;
    j["name"] = name;
    j["pass"] = pass;
    j["worst_residual"] = number(worst_residual);
    j["tolerance"] = number(tolerance);
    j["indicative"] = indicative;
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

struct Report {
  std::string kind;
  std::vector<Check> checks;
  Json data = Json::object();
  std::vector<std::string> notes;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.indicative && !c.pass) return false;
    return true;
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  Json to_json() const {
    Json j;
    j["kind"] = kind;
    j["pass"] = pass();
    Json cs = Json::array();
    for (const auto& c : checks) cs.push_back(c.to_json());
    j["checks"] = cs;
    j["data"] = data;
    j["notes"] = notes;
    return j;
  }
};

} // namespace schwarz
