#pragma once

// Built-in integrands, couplings and constraint densities, addressable by
// strings of the form "name:key=value,key=value".

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "schwarz/functional.hpp"

namespace schwarz::presets {

struct PresetSpec {
  std::string name;
  std::map<std::string, std::string> params;

  double number(const std::string& key, double fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    std::istringstream is(it->second);
    double v = 0;
    is >> v;
    if (!is || !is.eof()) throw InvalidArgument("preset '" + name + "': bad value for " + key);
    return v;
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [k, v] : params) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) throw InvalidArgument("preset '" + name + "': unknown parameter '" + k + "'");
    }
  }
};

inline PresetSpec parse_spec(const std::string& s) {
  PresetSpec spec;
  const auto colon = s.find(':');
  spec.name = s.substr(0, colon);
  if (spec.name.empty()) throw InvalidArgument("empty preset name in '" + s + "'");
  if (colon == std::string::npos) return spec;
  std::istringstream is(s.substr(colon + 1));
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("preset parameter without '=': '" + item + "'");
    spec.params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Integrands. Every factory returns an instance that has been audited.

/// j = t^p.
inline Integrand power(double p) {
  if (!(p > 1.0)) throw InvalidArgument("power integrand requires p > 1");
  Integrand j("power:p=" + std::to_string(p), [p](double, double t) { return std::pow(t, p); },
              {true, true, true}, p, 1.0, p, [](double) { return 1.0; });
  return audited(j);
}

/// j = A(t) with A(t) = t^p + t^q, convex and increasing.
inline Integrand convex_a(double p, double q) {
  if (!(p > 1.0) || !(q >= 1.0)) throw InvalidArgument("convexa integrand requires p > 1, q >= 1");
  Integrand j("convexa:p=" + std::to_string(p) + ",q=" + std::to_string(q),
              [p, q](double, double t) { return std::pow(t, p) + std::pow(t, q); },
              {true, true, true}, p, 1.0, std::max(p, q));
  return audited(j);
}

/// j = b(s) A(t) with b(s) = 1 + |s|^q nondecreasing in |s| and A(t) = t^p.
inline Integrand split_ba(double p, double q) {
  if (!(p > 1.0) || !(q > 0.0)) throw InvalidArgument("splitba integrand requires p > 1, q > 0");
  Integrand j(
      "splitba:p=" + std::to_string(p) + ",q=" + std::to_string(q),
      [p, q](double s, double t) { return (1.0 + std::pow(std::abs(s), q)) * std::pow(t, p); },
      {true, true, true}, p, 1.0, p + q, [q](double s) { return 1.0 + std::pow(s, q); });
  return audited(j);
}

/// j = (1 + |s|^{2 alpha}) t^p / 2; scaling exponent p + 2 alpha.
inline Integrand quasilinear(double p, double alpha) {
  if (!(p > 1.0) || !(alpha > 0.0)) throw InvalidArgument("quasilinear integrand requires p > 1, alpha > 0");
  Integrand j(
      "quasilinear:p=" + std::to_string(p) + ",alpha=" + std::to_string(alpha),
      [p, alpha](double s, double t) {
        return 0.5 * (1.0 + std::pow(std::abs(s), 2.0 * alpha)) * std::pow(t, p);
      },
      {true, true, true}, p, 0.5, p + 2.0 * alpha,
      [alpha](double s) { return 0.5 * (1.0 + std::pow(s, 2.0 * alpha)); });
  return audited(j);
}

/// Custom integrand given as a rectilinear table of (s, t, j) samples and
/// evaluated by bilinear interpolation; linear extrapolation in t past the
/// last column, clamping in s.
///
/// IJ1 file layout: a line "IJ1 [p=<p>] [nu=<nu>] [alpha=<alpha>]", then rows "s t j".
inline Integrand table(std::istream& in, const std::string& name = "table") {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("IJ1: empty input");
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != "IJ1") throw FormatError("IJ1: missing magic 'IJ1'");
  double p = 2.0, nu = 0.0, alpha = 2.0;
  std::string kv;
  while (hs >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw FormatError("IJ1 header: bad token '" + kv + "'");
    const std::string k = kv.substr(0, eq);
    const double v = std::stod(kv.substr(eq + 1));
    if (k == "p") p = v;
    else if (k == "nu") nu = v;
    else if (k == "alpha") alpha = v;
    else throw FormatError("IJ1 header: unknown key '" + k + "'");
  }
  std::map<double, std::map<double, double>> rows;
  double s, t, v;
  while (in >> s >> t >> v) {
    if (s < 0 || t < 0) throw FormatError("IJ1: s and t must be nonnegative");
    rows[s][t] = v;
  }
  if (!in.eof()) throw FormatError("IJ1: malformed row");
  if (rows.size() < 1) throw FormatError("IJ1: no rows");
  std::vector<double> sv, tv;
  for (const auto& [sk, row] : rows) sv.push_back(sk);
  for (const auto& [tk, val] : rows.begin()->second) tv.push_back(tk);
  if (tv.size() < 2) throw FormatError("IJ1: need at least two t columns");
  std::vector<double> grid;
  for (const auto& [sk, row] : rows) {
    if (row.size() != tv.size()) throw FormatError("IJ1: rows must share the same t columns");
    std::size_t c = 0;
    for (const auto& [tk, val] : row) {
      if (tk != tv[c++]) throw FormatError("IJ1: rows must share the same t columns");
      grid.push_back(val);
    }
  }
  auto data = std::make_shared<std::vector<double>>(std::move(grid));
  auto fn = [sv, tv, data](double s_in, double t_in) {
    const double sa = std::clamp(std::abs(s_in), sv.front(), sv.back());
    auto bracket = [](const std::vector<double>& xs, double x) {
      std::size_t i = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
      i = std::clamp<std::size_t>(i, 1, xs.size() - 1);
      return i - 1;
    };
    const std::size_t nt = tv.size();
    auto at = [&](std::size_t si, double tq) {
      const std::size_t ti = bracket(tv, tq);
      const double w = (tq - tv[ti]) / (tv[ti + 1] - tv[ti]);
      const double a = (*data)[si * nt + ti], b = (*data)[si * nt + ti + 1];
      return a + w * (b - a);
    };
    if (sv.size() == 1) return at(0, t_in);
    const std::size_t si = bracket(sv, sa);
    const double w = (sa - sv[si]) / (sv[si + 1] - sv[si]);
    return (1.0 - w) * at(si, t_in) + w * at(si + 1, t_in);
  };
  // Flags are whatever the audit measures on the table's own range.
  Integrand probe(name, fn, {true, true, false}, p, nu, alpha);
  Sampler sm;
  sm.s_max = sv.back();
  sm.t_max = tv.back();
  const Report r = audit_integrand(probe, sm);
  IntegrandFlags flags{r.find("convex_in_t")->pass, r.find("nondecreasing_in_t")->pass,
                       r.find("strictly_convex_in_t")->pass};
  Integrand j(name, fn, flags, p, nu, alpha);
  return audited(j, sm);
}

inline Integrand table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open IJ1 file '" + path + "'");
  return table(in, "table:" + path);
}

inline Integrand integrand(const std::string& text) {
  const PresetSpec s = parse_spec(text);
  if (s.name == "power") {
    s.allow({"p"});
    return power(s.number("p", 2.0));
  }
  if (s.name == "convexa") {
    s.allow({"p", "q"});
    return convex_a(s.number("p", 2.0), s.number("q", 1.0));
  }
  if (s.name == "splitba") {
    s.allow({"p", "q"});
    return split_ba(s.number("p", 2.0), s.number("q", 1.0));
  }
  if (s.name == "quasilinear") {
    s.allow({"p", "alpha"});
    return quasilinear(s.number("p", 2.0), s.number("alpha", 1.0));
  }
  if (s.name == "table") {
    s.allow({"file"});
    return table_file(s.text("file", ""));
  }
  throw InvalidArgument("unknown integrand preset '" + s.name + "'");
}

// ---------------------------------------------------------------------------
// Couplings.

inline Coupling zero_coupling(int m) {
  CouplingParams P;
  P.alpha = std::numeric_limits<double>::infinity();
  Coupling F("zero", m, [](double, std::span<const double>) { return 0.0; }, P);
  F.set_identically_zero(true);
  F.mark_audited(true);
  return F;
}

/// F(r,s) = a(r)/(p+sigma) sum_k |s_k|^{p+sigma}
///        + 2 beta a(r)/(p+sigma) sum_{i<j} |s_i|^{(p+sigma)/2} |s_j|^{(p+sigma)/2}
/// with a(r) = scale (1+r)^{-tau}. The declared lower bound uses r0 = 1,
/// mu_k = scale 2^{-tau}/(p+sigma).
inline Coupling powerpair(int m, double p, double sigma, double beta, double tau,
                          double scale = 1.0) {
  if (m < 1) throw InvalidArgument("powerpair: m must be >= 1");
  if (!(p > 1.0) || !(sigma >= 0.0) || !(beta >= 0.0) || !(tau >= 0.0) || !(scale > 0.0))
    throw InvalidArgument("powerpair: need p > 1, sigma >= 0, beta >= 0, tau >= 0, scale > 0");
  const double q = p + sigma;
  auto fn = [q, beta, tau, scale](double r, std::span<const double> s) {
    const double a = scale * std::pow(1.0 + r, -tau);
    double diag = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      diag += std::pow(std::abs(s[i]), q);
      for (std::size_t k = i + 1; k < s.size(); ++k)
        cross += std::pow(std::abs(s[i]), q / 2) * std::pow(std::abs(s[k]), q / 2);
    }
    return a / q * diag + 2.0 * beta * a / q * cross;
  };
  CouplingParams P;
  P.p = p;
  P.sigma.assign(m, sigma);
  P.tau.assign(m, tau);
  P.r0 = tau > 0.0 ? 1.0 : 0.0;
  P.mu.assign(m, scale * std::pow(2.0, -tau) / q);
  if (tau == 0.0) P.mu.assign(m, scale / q);
  P.alpha = q;
  std::ostringstream name;
  name << "powerpair:p=" << p << ",sigma=" << sigma << ",beta=" << beta << ",tau=" << tau;
  if (scale != 1.0) name << ",scale=" << scale;
  return audited(Coupling(name.str(), m, fn, P));
}

/// F(r, s1, s2) = s1 s2 (m = 2).
inline Coupling product() {
  CouplingParams P;
  P.alpha = 2.0;
  return audited(Coupling("product", 2,
                          [](double, std::span<const double> s) { return s[0] * s[1]; }, P));
}

/// F(r, s) = a(r) s with a(r) = 2^{-r/length}, decreasing (m = 1). The weight
/// is a power of two at lattice radii that are multiples of length.
inline Coupling weighted(double length) {
  if (!(length > 0.0)) throw InvalidArgument("weighted: length must be positive");
  CouplingParams P;
  P.p = 1.0;
  P.alpha = 1.0;
  return audited(Coupling("weighted:length=" + std::to_string(length), 1,
                          [length](double r, std::span<const double> s) {
                            return std::exp2(-r / length) * s[0];
                          },
                          P));
}

inline Coupling coupling(const std::string& text, int m) {
  const PresetSpec s = parse_spec(text);
  if (s.name == "zero") {
    s.allow({});
    return zero_coupling(m);
  }
  if (s.name == "powerpair") {
    s.allow({"p", "sigma", "beta", "tau", "scale"});
    return powerpair(m, s.number("p", 2.0), s.number("sigma", 0.5), s.number("beta", 1.0),
                     s.number("tau", 0.0), s.number("scale", 1.0));
  }
  if (s.name == "product") {
    s.allow({});
    if (m != 2) throw InvalidArgument("product coupling needs m = 2");
    return product();
  }
  if (s.name == "weighted") {
    s.allow({"length"});
    if (m != 1) throw InvalidArgument("weighted coupling needs m = 1");
    return weighted(s.number("length", 1.0));
  }
  throw InvalidArgument("unknown coupling preset '" + s.name + "'");
}

// ---------------------------------------------------------------------------
// Constraint densities.

/// G(s) = weight |s|^p.
inline ConstraintDensity power_constraint(double p, double weight = 1.0) {
  if (!(p > 1.0) || !(weight > 0.0)) throw InvalidArgument("power constraint requires p > 1, weight > 0");
  return ConstraintDensity("power:p=" + std::to_string(p),
                           [p, weight](double s) { return weight * std::pow(std::abs(s), p); }, p,
                           weight);
}

inline ConstraintDensity constraint(const std::string& text) {
  const PresetSpec s = parse_spec(text);
  if (s.name == "power") {
    s.allow({"p", "weight"});
    return power_constraint(s.number("p", 2.0), s.number("weight", 1.0));
  }
  throw InvalidArgument("unknown constraint preset '" + s.name + "'");
}

} // namespace schwarz::presets
