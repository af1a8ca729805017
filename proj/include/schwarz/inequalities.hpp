#pragma once

// Machine-checkable verdicts for the rearrangement inequality chain:
// polarization invariance, gradient-norm preservation along a polarization
// sequence, the generalized Polya-Szego inequality, the rearrangement
// inequality for couplings, and the equality-case probe.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "schwarz/functional.hpp"
#include "schwarz/rearrange.hpp"
#include "schwarz/report.hpp"

namespace schwarz {

struct ToleranceModel {
  double c_disc = 4.0;           // tol(h) = c_disc * h * (1 + |J|)
  double identity_rel = 1e-12;   // exact identities, relative
  double critical_guard = 0.05;  // max critical-set fraction of supp u* for translation claims
  double critical_grad = -1.0;   // epsilon_grad; negative means "use h"
  int translation_radius = 3;    // cells searched around the centroid offset

  double tol(double h, double magnitude) const { return c_disc * h * (1.0 + std::abs(magnitude)); }
};

namespace detail {

inline Json grid_meta(const GridSpec& s) {
  return {{"dim", s.dim}, {"M", s.cells}, {"L", s.extent}, {"h", s.spacing()}};
}

inline Json halfspace_meta(const HalfSpace& H) {
  Json n = Json::array();
  for (int a = 0; a < H.dim(); ++a) n.push_back(H.normal()[a]);
  return {{"normal", n}, {"offset", H.offset()}, {"grid_exact", H.grid_exact()}};
}

/// u translated by a lattice offset: (shift(u, x0))(x) = u(x - x0), zero outside.
inline GridFunction shift(const GridFunction& u, const Offset& by) {
  const GridSpec& spec = u.spec();
  std::vector<double> out(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Offset o = spec.offset(i);
    out[i] = u.value_at({o[0] - by[0], o[1] - by[1]});
  }
  return GridFunction(spec, std::move(out));
}

} // namespace detail

/// Number of reflection orbits {x, sigma x} of energy-carrying cells on which
/// polarization does not merely permute the (value, |grad|) pairs.
inline long orbit_mismatches(const GridFunction& u, const GridFunction& uh, const HalfSpace& H) {
  const GridSpec& spec = u.spec();
  std::set<Offset> reps;
  for_each_energy_cell(spec, [&](const Offset& o) {
    const Offset img = H.reflect(spec, o);
    reps.insert(H.contains(spec.center(o)) ? o : img);
  });
  long bad = 0;
  for (const Offset& x : reps) {
    const Offset y = H.reflect(spec, x);
    std::array<std::pair<double, double>, 2> before{
        std::pair{u.value_at(x), stencil_gradient(u, x)},
        std::pair{u.value_at(y), stencil_gradient(u, y)}};
    std::array<std::pair<double, double>, 2> after{
        std::pair{uh.value_at(x), stencil_gradient(uh, x)},
        std::pair{uh.value_at(y), stencil_gradient(uh, y)}};
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    if (before != after) ++bad;
  }
  return bad;
}

/// |J(u^H) - J(u)| <= 1e-12 (1 + |J(u)|), together with the orbit-wise form:
/// the multiset of (u, |grad u|) pairs on each reflection orbit is preserved.
inline Verdict verify_polarization_invariance(const GridFunction& u, const HalfSpace& H,
                                              const Integrand& j,
                                              const ToleranceModel& tm = {}) {
  if (!H.exact_on(u.spec()))
    throw HypothesisNotMet("polarization invariance is only asserted for grid-exact half-spaces");
  const GridFunction uh = polarize(u, H);
  const double before = evaluate_J(u, j);
  const double after = evaluate_J(uh, j);
  const long bad = orbit_mismatches(u, uh, H);
  Json meta = {{"grid", detail::grid_meta(u.spec())},
               {"integrand", j.name()},
               {"halfspace", detail::halfspace_meta(H)},
               {"orbit_mismatches", bad},
               {"equimeasurable", equimeasurable(u, uh)}};
  Verdict v = Verdict::make("polarization_invariance", after, before, std::abs(after - before),
                            tm.identity_rel * (1.0 + std::abs(before)), std::move(meta));
  v.pass = v.pass && bad == 0;
  return v;
}

/// The seminorm column of a grid-exact trace is constant to 1e-12 relative.
inline Verdict verify_gradient_preservation(const IterationTrace& trace,
                                            const ToleranceModel& tm = {}) {
  if (!trace.grid_exact)
    throw HypothesisNotMet(
        "gradient preservation is only asserted for grid-exact sequences; use gradient_drift_report");
  if (trace.rows.empty()) throw InvalidArgument("empty trace");
  double lo = trace.rows.front().seminorm, hi = lo;
  for (const auto& r : trace.rows) {
    lo = std::min(lo, r.seminorm);
    hi = std::max(hi, r.seminorm);
  }
  const double base = trace.rows.front().seminorm;
  Json meta = {{"steps", static_cast<int>(trace.rows.size()) - 1}, {"p", trace.p}};
  return Verdict::make("gradient_preservation", hi, lo, (hi - lo) / std::max(base, 1e-300),
                       tm.identity_rel, std::move(meta));
}

/// Drift of the seminorm column for any trace (interpolated sequences included).
inline Report gradient_drift_report(const IterationTrace& trace) {
  Report r;
  r.kind = "gradient_drift";
  Json col = Json::array();
  double base = trace.rows.empty() ? 0.0 : trace.rows.front().seminorm;
  double worst = 0.0;
  for (const auto& row : trace.rows) {
    col.push_back(row.seminorm);
    worst = std::max(worst, std::abs(row.seminorm - base) / std::max(base, 1e-300));
  }
  Check c;
  c.name = "relative_drift";
  c.indicative = true;
  c.worst_residual = worst;
  c.pass = true;
  r.checks.push_back(c);
  r.data["seminorm"] = col;
  r.data["grid_exact"] = trace.grid_exact;
  return r;
}

/// J(u*) <= J(u) + tol(h), and u* equimeasurable with u (exact multiset test).
inline Verdict verify_polya_szego(const GridFunction& u, const Integrand& j,
                                  const ToleranceModel& tm = {}) {
  if (!j.audited() || !j.flags().convex_in_t || !j.flags().nondecreasing_in_t)
    throw HypothesisNotMet("integrand '" + j.name() +
                           "' is not audited as convex and nondecreasing in t");
  const GridFunction us = schwarz_symmetrize(u);
  const double ju = evaluate_J(u, j);
  const double js = evaluate_J(us, j);
  const double h = u.spec().spacing();
  const bool same = equimeasurable(u, us);
  Json meta = {{"grid", detail::grid_meta(u.spec())},
               {"integrand", j.name()},
               {"equimeasurable", same},
               {"c_disc", tm.c_disc},
               {"lp_norm_u", lp_norm(u, j.p())},
               {"lp_norm_ustar", lp_norm(us, j.p())}};
  Verdict v = Verdict::make("polya_szego", js, ju, js - ju, tm.tol(h, ju), std::move(meta));
  v.pass = v.pass && same;
  return v;
}

template <class Range>
std::vector<GridFunction> symmetrize_all(const Range& us) {
  std::vector<GridFunction> out;
  for (const auto& u : us) out.push_back(schwarz_symmetrize(u));
  return out;
}

/// int F(|x|, u) <= int F(|x|, u*) + tol(h), u* componentwise.
inline Verdict verify_coupling_rearrangement(const std::vector<GridFunction>& us,
                                             const Coupling& F, const ToleranceModel& tm = {}) {
  if (!F.audited())
    throw HypothesisNotMet("coupling '" + F.name() + "' failed its supermodularity audit");
  const auto ss = symmetrize_all(us);
  const double lhs = evaluate_coupling(us, F);
  const double rhs = evaluate_coupling(ss, F);
  const double h = us.front().spec().spacing();
  Json meta = {{"grid", detail::grid_meta(us.front().spec())},
               {"coupling", F.name()},
               {"components", static_cast<int>(us.size())}};
  return Verdict::make("coupling_rearrangement", lhs, rhs, lhs - rhs, tm.tol(h, rhs),
                       std::move(meta));
}

struct TranslationFit {
  Offset offset{0, 0};
  double distance = 0.0;
};

/// min over lattice offsets x0 near the centroid offset of ||u - u*(. - x0)||_p.
inline TranslationFit best_translation(const GridFunction& u, const GridFunction& ustar, double p,
                                       int radius) {
  const GridSpec& spec = u.spec();
  double mass = 0.0;
  std::array<double, 2> centroid{0.0, 0.0};
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Offset o = spec.offset(i);
    mass += u[i];
    centroid[0] += u[i] * o[0];
    centroid[1] += u[i] * o[1];
  }
  Offset guess{0, 0};
  if (mass > 0.0)
    guess = {static_cast<int>(std::lround(centroid[0] / mass)),
             static_cast<int>(std::lround(centroid[1] / mass))};
  TranslationFit best{{0, 0}, lp_distance(u, ustar, p)};
  const int ry = spec.dim == 2 ? radius : 0;
  for (int a = -radius; a <= radius; ++a)
    for (int b = -ry; b <= ry; ++b) {
      const Offset x0{guess[0] + a, guess[1] + b};
      const double d = lp_distance(u, detail::shift(ustar, x0), p);
      if (d < best.distance) best = {x0, d};
    }
  return best;
}

/// Equality-case pipeline:
///  (a) |J(u) - J(u*)| <= tol(h);
///  (b) if so, | ||grad u||_p - ||grad u*||_p | <= tol(h);
///  (c) measure of {|grad u*| < eps_grad, 0 < u* < M} (critical set);
///  (d) best lattice translation x0 with u ~ u*(. - x0).
/// The translation conclusion is withheld when (c) exceeds the guard fraction
/// of the support of u*.
inline Report equality_case_probe(const GridFunction& u, const Integrand& j, double p,
                                  const ToleranceModel& tm = {}) {
  if (!j.flags().strictly_convex_in_t || !(j.nu() > 0.0) || !j.audited())
    throw HypothesisNotMet("equality probe needs an audited, strictly convex, coercive integrand");
  const GridSpec& spec = u.spec();
  const double h = spec.spacing();
  const GridFunction us = schwarz_symmetrize(u);

  Report r;
  r.kind = "equality_case_probe";
  r.data["grid"] = detail::grid_meta(spec);
  r.data["integrand"] = j.name();

  // (a)
  const double ju = evaluate_J(u, j), js = evaluate_J(us, j);
  Check a;
  a.name = "a_energy_equality";
  a.worst_residual = std::abs(ju - js);
  a.tolerance = tm.tol(h, ju);
  a.pass = a.worst_residual <= a.tolerance;
  r.checks.push_back(a);
  r.data["J_u"] = ju;
  r.data["J_ustar"] = js;

  // (b)
  const double gu = sobolev_seminorm(u, p), gs = sobolev_seminorm(us, p);
  Check b;
  b.name = "b_seminorm_equality";
  b.worst_residual = std::abs(gu - gs);
  b.tolerance = tm.tol(h, gu);
  b.pass = a.pass && b.worst_residual <= b.tolerance;
  if (!a.pass) b.note = "skipped: not an equality case";
  r.checks.push_back(b);

  // (c)
  const double eps_grad = tm.critical_grad > 0.0 ? tm.critical_grad : h;
  const double top = us.max();
  const double eps_val = 1e-9 * top;
  long critical = 0, support = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double v = us[i];
    if (v > 0.0) ++support;
    if (v > eps_val && v < top - eps_val && stencil_gradient(us, spec.offset(i)) < eps_grad)
      ++critical;
  }
  const double crit_measure = critical * spec.cell_volume();
  const double supp_measure = support * spec.cell_volume();
  const double fraction = supp_measure > 0.0 ? crit_measure / supp_measure : 0.0;
  Check c;
  c.name = "c_critical_set";
  c.worst_residual = fraction;
  c.tolerance = tm.critical_guard;
  c.pass = fraction <= tm.critical_guard;
  c.note = "fraction of supp u* where |grad u*| < eps_grad and 0 < u* < M";
  r.checks.push_back(c);
  r.data["critical_measure"] = crit_measure;
  r.data["support_measure"] = supp_measure;
  r.data["eps_grad"] = eps_grad;

  // (d)
  const TranslationFit fit = best_translation(u, us, p, tm.translation_radius);
  Json off = Json::array();
  for (int ax = 0; ax < spec.dim; ++ax) off.push_back(fit.offset[ax]);
  r.data["translation_offset"] = off;
  r.data["translation_distance"] = fit.distance;
  const double dtol = tm.tol(h, lp_norm(u, p));
  const bool matched = fit.distance <= dtol;
  Check d;
  d.name = "d_translation";
  d.worst_residual = fit.distance;
  d.tolerance = dtol;
  d.pass = matched && c.pass && a.pass && b.pass;
  d.indicative = true;
  if (!c.pass) d.note = "advisory: critical-set guard tripped, translation conclusion withheld";
  r.checks.push_back(d);

  std::string cls;
  if (!a.pass)
    cls = js < ju ? "strict inequality" : "inequality violated";
  else if (!b.pass)
    cls = "equality in J without seminorm equality";
  else if (!c.pass)
    cls = "equality, critical set too large: translation withheld";
  else if (matched)
    cls = "equality, translation recovered";
  else
    cls = "equality, no lattice translation found";
  r.data["classification"] = cls;
  r.data["translation_recovered"] = cls == "equality, translation recovered";
  r.notes.push_back(
      "strict convergence J(u_n) -> J(u*) => u_n -> u* in D^{1,p} is assumed for strictly convex "
      "coercive j, not verified");
  return r;
}

} // namespace schwarz
