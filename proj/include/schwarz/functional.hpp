#pragma once

// Integrands j(s,t), couplings F(r, s_1..s_m), constraint densities G_k(s),
// the integrals built from them, and sampled audits of their structural
// hypotheses (convexity, monotonicity, coercivity, sign, scaling,
// supermodularity, ...).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schwarz/grid.hpp"
#include "schwarz/report.hpp"

namespace schwarz {

struct IntegrandFlags {
  bool convex_in_t = false;
  bool nondecreasing_in_t = false;
  bool strictly_convex_in_t = false;
};

/// Lagrangian j(s,t), s the function value and t the gradient magnitude.
class Integrand {
public:
  using Fn = std::function<double(double, double)>;

  Integrand() = default;
  Integrand(std::string name, Fn fn, IntegrandFlags flags, double p, double nu, double alpha,
            std::function<double(double)> majorant = {})
      : name_(std::move(name)), fn_(std::move(fn)), flags_(flags), p_(p), nu_(nu),
        alpha_(alpha), majorant_(std::move(majorant)) {}

  double operator()(double s, double t) const { return fn_(s, t); }

  const std::string& name() const { return name_; }
  const IntegrandFlags& flags() const { return flags_; }
  /// Exponent of the coercivity / growth bounds nu t^p <= j <= beta(s) t^p.
  double p() const { return p_; }
  double nu() const { return nu_; }
  /// Scaling exponent: j(ts, t xi) <= t^alpha j(s, xi) for t >= 1.
  double alpha() const { return alpha_; }
  const std::function<double(double)>& majorant() const { return majorant_; }

  bool audited() const { return audited_; }
  void mark_audited(bool ok) { audited_ = ok; }

private:
  std::string name_;
  Fn fn_;
  IntegrandFlags flags_;
  double p_ = 2.0;
  double nu_ = 0.0;
  double alpha_ = 2.0;
  std::function<double(double)> majorant_;
  bool audited_ = false;
};

/// Declared constants of the lower bound
///   F(r,s) >= sum_k mu_k r^{-tau_k} s_k^{sigma_k + p}  for r > r0, |s| <= delta
/// and of the superhomogeneity F(r, t s) >= t^alpha F(r, s).
struct CouplingParams {
  double p = 2.0;
  std::vector<double> sigma;
  std::vector<double> tau;
  std::vector<double> mu;
  double r0 = 0.0;
  double delta = std::numeric_limits<double>::infinity();
  double alpha = 2.0;
};

/// Coupling nonlinearity F(r, s_1, ..., s_m).
class Coupling {
public:
  using Fn = std::function<double(double, std::span<const double>)>;

  Coupling() = default;
  Coupling(std::string name, int components, Fn fn, CouplingParams params)
      : name_(std::move(name)), m_(components), fn_(std::move(fn)), params_(std::move(params)) {}

  double operator()(double r, std::span<const double> s) const { return fn_(r, s); }

  const std::string& name() const { return name_; }
  int components() const { return m_; }
  const CouplingParams& params() const { return params_; }
  bool identically_zero() const { return zero_; }
  void set_identically_zero(bool z) { zero_ = z; }

  bool audited() const { return audited_; }
  void mark_audited(bool ok) { audited_ = ok; }

private:
  std::string name_;
  int m_ = 1;
  Fn fn_;
  CouplingParams params_;
  bool zero_ = false;
  bool audited_ = false;
};

/// p-homogeneous constraint density with G(s) >= gamma |s|^p.
class ConstraintDensity {
public:
  ConstraintDensity() = default;
  ConstraintDensity(std::string name, std::function<double(double)> fn, double p, double gamma)
      : name_(std::move(name)), fn_(std::move(fn)), p_(p), gamma_(gamma) {}

  double operator()(double s) const { return fn_(s); }
  const std::string& name() const { return name_; }
  double p() const { return p_; }
  double gamma() const { return gamma_; }

private:
  std::string name_;
  std::function<double(double)> fn_;
  double p_ = 2.0;
  double gamma_ = 1.0;
};

/// Sampling ranges for the hypothesis audits.
struct Sampler {
  double s_max = 10.0;
  double t_max = 10.0;
  int grid = 64;
  int random = 1000;
  std::uint64_t seed = 1;
  double scale_max = 10.0;  // t in [1, scale_max] for the scaling inequalities
  double r_max = 10.0;
  int dim = 1;              // N, enters the growth exponent p + p^2/N
};

// ---------------------------------------------------------------------------
// Integrals

/// J(u) = sum over box and halo of j(u_i, |grad u|_i) h^N.
template <SampledField F>
double evaluate_J(const F& u, const Integrand& j) {
  std::vector<double> terms;
  for_each_energy_cell(u.spec(), [&](const Offset& o) {
    terms.push_back(j(u.value_at(o), stencil_gradient(u, o)));
  });
  const double total = detail::pairwise_sum(terms) * u.spec().cell_volume();
  if (!std::isfinite(total))
    throw NumericalFailure("evaluate_J: non-finite accumulation for integrand '" + j.name() + "'");
  return total;
}

namespace detail {

template <SampledField F>
void require_same_grid(std::span<const F> us, const char* op) {
  if (us.empty()) throw InvalidArgument(std::string(op) + ": no components");
  for (const auto& u : us)
    if (!(u.spec() == us.front().spec()))
      throw InvalidArgument(std::string(op) + ": components live on different grids");
}

inline double radius(const Point& x, int dim) { return std::sqrt(dot(x, x, dim)); }

} // namespace detail

/// sum_i F(|x_i|, u_1(x_i), ..., u_m(x_i)) h^N.
template <SampledField F>
double evaluate_coupling(std::span<const F> us, const Coupling& coupling) {
  detail::require_same_grid(us, "evaluate_coupling");
  if (static_cast<int>(us.size()) != coupling.components())
    throw InvalidArgument("evaluate_coupling: coupling expects " +
                          std::to_string(coupling.components()) + " components, got " +
                          std::to_string(us.size()));
  const GridSpec& spec = us.front().spec();
  std::vector<double> terms(spec.size());
  std::vector<double> s(us.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (std::size_t k = 0; k < us.size(); ++k) s[k] = us[k].values()[i];
    terms[i] = coupling(detail::radius(spec.center(i), spec.dim), s);
  }
  const double total = detail::pairwise_sum(terms) * spec.cell_volume();
  if (!std::isfinite(total)) throw NumericalFailure("evaluate_coupling: non-finite accumulation");
  return total;
}

template <SampledField F>
double evaluate_coupling(const std::vector<F>& us, const Coupling& coupling) {
  return evaluate_coupling(std::span<const F>(us), coupling);
}

/// sum_k sum_i G_k(u_k(x_i)) h^N.
template <SampledField F>
double evaluate_constraint(std::span<const F> us, std::span<const ConstraintDensity> gs) {
  detail::require_same_grid(us, "evaluate_constraint");
  if (us.size() != gs.size())
    throw InvalidArgument("evaluate_constraint: " + std::to_string(gs.size()) +
                          " densities for " + std::to_string(us.size()) + " components");
  std::vector<double> terms;
  for (std::size_t k = 0; k < us.size(); ++k)
    for (double v : us[k].values()) terms.push_back(gs[k](v));
  const double total = detail::pairwise_sum(terms) * us.front().spec().cell_volume();
  if (!std::isfinite(total)) throw NumericalFailure("evaluate_constraint: non-finite accumulation");
  return total;
}

template <SampledField F>
double evaluate_constraint(const std::vector<F>& us, const std::vector<ConstraintDensity>& gs) {
  return evaluate_constraint(std::span<const F>(us), std::span<const ConstraintDensity>(gs));
}

// ---------------------------------------------------------------------------
// Audits

namespace detail {

/// Running worst violation of a family of sampled inequalities lhs <= rhs.
struct Worst {
  double residual = -std::numeric_limits<double>::infinity();
  bool ok = true;
  long samples = 0;

  /// Records lhs <= rhs up to a relative tolerance tol * (1 + |lhs| + |rhs|).
  void le(double lhs, double rhs, double tol) {
    ++samples;
    const double r = lhs - rhs;
    if (!std::isfinite(r)) {
      ok = false;
      residual = std::numeric_limits<double>::infinity();
      return;
    }
    residual = std::max(residual, r);
    if (r > tol * (1.0 + std::abs(lhs) + std::abs(rhs))) ok = false;
  }

  Check check(std::string name, double tol, bool indicative = false, std::string note = {}) const {
    Check c;
    c.name = std::move(name);
    c.pass = ok;
    c.worst_residual = samples ? residual : 0.0;
    c.tolerance = tol;
    c.indicative = indicative;
    c.note = std::move(note);
    return c;
  }
};

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

} // namespace detail

inline constexpr double kAuditTolerance = 1e-12;

/// Sampled check of the hypotheses used by the rearrangement inequalities and
/// by the minimization problem. Failures are data: each hypothesis becomes a
/// Check; checks for flags the integrand does not declare are indicative.
inline Report audit_integrand(const Integrand& j, const Sampler& sampler = {}) {
  const double tol = kAuditTolerance;
  const auto ss = detail::linspace(0.0, sampler.s_max, sampler.grid);
  const auto ts = detail::linspace(0.0, sampler.t_max, sampler.grid);
  std::mt19937_64 rng(sampler.seed);
  std::uniform_real_distribution<double> us(0.0, sampler.s_max), ut(0.0, sampler.t_max),
      ul(1.0, sampler.scale_max);

  detail::Worst convex, monotone, coercive, sign, scaling, nonneg, majorant;
  double min_strict_gap = std::numeric_limits<double>::infinity();
  double alpha_needed = -std::numeric_limits<double>::infinity();

  auto midpoint = [&](double s, double a, double b) {
    const double ja = j(s, a), jb = j(s, b), jm = j(s, 0.5 * (a + b));
    convex.le(jm, 0.5 * (ja + jb), tol);
    if (a != b) {
      const double gap = (0.5 * (ja + jb) - jm) / (1.0 + std::abs(ja) + std::abs(jb));
      min_strict_gap = std::min(min_strict_gap, gap);
    }
    const double lo = std::min(a, b), hi = std::max(a, b);
    monotone.le(j(s, lo), j(s, hi), tol);
  };
  auto pointwise = [&](double s, double t, double lambda) {
    const double v = j(s, t);
    nonneg.le(0.0, v, tol);
    coercive.le(j.nu() * std::pow(t, j.p()), v, tol);
    if (s > 0.0) sign.le(j(s, t), j(-s, t), tol);
    const double scaled = j(lambda * s, lambda * t);
    scaling.le(scaled, std::pow(lambda, j.alpha()) * v, tol);
    if (v > 0.0 && scaled > 0.0 && lambda > 1.0)
      alpha_needed = std::max(alpha_needed, std::log(scaled / v) / std::log(lambda));
    if (j.majorant()) majorant.le(v, j.majorant()(std::abs(s)) * std::pow(t, j.p()), tol);
  };

  const auto lambdas = detail::linspace(1.0, sampler.scale_max, 8);
  for (double s : ss) {
    for (std::size_t a = 0; a < ts.size(); ++a)
      for (std::size_t b = a; b < ts.size(); ++b) midpoint(s, ts[a], ts[b]);
    for (double t : ts)
      for (double l : lambdas) pointwise(s, t, l);
  }
  for (int i = 0; i < sampler.random; ++i) {
    const double s = us(rng);
    midpoint(s, ut(rng), ut(rng));
    pointwise(s, ut(rng), ul(rng));
  }

  const IntegrandFlags& f = j.flags();
  Report r;
  r.kind = "audit_integrand";
  r.checks.push_back(convex.check("convex_in_t", tol, !f.convex_in_t));
  r.checks.push_back(monotone.check("nondecreasing_in_t", tol, !f.nondecreasing_in_t));
  {
    Check c;
    c.name = "strictly_convex_in_t";
    c.pass = min_strict_gap > 0.0 && convex.ok;
    c.worst_residual = -min_strict_gap;
    c.tolerance = 0.0;
    c.indicative = !f.strictly_convex_in_t;
    c.note = "smallest normalized midpoint gap over sampled t1 != t2";
    r.checks.push_back(c);
  }
  r.checks.push_back(coercive.check("coercivity", tol, j.nu() <= 0.0, "nu t^p <= j(s,t)"));
  r.checks.push_back(sign.check("sign_condition", tol, false, "j(|s|,t) <= j(-|s|,t)"));
  r.checks.push_back(
      scaling.check("alpha_scaling", tol, false, "j(ls, lt) <= l^alpha j(s,t), l in [1, scale_max]"));
  r.checks.push_back(nonneg.check("nonnegative", tol));
  if (j.majorant())
    r.checks.push_back(majorant.check("growth_majorant", tol, false, "j(s,t) <= beta(|s|) t^p"));

  r.data["integrand"] = j.name();
  r.data["declared"] = {{"convex_in_t", f.convex_in_t},
                        {"nondecreasing_in_t", f.nondecreasing_in_t},
                        {"strictly_convex_in_t", f.strictly_convex_in_t},
                        {"p", j.p()},
                        {"nu", j.nu()},
                        {"alpha", j.alpha()}};
  r.data["alpha_estimate"] = number(alpha_needed);
  r.data["j00"] = number(j(0.0, 0.0));
  r.data["sampler"] = {{"s_max", sampler.s_max}, {"t_max", sampler.t_max},
                       {"grid", sampler.grid},   {"random", sampler.random},
                       {"seed", sampler.seed},   {"scale_max", sampler.scale_max}};
  r.notes.push_back("sampled on [0,s_max]x[0,t_max]; hypotheses over all of R+ are not certified");
  if (j(0.0, 0.0) != 0.0)
    r.notes.push_back("j(0,0) != 0: lattice energies are truncated to the box and its halo");
  return r;
}

/// Runs the audit and marks the integrand usable iff it passes.
inline Integrand audited(Integrand j, const Sampler& sampler = {}) {
  j.mark_audited(audit_integrand(j, sampler).pass());
  return j;
}

inline Report audit_coupling(const Coupling& F, const Sampler& sampler = {}) {
  const double tol = kAuditTolerance;
  const int m = F.components();
  const CouplingParams& P = F.params();
  std::mt19937_64 rng(sampler.seed);
  std::uniform_real_distribution<double> us(0.0, sampler.s_max), ur(0.0, sampler.r_max),
      ul(1.0, sampler.scale_max), usign(-sampler.s_max, sampler.s_max);

  // Sample points of R^m_+: a tensor grid (coarser for m > 1) plus random draws.
  const int per_axis = m == 1 ? sampler.grid : std::max(4, static_cast<int>(std::lround(
                                                          std::pow(sampler.grid * 4.0, 1.0 / m))));
  const auto axis = detail::linspace(0.0, sampler.s_max, per_axis);
  std::vector<std::vector<double>> points;
  {
    std::vector<int> idx(m, 0);
    while (true) {
      std::vector<double> s(m);
      for (int k = 0; k < m; ++k) s[k] = axis[idx[k]];
      points.push_back(s);
      int k = 0;
      while (k < m && ++idx[k] == per_axis) idx[k++] = 0;
      if (k == m) break;
    }
  }
  for (int i = 0; i < sampler.random; ++i) {
    std::vector<double> s(m);
    for (auto& x : s) x = us(rng);
    points.push_back(s);
  }
  const auto radii = detail::linspace(0.0, sampler.r_max, 9);
  const auto incs = detail::linspace(sampler.s_max / 16.0, sampler.s_max / 2.0, 4);

  detail::Worst zero, supermod, cross, modulus, superhom, lower, nonneg_inner;

  for (double r : radii) {
    std::vector<double> z(m, 0.0);
    zero.le(std::abs(F(r, z)), 0.0, tol);
  }

  auto with = [](std::vector<double> s, int i, double h) {
    s[i] += h;
    return s;
  };
  for (const auto& s : points) {
    const double r = ur(rng);
    // (4.6) mixed second difference is nonnegative for i != j.
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) {
        if (i == k) continue;
        for (double h : incs)
          for (double kk : incs) {
            const double lhs = F(r, with(with(s, i, h), k, kk)) + F(r, s);
            const double rhs = F(r, with(s, i, h)) + F(r, with(s, k, kk));
            supermod.le(rhs, lhs, tol);
          }
      }
    // (4.7) increments are larger at smaller radius.
    const double r0 = ur(rng), r1 = r0 + ur(rng) + 1e-3;
    for (int i = 0; i < m; ++i)
      for (double h : incs) {
        const double lhs = F(r1, with(s, i, h)) + F(r0, s);
        const double rhs = F(r1, s) + F(r0, with(s, i, h));
        cross.le(lhs, rhs, tol);
      }
    // (4.14) superhomogeneity on R^m_+.
    const double t = ul(rng);
    std::vector<double> ts = s;
    for (auto& x : ts) x *= t;
    superhom.le(std::pow(t, P.alpha) * F(r, s), F(r, ts), tol);
    // (4.13) modulus inequality on signed arguments.
    std::vector<double> sg(m), ab(m);
    for (int k = 0; k < m; ++k) {
      sg[k] = usign(rng);
      ab[k] = std::abs(sg[k]);
    }
    modulus.le(F(r, sg), F(r, ab), tol);
  }

  // Lower bound on its declared region, and F >= 0 inside r <= r0.
  const bool have_lower = static_cast<int>(P.mu.size()) == m &&
                          static_cast<int>(P.sigma.size()) == m &&
                          static_cast<int>(P.tau.size()) == m;
  if (have_lower) {
    const double dmax = std::isfinite(P.delta) ? P.delta : sampler.s_max;
    std::uniform_real_distribution<double> ud(0.0, dmax / std::sqrt(static_cast<double>(m)));
    std::uniform_real_distribution<double> uout(P.r0, P.r0 + sampler.r_max);
    std::uniform_real_distribution<double> uin(0.0, P.r0);
    for (int i = 0; i < sampler.random + sampler.grid * sampler.grid; ++i) {
      std::vector<double> s(m);
      for (auto& x : s) x = ud(rng);
      double r = uout(rng);
      if (r <= P.r0) r = std::nextafter(P.r0, std::numeric_limits<double>::infinity());
      double bound = 0.0;
      for (int k = 0; k < m; ++k)
        bound += P.mu[k] * std::pow(r, -P.tau[k]) * std::pow(s[k], P.sigma[k] + P.p);
      lower.le(bound, F(r, s), tol);
      if (P.r0 > 0.0) nonneg_inner.le(0.0, F(uin(rng), s), tol);
    }
  }

  Report rep;
  rep.kind = "audit_coupling";
  rep.checks.push_back(zero.check("zero_at_origin", tol, false, "F(r,0,...,0) = 0"));
  rep.checks.push_back(supermod.check("supermodularity", tol, false,
                                      m == 1 ? "vacuous for m = 1" : "mixed second differences >= 0"));
  rep.checks.push_back(cross.check("cross_condition", tol, false,
                                   "F(r1,s+he_i)+F(r0,s) <= F(r1,s)+F(r0,s+he_i), r0 < r1"));
  rep.checks.push_back(modulus.check("modulus_inequality", tol, false, "F(r,s) <= F(r,|s|)"));
  rep.checks.push_back(superhom.check("alpha_superhomogeneity", tol, false,
                                      "F(r,ts) >= t^alpha F(r,s), t >= 1"));
  if (have_lower) {
    rep.checks.push_back(lower.check("lower_bound", tol, false,
                                     "F >= sum mu_k r^-tau_k s_k^(sigma_k+p) for r > r0, |s| <= delta"));
    if (P.r0 > 0.0) rep.checks.push_back(nonneg_inner.check("nonnegative_inside_r0", tol));
  } else {
    Check c;
    c.name = "lower_bound";
    c.indicative = true;
    c.pass = false;
    c.note = "no (mu, sigma, tau) declared";
    rep.checks.push_back(c);
  }

  // Growth limits are trends over decades of |s|, never verdicts.
  const double q = P.p + P.p * P.p / sampler.dim;
  auto ratio_curve = [&](auto&& make_r, double exponent, int lo, int hi) {
    Json curve = Json::array();
    for (int e = lo; e <= hi; ++e) {
      const double mag = std::pow(10.0, e);
      std::vector<double> s(m, mag);
      double denom = 0.0;
      for (double x : s) denom += std::pow(x, exponent);
      curve.push_back({{"s", mag}, {"ratio", number(F(make_r(e), s) / denom)}});
    }
    return curve;
  };
  const double r_mid = sampler.r_max / 2.0;
  rep.data["growth_near_zero"] = ratio_curve([&](int) { return r_mid; }, P.p, -8, -1);
  rep.data["growth_at_infinity"] = ratio_curve([&](int) { return r_mid; }, q, 1, 8);
  rep.data["far_field_decay"] =
      ratio_curve([&](int e) { return std::pow(10.0, -e); }, P.p, -8, -1);
  {
    Check c;
    c.name = "growth_limits";
    c.indicative = true;
    c.note = "indicative only: finite samples cannot verify limits; see data.growth_*";
    const auto& inf = rep.data["growth_at_infinity"];
    const Json& last = inf.back()["ratio"];
    const Json& first = inf.front()["ratio"];
    c.pass = last.is_number() && first.is_number() &&
             std::abs(last.get<double>()) <= std::abs(first.get<double>());
    rep.checks.push_back(c);
  }
  rep.data["coupling"] = F.name();
  rep.data["components"] = m;
  rep.data["alpha"] = P.alpha;
  rep.data["growth_exponent"] = q;
  return rep;
}

inline Coupling audited(Coupling F, const Sampler& sampler = {}) {
  F.mark_audited(audit_coupling(F, sampler).pass());
  return F;
}

} // namespace schwarz
