// Command-line front end: one subcommand per toolkit operation, GF1 / CSV /
// JSON artifacts, and a run manifest embedded in every report.
//
// Exit codes: 0 pass or converged, 1 usage or input error, 2 verdict failed,
// 3 divergence regime, 4 flow iteration budget exhausted.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schwarz/schwarz.hpp"

namespace {

using namespace schwarz;

constexpr int kPass = 0;
constexpr int kUsage = 1;
constexpr int kVerdictFail = 2;
constexpr int kDivergence = 3;
constexpr int kBudgetExhausted = 4;

struct Globals {
  std::uint64_t seed = 0;
  int threads = default_threads();
  double budget_cells = 4e9;
  bool wall_clock = false;
};

/// Everything a report needs to be reproduced: the canonical argument list
/// minus the flags that must not influence results (--threads, --wall-clock).
struct Manifest {
  std::string subcommand;
  std::vector<std::string> args;
  Json parameters = Json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::optional<double> wall_clock;

  Json to_json() const {
    Json j;
    j["tool"] = "schwarz";
    j["version"] = kVersion;
    j["subcommand"] = subcommand;
    j["args"] = args;
    j["parameters"] = parameters;
    j["seed"] = seed;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    if (wall_clock) j["wall_clock_seconds"] = *wall_clock;
    return j;
  }
};

std::vector<std::string> canonical_args(const std::vector<std::string>& argv) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < argv.size(); ++i) {
    const std::string& a = argv[i];
    if (a == "--wall-clock") continue;
    if (a == "--threads") {
      ++i;
      continue;
    }
    if (a.rfind("--threads=", 0) == 0) continue;
    out.push_back(a);
  }
  return out;
}

void write_json(const std::string& path, const Json& j) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << text;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad number '" + item + "' in list '" + s + "'");
    }
  }
  return out;
}

Point parse_normal(const std::string& s, int dim) {
  const auto v = parse_list(s);
  if (static_cast<int>(v.size()) != dim)
    throw InvalidArgument("normal needs " + std::to_string(dim) + " components");
  Point n{0.0, 0.0};
  for (int a = 0; a < dim; ++a) n[a] = v[a];
  return n;
}

Json tolerance_json(const ToleranceModel& tm) {
  return {{"c_disc", tm.c_disc},
          {"identity_rel", tm.identity_rel},
          {"critical_guard", tm.critical_guard},
          {"critical_grad", tm.critical_grad},
          {"translation_radius", tm.translation_radius}};
}

void add_tolerance_flags(CLI::App* c, ToleranceModel& tm) {
  c->add_option("--c-disc", tm.c_disc, "tol(h) = c_disc h (1 + |J|)")->capture_default_str();
  c->add_option("--identity-tol", tm.identity_rel, "relative tolerance of exact identities")
      ->capture_default_str();
  c->add_option("--critical-guard", tm.critical_guard,
                "critical-set fraction above which translations are withheld")
      ->capture_default_str();
  c->add_option("--critical-grad", tm.critical_grad, "epsilon_grad (negative: use h)")
      ->capture_default_str();
  c->add_option("--translation-radius", tm.translation_radius,
                "cells searched around the centroid offset")
      ->capture_default_str();
}

/// Random nonnegative test functions for the randomized verdict suites.
GridFunction random_function(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> v(spec.size());
  for (double& x : v) x = U(rng);
  return GridFunction(spec, std::move(v));
}

struct VerifyArgs {
  std::string kind;
  std::vector<std::string> inputs;
  std::string integrand = "power:p=2";
  std::string coupling;
  std::string normal;
  double offset = 0.0;
  double p = 2.0;
  int random_cases = 0;
  int dim = 1;
  int cells = 33;
  double extent = 1.0;
  std::string report;
  ToleranceModel tm;
};

class Runner {
public:
  explicit Runner(std::vector<std::string> argv) : argv_(std::move(argv)) {}

  int run();

private:
  int symmetrize();
  int polarize_cmd();
  int iterate();
  int verify();
  int audit();
  int minimize_cmd();
  int certify();
  int probe();
  int gn();
  int decay();
  int replay();

  int finish(Json body, const std::string& report, bool pass) {
    if (globals_.wall_clock)
      manifest_.wall_clock =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json out;
    out["manifest"] = manifest_.to_json();
    for (auto& [k, v] : body.items()) out[k] = v;
    write_json(report, out);
    return pass ? kPass : kVerdictFail;
  }

  std::vector<std::string> argv_;
  Globals globals_;
  Manifest manifest_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();

  // option storage
  std::string input_, out_, report_, csv_, trace_, config_;
  std::vector<std::string> inputs_;
  std::string normal_, strategy_ = "grid-exact", schedule_ = "triangular", integrand_, coupling_;
  double offset_ = 0.0, p_ = 2.0, theta_ = 1.0;
  int steps_ = 10, m_ = 1, dim_ = 1;
  std::string thetas_ = "1,0.5,0.25,0.125,0.0625,0.03125", deltas_ = "1,0.5,0.25,0.125";
  std::string manifest_path_;
  VerifyArgs verify_;
  Sampler sampler_;
  ToleranceModel tm_;
  CertificateOptions cert_;
  ScalingOptions scaling_;
  GnOptions gn_opts_;
  double radial_tol_ = 1e-9;
};

int Runner::run() {
  CLI::App app{"Rearrangement and constrained-minimization toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.add_option("--seed", globals_.seed, "master seed")->capture_default_str();
  app.add_option("--threads", globals_.threads, "worker threads (results do not depend on it)");
  app.add_option("--budget-cells", globals_.budget_cells, "cell-operation budget")
      ->capture_default_str();
  app.add_flag("--wall-clock", globals_.wall_clock,
               "record wall-clock time in the manifest (reports stop being bit-identical)");

  auto* sym = app.add_subcommand("symmetrize", "Schwarz symmetrization of a GF1 field");
  sym->add_option("--input", input_, "GF1 input")->required();
  sym->add_option("--out", out_, "GF1 output")->required();
  sym->add_option("--csv", csv_, "optional CSV of the result");
  sym->add_option("--report", report_, "optional JSON report");

  auto* pol = app.add_subcommand("polarize", "two-point rearrangement across a half-space");
  pol->add_option("--input", input_, "GF1 input")->required();
  pol->add_option("--normal", normal_, "half-space normal, comma separated")->required();
  pol->add_option("--offset", offset_, "half-space offset d >= 0")->capture_default_str();
  pol->add_option("--out", out_, "GF1 output")->required();
  pol->add_option("--report", report_, "optional JSON report");

  auto* it = app.add_subcommand("iterate", "iterated polarization towards u*");
  it->add_option("--input", input_, "GF1 input")->required();
  it->add_option("--strategy", strategy_, "grid-exact | random-dense | low-discrepancy")
      ->capture_default_str();
  it->add_option("--steps", steps_, "number of steps")->capture_default_str();
  it->add_option("--schedule", schedule_, "triangular | linear")->capture_default_str();
  it->add_option("--p", p_, "exponent of the distances and seminorm")->capture_default_str();
  it->add_option("--integrand", integrand_, "optional integrand preset for a J column");
  it->add_option("--trace", trace_, "CSV trace output");
  it->add_option("--out", out_, "GF1 final state");
  it->add_option("--report", report_, "JSON report")->required();

  auto* ver = app.add_subcommand("verify", "machine-checkable verdicts");
  ver->require_subcommand(1);
  for (const char* kind : {"polya-szego", "polarization", "coupling", "equality"}) {
    auto* v = ver->add_subcommand(kind);
    v->add_option("--input", verify_.inputs, "GF1 input (repeat for coupling components)");
    v->add_option("--integrand", verify_.integrand, "integrand preset")->capture_default_str();
    v->add_option("--coupling", verify_.coupling, "coupling preset");
    v->add_option("--normal", verify_.normal, "half-space normal (polarization)");
    v->add_option("--offset", verify_.offset, "half-space offset (polarization)");
    v->add_option("--p", verify_.p, "Sobolev exponent (equality)")->capture_default_str();
    v->add_option("--random-cases", verify_.random_cases,
                  "run a randomized suite of this many cases instead of --input");
    v->add_option("--dim", verify_.dim, "grid dimension of the randomized suite")->capture_default_str();
    v->add_option("--M", verify_.cells, "cells per axis of the randomized suite")->capture_default_str();
    v->add_option("--L", verify_.extent, "half-width of the randomized suite grid")->capture_default_str();
    v->add_option("--report", verify_.report, "JSON report")->required();
    add_tolerance_flags(v, verify_.tm);
    v->callback([this, kind] { verify_.kind = kind; });
  }

  auto* aud = app.add_subcommand("audit", "sampled hypothesis audits");
  aud->require_subcommand(1);
  auto* aj = aud->add_subcommand("integrand");
  aj->add_option("--integrand", integrand_, "integrand preset")->required();
  auto* ac = aud->add_subcommand("coupling");
  ac->add_option("--coupling", coupling_, "coupling preset")->required();
  ac->add_option("--m", m_, "components")->capture_default_str();
  for (auto* a : {aj, ac}) {
    a->add_option("--report", report_, "JSON report")->required();
    a->add_option("--s-max", sampler_.s_max)->capture_default_str();
    a->add_option("--t-max", sampler_.t_max)->capture_default_str();
    a->add_option("--grid", sampler_.grid)->capture_default_str();
    a->add_option("--random", sampler_.random)->capture_default_str();
    a->add_option("--scale-max", sampler_.scale_max)->capture_default_str();
    a->add_option("--r-max", sampler_.r_max)->capture_default_str();
    a->add_option("--dim", sampler_.dim)->capture_default_str();
  }

  auto* mn = app.add_subcommand("minimize", "projected gradient flow on a problem config");
  mn->add_option("--config", config_, "problem config")->required();
  mn->add_option("--out", out_, "GF1 output (component k > 1 gets a .k suffix)");
  mn->add_option("--report", report_, "JSON report")->required();
  mn->add_option("--c-disc", tm_.c_disc, "tol(h) = c_disc h (1 + |J|)")->capture_default_str();

  auto* ce = app.add_subcommand("certify", "negative-energy certificate on Upsilon_theta");
  ce->add_option("--config", config_, "problem config")->required();
  ce->add_option("--thetas", thetas_, "comma-separated theta grid in (0,1]")->capture_default_str();
  ce->add_option("--constraint-tol", cert_.constraint_tolerance)->capture_default_str();
  ce->add_option("--tail-tol", cert_.tail_tolerance)->capture_default_str();
  ce->add_option("--report", report_, "JSON report")->required();

  auto* pr = app.add_subcommand("probe", "dilation sweep of J(w^delta)");
  pr->add_option("--config", config_, "problem config")->required();
  pr->add_option("--input", inputs_, "GF1 w per component (default: Upsilon_theta)");
  pr->add_option("--theta", theta_, "theta of the default w")->capture_default_str();
  pr->add_option("--deltas", deltas_, "comma-separated deltas")->capture_default_str();
  pr->add_option("--exponent-tol", scaling_.exponent_tolerance)->capture_default_str();
  pr->add_option("--floor", scaling_.floor)->capture_default_str();
  pr->add_option("--report", report_, "JSON report")->required();

  auto* g = app.add_subcommand("gn", "Gagliardo-Nirenberg ratio of a family");
  g->add_option("--input", inputs_, "GF1 inputs")->required();
  g->add_option("--p", p_, "exponent")->capture_default_str();
  g->add_option("--drift-tol", gn_opts_.drift_tolerance)->capture_default_str();
  g->add_option("--report", report_, "JSON report")->required();

  auto* dc = app.add_subcommand("decay", "radial decay constant");
  dc->add_option("--input", input_, "GF1 input")->required();
  dc->add_option("--p", p_, "exponent")->capture_default_str();
  dc->add_option("--radial-tol", radial_tol_)->capture_default_str();
  dc->add_option("--report", report_, "JSON report")->required();

  auto* rp = app.add_subcommand("replay", "re-run the manifest embedded in a report");
  rp->add_option("--manifest", manifest_path_, "report JSON carrying a manifest")->required();

  try {
    std::vector<std::string> rev(argv_.rbegin(), argv_.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  manifest_.args = canonical_args(argv_);
  manifest_.seed = globals_.seed;

  try {
    if (*sym) return symmetrize();
    if (*pol) return polarize_cmd();
    if (*it) return iterate();
    if (*ver) return verify();
    if (*aud) {
      manifest_.subcommand = *aj ? "audit integrand" : "audit coupling";
      return audit();
    }
    if (*mn) return minimize_cmd();
    if (*ce) return certify();
    if (*pr) return probe();
    if (*g) return gn();
    if (*dc) return decay();
    if (*rp) return replay();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

int Runner::symmetrize() {
  manifest_.subcommand = "symmetrize";
  manifest_.inputs = {input_};
  manifest_.outputs = {out_};
  const GridFunction u = gf1::read_file(input_);
  const GridFunction us = schwarz_symmetrize(u);
  gf1::write_file(out_, us);
  if (!csv_.empty()) {
    std::ofstream c(csv_);
    gf1::write_csv(c, us);
  }
  if (report_.empty()) return kPass;
  Json body;
  body["result"] = {{"grid", detail::grid_meta(u.spec())},
                    {"equimeasurable", equimeasurable(u, us)},
                    {"lp2_distance", lp_distance(u, us, 2.0)}};
  return finish(body, report_, true);
}

int Runner::polarize_cmd() {
  manifest_.subcommand = "polarize";
  manifest_.inputs = {input_};
  manifest_.outputs = {out_};
  const GridFunction u = gf1::read_file(input_);
  const HalfSpace H = HalfSpace::make(u.spec(), parse_normal(normal_, u.spec().dim), offset_);
  const GridFunction uh = polarize(u, H);
  gf1::write_file(out_, uh);
  if (report_.empty()) return kPass;
  Json body;
  body["result"] = {{"halfspace", detail::halfspace_meta(H)},
                    {"equimeasurable", equimeasurable(u, uh)}};
  return finish(body, report_, true);
}

int Runner::iterate() {
  manifest_.subcommand = "iterate";
  manifest_.inputs = {input_};
  const GridFunction u = gf1::read_file(input_);
  const auto strategy = parse_strategy(strategy_);
  IterateOptions opts;
  opts.p = p_;
  opts.cell_budget = globals_.budget_cells;
  if (schedule_ == "linear") opts.schedule = IterationSchedule::Linear;
  else if (schedule_ != "triangular") throw InvalidArgument("unknown schedule '" + schedule_ + "'");
  if (steps_ < 1) throw InvalidArgument("--steps must be >= 1");
  const auto seq = halfspace_sequence(u.spec(), strategy, static_cast<std::size_t>(steps_), globals_.seed);
  std::optional<Integrand> j;
  if (!integrand_.empty()) j = presets::integrand(integrand_);
  const IterationTrace tr = polarization_iterate(u, seq, steps_, opts, j ? &*j : nullptr);
  if (!trace_.empty()) {
    std::ofstream c(trace_);
    tr.write_csv(c);
    manifest_.outputs.push_back(trace_);
  }
  if (!out_.empty()) {
    gf1::write_file(out_, tr.final_state);
    manifest_.outputs.push_back(out_);
  }
  manifest_.parameters = {{"strategy", to_string(strategy)}, {"steps", steps_}, {"schedule", schedule_},
                          {"p", p_}, {"grid_exact", tr.grid_exact}};
  Json body;
  Json rows = Json::array();
  for (const auto& r : tr.rows) {
    Json row = {{"step", r.step}, {"lp_distance", number(r.lp_distance)}, {"seminorm", number(r.seminorm)}};
    if (r.energy) row["J"] = number(*r.energy);
    rows.push_back(row);
  }
  body["trace"] = rows;
  bool pass = true;
  if (tr.grid_exact) {
    const Verdict v = verify_gradient_preservation(tr);
    body["gradient_preservation"] = v.to_json();
    pass = v.pass;
  } else {
    body["gradient_drift"] = gradient_drift_report(tr).to_json();
  }
  return finish(body, report_, pass);
}

int Runner::verify() {
  VerifyArgs& a = verify_;
  manifest_.subcommand = "verify " + a.kind;
  manifest_.inputs = a.inputs;
  manifest_.outputs = {a.report};
  manifest_.parameters = {{"integrand", a.integrand}, {"coupling", a.coupling},
                          {"tolerances", tolerance_json(a.tm)}};

  auto one = [&](const std::vector<GridFunction>& us, std::uint64_t seed) -> Json {
    if (a.kind == "polya-szego") {
      return verify_polya_szego(us.front(), presets::integrand(a.integrand), a.tm).to_json();
    }
    if (a.kind == "polarization") {
      const GridSpec& spec = us.front().spec();
      HalfSpace H;
      if (a.normal.empty()) {
        const auto cat = grid_exact_catalog(spec);
        H = cat[seed % cat.size()];
      } else {
        H = HalfSpace::make(spec, parse_normal(a.normal, spec.dim), a.offset);
      }
      return verify_polarization_invariance(us.front(), H, presets::integrand(a.integrand), a.tm)
          .to_json();
    }
    if (a.kind == "coupling") {
      if (a.coupling.empty()) throw InvalidArgument("verify coupling needs --coupling");
      const Coupling F = presets::coupling(a.coupling, static_cast<int>(us.size()));
      return verify_coupling_rearrangement(us, F, a.tm).to_json();
    }
    const Report r = equality_case_probe(us.front(), presets::integrand(a.integrand), a.p, a.tm);
    Json j = r.to_json();
    j["pass"] = r.pass();
    return j;
  };

  Json body;
  bool pass = true;
  if (a.random_cases > 0) {
    const GridSpec spec = GridSpec::make(a.dim, a.cells, a.extent);
    int comps = 1;
    if (a.kind == "coupling") comps = presets::coupling(a.coupling, 2).components();
    std::vector<Json> results(a.random_cases);
    parallel_for(static_cast<std::size_t>(a.random_cases), globals_.threads, [&](std::size_t i) {
      const std::uint64_t s = case_seed(globals_.seed, i);
      std::vector<GridFunction> us;
      for (int k = 0; k < comps; ++k) us.push_back(random_function(spec, case_seed(s, k)));
      results[i] = one(us, s);
    });
    Json cases = Json::array();
    int failed = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : results) {
      cases.push_back(r);
      if (!r["pass"].get<bool>()) ++failed;
      if (r.contains("residual") && r["residual"].is_number())
        worst = std::max(worst, r["residual"].get<double>());
    }
    manifest_.parameters["random_cases"] = a.random_cases;
    manifest_.parameters["grid"] = detail::grid_meta(spec);
    body["summary"] = {{"cases", a.random_cases}, {"failed", failed}, {"worst_residual", number(worst)}};
    body["cases"] = cases;
    pass = failed == 0;
  } else {
    if (a.inputs.empty()) throw InvalidArgument("verify needs --input or --random-cases");
    std::vector<GridFunction> us;
    for (const auto& path : a.inputs) us.push_back(gf1::read_file(path));
    body["verdict"] = one(us, globals_.seed);
    pass = body["verdict"]["pass"].get<bool>();
  }
  return finish(body, a.report, pass);
}

int Runner::audit() {
  manifest_.outputs = {report_};
  sampler_.seed = globals_.seed == 0 ? sampler_.seed : globals_.seed;
  manifest_.parameters = {{"s_max", sampler_.s_max}, {"t_max", sampler_.t_max},
                          {"grid", sampler_.grid},   {"random", sampler_.random},
                          {"scale_max", sampler_.scale_max}, {"r_max", sampler_.r_max},
                          {"dim", sampler_.dim},     {"sampler_seed", sampler_.seed}};
  Report r;
  if (!integrand_.empty()) {
    manifest_.parameters["integrand"] = integrand_;
    r = audit_integrand(presets::integrand(integrand_), sampler_);
  } else {
    manifest_.parameters["coupling"] = coupling_;
    manifest_.parameters["m"] = m_;
    r = audit_coupling(presets::coupling(coupling_, m_), sampler_);
  }
  Json body;
  body["report"] = r.to_json();
  return finish(body, report_, r.pass());
}

int Runner::minimize_cmd() {
  manifest_.subcommand = "minimize";
  manifest_.inputs = {config_};
  ProblemConfig cfg = parse_config_file(config_);
  manifest_.parameters = cfg.resolved;
  const double cost = static_cast<double>(cfg.flow.max_iterations) *
                      static_cast<double>(cfg.problem.grid.size()) * cfg.problem.m();
  if (cost > globals_.budget_cells)
    throw BudgetExceeded("minimize: max_iterations x cells = " + std::to_string(cost) +
                         " exceeds --budget-cells");
  const Solution sol = minimize(cfg.problem, cfg.flow, initial_from_config(cfg));
  if (!out_.empty()) {
    for (std::size_t k = 0; k < sol.u.size(); ++k) {
      const std::string path = k == 0 ? out_ : out_ + "." + std::to_string(k + 1);
      gf1::write_file(path, sol.u[k]);
      manifest_.outputs.push_back(path);
    }
  }
  manifest_.outputs.push_back(report_);
  Json body;
  body["problem"] = problem_meta(cfg.problem);
  body["solution"] = sol.to_json();
  bool sym_ok = true;
  for (const auto& s : sol.symmetry) sym_ok = sym_ok && s.pass;
  body["symmetry_pass"] = sym_ok;
  finish(body, report_, true);
  switch (sol.status) {
    case FlowStatus::Converged: return kPass;
    case FlowStatus::Divergence: return kDivergence;
    case FlowStatus::BudgetExhausted: return kBudgetExhausted;
  }
  return kUsage;
}

int Runner::certify() {
  manifest_.subcommand = "certify";
  manifest_.inputs = {config_};
  manifest_.outputs = {report_};
  const ProblemConfig cfg = parse_config_file(config_);
  manifest_.parameters = {{"config", cfg.resolved}, {"thetas", parse_list(thetas_)},
                          {"constraint_tol", cert_.constraint_tolerance}, {"tail_tol", cert_.tail_tolerance}};
  const Report r = upsilon_certificate(cfg.problem, parse_list(thetas_), cert_);
  Json body;
  body["report"] = r.to_json();
  return finish(body, report_, r.pass());
}

int Runner::probe() {
  manifest_.subcommand = "probe";
  manifest_.inputs = {config_};
  for (const auto& i : inputs_) manifest_.inputs.push_back(i);
  manifest_.outputs = {report_};
  const ProblemConfig cfg = parse_config_file(config_);
  std::vector<GridFunction> w;
  if (inputs_.empty()) {
    w = upsilon(cfg.problem, theta_, upsilon_normalizers(cfg.problem));
  } else {
    for (const auto& path : inputs_) w.push_back(gf1::read_file(path));
  }
  manifest_.parameters = {{"config", cfg.resolved}, {"deltas", parse_list(deltas_)},
                          {"theta", theta_}, {"exponent_tol", scaling_.exponent_tolerance},
                          {"floor", scaling_.floor}};
  const Report r = scaling_probe(cfg.problem, w, parse_list(deltas_), scaling_);
  Json body;
  body["report"] = r.to_json();
  return finish(body, report_, r.pass());
}

int Runner::gn() {
  manifest_.subcommand = "gn";
  manifest_.inputs = inputs_;
  manifest_.outputs = {report_};
  std::vector<GridFunction> family;
  for (const auto& path : inputs_) family.push_back(gf1::read_file(path));
  const int N = family.front().spec().dim;
  manifest_.parameters = {{"p", p_}, {"drift_tol", gn_opts_.drift_tolerance}};
  const Report r = gn_check(family, p_, N, gn_opts_);
  Json body;
  body["report"] = r.to_json();
  return finish(body, report_, r.pass());
}

int Runner::decay() {
  manifest_.subcommand = "decay";
  manifest_.inputs = {input_};
  manifest_.outputs = {report_};
  manifest_.parameters = {{"p", p_}, {"radial_tol", radial_tol_}};
  const Report r = radial_decay_check(gf1::read_file(input_), p_, radial_tol_);
  Json body;
  body["report"] = r.to_json();
  return finish(body, report_, r.pass());
}

int Runner::replay() {
  std::ifstream in(manifest_path_);
  if (!in) throw FormatError("cannot open '" + manifest_path_ + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  if (!j.contains("manifest") || !j["manifest"].contains("args"))
    throw FormatError("'" + manifest_path_ + "' carries no manifest");
  std::vector<std::string> args = j["manifest"]["args"].get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") throw FormatError("manifest replays a replay");
  // Thread count is not part of the manifest; keep the one given to replay.
  args.insert(args.begin(), {"--threads", std::to_string(globals_.threads)});
  return Runner(std::move(args)).run();
}

} // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return Runner(std::move(args)).run();
}
