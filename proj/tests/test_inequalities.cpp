#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "schwarz/inequalities.hpp"
#include "schwarz/presets.hpp"

using namespace schwarz;

namespace {

GridFunction line(std::vector<double> v, double h = 1.0) {
  const int m = static_cast<int>(v.size());
  return GridFunction(GridSpec::make(1, m, m * h / 2.0), std::move(v));
}

GridFunction random_field(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> v(spec.size());
  for (double& x : v) x = U(rng);
  return GridFunction(spec, v);
}

/// (1 - |x - c|^2 / R^2)_+ with the center c on a lattice cell.
GridFunction bump(const GridSpec& s, Offset c, double R, double amp = 1.0) {
  const double h = s.spacing();
  return GridFunction::sample(s, [&](const Point& x) {
    const double dx = x[0] - c[0] * h, dy = s.dim == 2 ? x[1] - c[1] * h : 0.0;
    return amp * std::max(0.0, 1.0 - (dx * dx + dy * dy) / (R * R));
  });
}

} // namespace

TEST(PolarizationInvariance, MirrorImageExample) {
  const GridFunction u = line({0, 2, 0, 1, 0});
  const HalfSpace H = HalfSpace::make(u.spec(), {-1, 0}, 0.0);
  const Integrand j = presets::power(2.0);
  const Verdict v = verify_polarization_invariance(u, H, j);
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.residual, 0.0);
  EXPECT_DOUBLE_EQ(v.lhs, oracle::energy_1d({0, 1, 0, 2, 0}, 1.0, [](double, double t) { return t * t; }));
}

TEST(PolarizationInvariance, RadiallyDecreasingIsExact) {
  const GridSpec s = GridSpec::make(2, 15, 1.0);
  const GridFunction u = bump(s, {0, 0}, 0.8);
  for (const HalfSpace& H : grid_exact_catalog(s)) {
    const Verdict v = verify_polarization_invariance(u, H, presets::quasilinear(2.0, 1.0));
    EXPECT_TRUE(v.pass);
    EXPECT_EQ(v.residual, 0.0);
  }
}

TEST(PolarizationInvariance, RefusesNonExactHalfSpace) {
  const GridFunction u = line({0, 2, 0, 1, 0});
  const HalfSpace H = HalfSpace::make(u.spec(), {1, 0}, 0.3);
  EXPECT_THROW(verify_polarization_invariance(u, H, presets::power(2.0)), HypothesisNotMet);
}

TEST(PolarizationInvariance, LatticeObstructionIsReported) {
  // Spikes at -2h and 0; across x = -h/2 the taller one moves to +h, next to
  // the other, and the discrete gradient energy drops. The verdict must
  // report it, orbit by orbit.
  const GridFunction u = line({0, 0, 2, 0, 1, 0, 0, 0, 0});
  const HalfSpace H = HalfSpace::make(u.spec(), {-1, 0}, 0.5);
  ASSERT_TRUE(H.grid_exact());
  const Verdict v = verify_polarization_invariance(u, H, presets::power(2.0));
  EXPECT_FALSE(v.pass);
  EXPECT_GT(v.meta["orbit_mismatches"].get<long>(), 0);
  EXPECT_LT(v.lhs, v.rhs);
  EXPECT_TRUE(v.meta["equimeasurable"].get<bool>());
}

TEST(PolarizationInvariance, NeverIncreasesEnergyForConvexMonotoneJ) {
  const GridSpec s = GridSpec::make(1, 25, 1.0);
  for (std::uint64_t k = 0; k < 30; ++k) {
    const GridFunction u = random_field(s, k);
    for (const HalfSpace& H : grid_exact_catalog(s)) {
      const Verdict v = verify_polarization_invariance(u, H, presets::power(2.0));
      EXPECT_LE(v.lhs, v.rhs * (1 + 1e-12));
    }
  }
}

TEST(GradientPreservation, RefusesNonExactTrace) {
  const GridSpec s = GridSpec::make(2, 9, 1.0);
  const auto seq = halfspace_sequence(s, HalfSpaceStrategy::RandomDense, 5, 1);
  const IterationTrace tr = polarization_iterate(random_field(s, 1), seq, 5);
  ASSERT_FALSE(tr.grid_exact);
  EXPECT_THROW(verify_gradient_preservation(tr), HypothesisNotMet);
  const Report drift = gradient_drift_report(tr);
  EXPECT_TRUE(drift.find("relative_drift")->indicative);
}

TEST(GradientPreservation, ExactOnMirrorSymmetricSequence) {
  // a single translated bump is only ever mirrored as a whole
  const GridSpec s = GridSpec::make(1, 41, 1.0);
  const GridFunction u = bump(s, {6, 0}, 0.2);
  const auto seq = halfspace_sequence(s, HalfSpaceStrategy::GridExactAxes, 3);
  const IterationTrace tr = polarization_iterate(u, seq, 3);
  const Verdict v = verify_gradient_preservation(tr);
  EXPECT_TRUE(v.pass) << v.to_json().dump();
}

TEST(PolyaSzego, RadialInputHasZeroResidual) {
  const GridSpec s = GridSpec::make(2, 21, 1.0);
  const GridFunction u = bump(s, {0, 0}, 0.7);
  const Verdict v = verify_polya_szego(u, presets::power(2.0));
  EXPECT_TRUE(v.pass);
  // equal-radius samples may differ in the last bit and be permuted
  EXPECT_NEAR(v.residual, 0.0, 1e-13);
}

TEST(PolyaSzego, RandomInputsAllPresets) {
  for (const char* js : {"power:p=2", "power:p=1.5", "convexa:p=2,q=1.5", "splitba:p=2,q=1",
                         "quasilinear:p=2,alpha=1"}) {
    const Integrand j = presets::integrand(js);
    for (int dim : {1, 2})
      for (std::uint64_t k = 0; k < 5; ++k) {
        const GridFunction u = random_field(GridSpec::make(dim, dim == 1 ? 33 : 11, 1.0), k);
        const Verdict v = verify_polya_szego(u, j);
        EXPECT_TRUE(v.pass) << js << " " << v.to_json().dump();
        EXPECT_TRUE(v.meta["equimeasurable"].get<bool>());
      }
  }
}

TEST(PolyaSzego, RefusesUnauditedIntegrand) {
  const Integrand j("sqrt", [](double, double t) { return std::sqrt(t); }, {true, true, false}, 2, 0, 2);
  EXPECT_THROW(verify_polya_szego(line({0, 1, 0}), audited(j)), HypothesisNotMet);
  EXPECT_THROW(verify_polya_szego(line({0, 1, 0}), j), HypothesisNotMet);
}

TEST(CouplingRearrangement, ProductAndWeightedHold) {
  const GridSpec s = GridSpec::make(2, 9, 1.0);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const std::vector<GridFunction> pair{random_field(s, k), random_field(s, 100 + k)};
    EXPECT_TRUE(verify_coupling_rearrangement(pair, presets::product()).pass);
    const std::vector<GridFunction> one{random_field(s, 200 + k)};
    const Verdict v = verify_coupling_rearrangement(one, presets::weighted(1.0));
    EXPECT_TRUE(v.pass);
    EXPECT_LE(v.residual, 0.0);
  }
}

TEST(CouplingRearrangement, RefusesUnauditedCoupling) {
  const Coupling neg("neg", 2, [](double, std::span<const double> s) { return -s[0] * s[1]; }, {});
  const GridSpec s = GridSpec::make(1, 5, 1.0);
  EXPECT_THROW(verify_coupling_rearrangement({random_field(s, 1), random_field(s, 2)}, audited(neg)),
               HypothesisNotMet);
}

TEST(CouplingRearrangement, MatchesBruteForceOnTinyGrid) {
  const GridSpec s = GridSpec::make(1, 5, 2.5);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> I(0, 9);
  std::vector<double> a(5), b(5);
  for (int i = 0; i < 5; ++i) {
    a[i] = I(rng);
    b[i] = I(rng);
  }
  const std::vector<GridFunction> us{GridFunction(s, a), GridFunction(s, b)};
  std::vector<double> radii;
  for (std::size_t i = 0; i < s.size(); ++i) radii.push_back(std::abs(s.center(i)[0]));
  const double best = oracle::brute_force_max_coupling(
      {a, b}, radii, 1.0, [](double, const std::vector<double>& x) { return x[0] * x[1]; });
  const Verdict v = verify_coupling_rearrangement(us, presets::product());
  EXPECT_EQ(v.rhs, best);
}

TEST(EqualityProbe, TranslatedBumpRecoversOffset) {
  const GridSpec s = GridSpec::make(2, 41, 2.0);
  const GridFunction u = bump(s, {5, -3}, 0.6);
  const Report r = equality_case_probe(u, presets::power(2.0), 2.0);
  EXPECT_EQ(r.data["classification"], "equality, translation recovered");
  EXPECT_EQ(r.data["translation_offset"], (Json{5, -3}));
  EXPECT_NEAR(r.data["translation_distance"].get<double>(), 0.0, 1e-14);
}

TEST(EqualityProbe, TwoBumpsAreStrict) {
  const GridSpec s = GridSpec::make(1, 201, 4.0);
  std::vector<double> v(s.size());
  const GridFunction a = bump(s, {-50, 0}, 0.6), b = bump(s, {50, 0}, 0.6);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  const Report r = equality_case_probe(GridFunction(s, v), presets::power(2.0), 2.0);
  EXPECT_EQ(r.data["classification"], "strict inequality");
}

TEST(EqualityProbe, FlatAnnulusTripsCriticalSetGuard) {
  const GridSpec s = GridSpec::make(2, 41, 2.0);
  const double h = s.spacing();
  const GridFunction u = GridFunction::sample(s, [&](const Point& x) {
    const double r = std::hypot(x[0] - 4 * h, x[1]);
    if (r < 0.3) return 2.0 - r;
    if (r < 0.8) return 1.0;
    return std::max(0.0, 1.0 - (r - 0.8) * 4);
  });
  const Report r = equality_case_probe(u, presets::power(2.0), 2.0);
  EXPECT_FALSE(r.find("c_critical_set")->pass);
  EXPECT_EQ(r.data["classification"], "equality, critical set too large: translation withheld");
}

TEST(EqualityProbe, RequiresStrictlyConvexCoerciveIntegrand) {
  const Integrand lin("lin", [](double, double t) { return t; }, {true, true, false}, 2, 0, 1);
  EXPECT_THROW(equality_case_probe(line({0, 1, 0}), audited(lin), 2.0), HypothesisNotMet);
}
