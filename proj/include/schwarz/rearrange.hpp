#pragma once

// Polarization u^H, Schwarz symmetrization u*, half-space sequences and the
// iterated polarization driver u_{n+1} = u_n^{H_1 ... H_{n+1}}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "schwarz/functional.hpp"
#include "schwarz/grid.hpp"

namespace schwarz {

/// u^H(x) = max(u(x), u(sigma_H x)) for x in H, min(...) otherwise.
///
/// For a grid-exact H the reflected value is a lattice lookup and the result
/// is a permutation of the values of u. Otherwise u(sigma_H x) is obtained by
/// multilinear interpolation of the zero-extended lattice function.
inline GridFunction polarize(const GridFunction& u, const HalfSpace& H) {
  const GridSpec& spec = u.spec();
  if (H.dim() != spec.dim) throw InvalidArgument("polarize: half-space and grid dimensions differ");
  const bool exact = H.exact_on(spec);
  std::vector<double> out(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Offset o = spec.offset(i);
    const Point x = spec.center(o);
    const double mine = u[i];
    const double other = exact ? u.value_at(H.reflect(spec, o)) : interpolate(u, H.reflect(x));
    out[i] = H.contains(x) ? std::max(mine, other) : std::min(mine, other);
  }
  return GridFunction(spec, std::move(out));
}

/// Cells in the order Schwarz symmetrization fills them: by distance to the
/// origin, ties broken lexicographically by center coordinates.
inline std::vector<std::size_t> symmetrization_order(const GridSpec& spec) {
  std::vector<std::size_t> order(spec.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Offset oa = spec.offset(a), ob = spec.offset(b);
    const long long da = offset_norm2(oa), db = offset_norm2(ob);
    if (da != db) return da < db;
    return oa < ob;
  });
  return order;
}

/// Discrete Schwarz symmetrization: the decreasingly sorted values are laid
/// out along symmetrization_order. Same value multiset as u, always.
inline GridFunction schwarz_symmetrize(const GridFunction& u) {
  const GridSpec& spec = u.spec();
  std::vector<double> sorted = sorted_values(u);
  const auto order = symmetrization_order(spec);
  std::vector<double> out(spec.size());
  for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = sorted[r];
  return GridFunction(spec, std::move(out));
}

enum class HalfSpaceStrategy { GridExactAxes, RandomDense, LowDiscrepancy };

inline std::string to_string(HalfSpaceStrategy s) {
  switch (s) {
    case HalfSpaceStrategy::GridExactAxes: return "grid-exact";
    case HalfSpaceStrategy::RandomDense: return "random-dense";
    case HalfSpaceStrategy::LowDiscrepancy: return "low-discrepancy";
  }
  return "?";
}

inline HalfSpaceStrategy parse_strategy(const std::string& s) {
  if (s == "grid-exact") return HalfSpaceStrategy::GridExactAxes;
  if (s == "random-dense" || s == "random") return HalfSpaceStrategy::RandomDense;
  if (s == "low-discrepancy") return HalfSpaceStrategy::LowDiscrepancy;
  throw InvalidArgument("unknown half-space strategy '" + s + "'");
}

struct HalfSpaceSequence {
  HalfSpaceStrategy strategy = HalfSpaceStrategy::GridExactAxes;
  std::uint64_t seed = 0;
  std::vector<HalfSpace> halfspaces;

  bool all_grid_exact() const {
    return std::all_of(halfspaces.begin(), halfspaces.end(),
                       [](const HalfSpace& H) { return H.grid_exact(); });
  }
};

/// Every grid-exact half-space the cyclic strategy uses, in enumeration
/// order: axis hyperplanes at all half-cell positions c in (h/2) Z with
/// |c| < L (oriented so that 0 is in H, and at c = 0 so that H is the
/// negative side), interleaved over axes; in 2D followed by the two
/// diagonals through the origin.
inline std::vector<HalfSpace> grid_exact_catalog(const GridSpec& spec) {
  std::vector<HalfSpace> out;
  const double h = spec.spacing();
  auto axis_plane = [&](int axis, int half_steps) {
    Point n{0.0, 0.0};
    n[axis] = half_steps >= 0 ? 1.0 : -1.0;
    out.push_back(HalfSpace::make(spec, n, std::abs(half_steps) * h / 2.0));
  };
  for (int a = 0; a < spec.dim; ++a) axis_plane(a, 0);
  for (int k = 1; k < spec.cells; ++k)
    for (int a = 0; a < spec.dim; ++a) {
      axis_plane(a, k);
      axis_plane(a, -k);
    }
  if (spec.dim == 2) {
    out.push_back(HalfSpace::make(spec, {1.0, -1.0}, 0.0));
    out.push_back(HalfSpace::make(spec, {1.0, 1.0}, 0.0));
  }
  return out;
}

/// Deterministic given (strategy, seed). RandomDense draws the normal
/// uniformly on the sphere and the offset from an exponential law with mean
/// L/4; LowDiscrepancy uses a golden-ratio angle sequence and a van der
/// Corput offset sequence mapped through the same law.
inline HalfSpaceSequence halfspace_sequence(const GridSpec& spec, HalfSpaceStrategy strategy,
                                            std::size_t count, std::uint64_t seed = 0) {
  if (count < 1) throw InvalidArgument("halfspace_sequence: count must be >= 1");
  HalfSpaceSequence seq;
  seq.strategy = strategy;
  seq.seed = seed;
  const double mean = spec.extent / 4.0;
  switch (strategy) {
    case HalfSpaceStrategy::GridExactAxes: {
      const auto cat = grid_exact_catalog(spec);
      for (std::size_t i = 0; i < count; ++i) seq.halfspaces.push_back(cat[i % cat.size()]);
      break;
    }
    case HalfSpaceStrategy::RandomDense: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
      std::exponential_distribution<double> offset(1.0 / mean);
      std::bernoulli_distribution sign(0.5);
      for (std::size_t i = 0; i < count; ++i) {
        Point n{1.0, 0.0};
        if (spec.dim == 1) {
          n[0] = sign(rng) ? 1.0 : -1.0;
        } else {
          const double a = angle(rng);
          n = {std::cos(a), std::sin(a)};
        }
        seq.halfspaces.push_back(HalfSpace::make(spec, n, offset(rng)));
      }
      break;
    }
    case HalfSpaceStrategy::LowDiscrepancy: {
      const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
      double frac = std::fmod(static_cast<double>(seed) * golden, 1.0);
      for (std::size_t i = 0; i < count; ++i) {
        frac = std::fmod(frac + golden, 1.0);
        // van der Corput, base 2
        double vdc = 0.0, base = 0.5;
        for (std::size_t n = i + 1 + seed; n > 0; n >>= 1, base /= 2) vdc += (n & 1) * base;
        Point n{1.0, 0.0};
        if (spec.dim == 1) {
          n[0] = frac < 0.5 ? 1.0 : -1.0;
        } else {
          const double a = 2.0 * std::numbers::pi * frac;
          n = {std::cos(a), std::sin(a)};
        }
        seq.halfspaces.push_back(HalfSpace::make(spec, n, -mean * std::log1p(-vdc)));
      }
      break;
    }
  }
  return seq;
}

enum class IterationSchedule {
  Triangular,  // step n applies H_1, ..., H_n
  Linear       // step n applies H_n only
};

struct IterateOptions {
  double p = 2.0;
  IterationSchedule schedule = IterationSchedule::Triangular;
  double cell_budget = 4e9;  // polarized cells over the whole run
};

struct IterationTrace {
  struct Row {
    int step = 0;
    double lp_distance = 0.0;
    double seminorm = 0.0;
    std::optional<double> energy;
  };

  double p = 2.0;
  bool grid_exact = true;
  std::vector<Row> rows;
  GridFunction final_state;
  GridFunction target;

  void write_csv(std::ostream& out) const {
    out << "step,lp_distance,seminorm,J\n";
    out.precision(17);
    for (const auto& r : rows) {
      out << r.step << ',' << r.lp_distance << ',' << r.seminorm << ',';
      if (r.energy) out << *r.energy;
      out << '\n';
    }
  }
};

/// Total number of polarized cells a run would perform.
inline double iteration_cost(const GridSpec& spec, int steps, IterationSchedule schedule) {
  const double n = steps;
  const double polarizations = schedule == IterationSchedule::Triangular ? n * (n + 1) / 2 : n;
  return polarizations * static_cast<double>(spec.size());
}

/// Runs the polarization sequence and records, per step, ||u_n - u*||_p,
/// ||grad u_n||_p and (if an integrand is given) J(u_n). Row 0 is u_0 = u.
inline IterationTrace polarization_iterate(const GridFunction& u, const HalfSpaceSequence& seq,
                                           int steps, const IterateOptions& opts = {},
                                           const Integrand* integrand = nullptr) {
  if (steps < 1) throw InvalidArgument("polarization_iterate: steps must be >= 1");
  if (seq.halfspaces.size() < static_cast<std::size_t>(steps))
    throw InvalidArgument("polarization_iterate: sequence shorter than the number of steps");
  const double cost = iteration_cost(u.spec(), steps, opts.schedule);
  if (cost > opts.cell_budget)
    throw BudgetExceeded("polarization_iterate: " + std::to_string(cost) +
                         " cell operations exceed the budget of " +
                         std::to_string(opts.cell_budget));

  IterationTrace trace;
  trace.p = opts.p;
  trace.target = schwarz_symmetrize(u);
  trace.grid_exact = true;
  for (int n = 0; n < steps; ++n) trace.grid_exact = trace.grid_exact && seq.halfspaces[n].exact_on(u.spec());

  auto record = [&](int step, const GridFunction& v) {
    IterationTrace::Row row;
    row.step = step;
    row.lp_distance = lp_distance(v, trace.target, opts.p);
    row.seminorm = sobolev_seminorm(v, opts.p);
    if (integrand) row.energy = evaluate_J(v, *integrand);
    trace.rows.push_back(row);
  };

  GridFunction current = u;
  record(0, current);
  for (int n = 1; n <= steps; ++n) {
    if (opts.schedule == IterationSchedule::Triangular) {
      for (int k = 0; k < n; ++k) current = polarize(current, seq.halfspaces[k]);
    } else {
      current = polarize(current, seq.halfspaces[n - 1]);
    }
    record(n, current);
  }
  trace.final_state = std::move(current);
  return trace;
}

} // namespace schwarz
