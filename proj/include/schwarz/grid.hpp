#pragma once

// Uniform box grids in one or two dimensions, nonnegative sampled functions,
// reflections/half-spaces, and the discrete norms used everywhere else.
//
// Functions live on [-L, L]^N sampled at the centers of M^N cells (M odd so
// that the origin is a cell center) and are zero-extended to the whole
// lattice h*Z^N. All energies are lattice sums; only the box and a one-cell
// halo around it can carry nonzero terms.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schwarz/error.hpp"

namespace schwarz {

/// Signed lattice offset from the origin cell, in cells. Unused axes are 0.
using Offset = std::array<int, 2>;
/// Point of R^N; unused coordinates are 0.
using Point = std::array<double, 2>;

namespace detail {

/// Pairwise (tree) summation in a fixed order.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t mid = xs.size() / 2;
  return pairwise_sum(xs.first(mid)) + pairwise_sum(xs.subspan(mid));
}

inline double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

} // namespace detail

struct GridSpec {
  int dim = 1;
  int cells = 1;      // M, odd
  double extent = 1;  // L

  static GridSpec make(int dim, int cells, double extent) {
    if (dim != 1 && dim != 2)
      throw InvalidArgument("grid dimension must be 1 or 2, got " + std::to_string(dim));
    if (cells < 1 || cells % 2 == 0)
      throw InvalidArgument("cells per axis must be a positive odd integer, got " +
                            std::to_string(cells));
    if (!(extent > 0.0) || !std::isfinite(extent))
      throw InvalidArgument("grid half-width must be positive and finite");
    return GridSpec{dim, cells, extent};
  }

  double spacing() const { return 2.0 * extent / cells; }
  double cell_volume() const {
    const double h = spacing();
    return dim == 1 ? h : h * h;
  }
  int half() const { return (cells - 1) / 2; }
  std::size_t size() const {
    return dim == 1 ? static_cast<std::size_t>(cells)
                    : static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells);
  }

  bool contains(const Offset& o) const {
    const int k = half();
    for (int a = 0; a < dim; ++a)
      if (o[a] < -k || o[a] > k) return false;
    return true;
  }

  /// Row-major index (axis 0 slowest). Requires contains(o).
  std::size_t flat(const Offset& o) const {
    const int k = half();
    if (dim == 1) return static_cast<std::size_t>(o[0] + k);
    return static_cast<std::size_t>(o[0] + k) * static_cast<std::size_t>(cells) +
           static_cast<std::size_t>(o[1] + k);
  }

  Offset offset(std::size_t index) const {
    const int k = half();
    if (dim == 1) return {static_cast<int>(index) - k, 0};
    return {static_cast<int>(index / cells) - k, static_cast<int>(index % cells) - k};
  }

  Point center(const Offset& o) const {
    const double h = spacing();
    return {o[0] * h, dim == 2 ? o[1] * h : 0.0};
  }

  Point center(std::size_t index) const { return center(offset(index)); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Squared lattice distance of an offset to the origin, in cells^2 (exact).
inline long long offset_norm2(const Offset& o) {
  return static_cast<long long>(o[0]) * o[0] + static_cast<long long>(o[1]) * o[1];
}

/// Calls fn(offset) for every lattice cell that can carry energy: the box and
/// its one-cell halo, in row-major order.
template <class Fn>
void for_each_energy_cell(const GridSpec& spec, Fn&& fn) {
  const int k = spec.half() + 1;
  if (spec.dim == 1) {
    for (int i = -k; i <= k; ++i) fn(Offset{i, 0});
    return;
  }
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j) fn(Offset{i, j});
}

/// Anything that exposes a grid, its values and zero-extended lattice access.
template <class F>
concept SampledField = requires(const F& f, const Offset& o) {
  { f.spec() } -> std::convertible_to<GridSpec>;
  { f.values() } -> std::convertible_to<std::span<const double>>;
  { f.value_at(o) } -> std::convertible_to<double>;
};

/// Non-owning view over values on a grid. No sign check; used by the flow and
/// by checks that must also see signed data.
class FieldView {
public:
  FieldView(const GridSpec& spec, std::span<const double> values)
      : spec_(spec), values_(values) {
    if (values.size() != spec.size())
      throw InvalidArgument("value count does not match grid size");
  }

  const GridSpec& spec() const { return spec_; }
  std::span<const double> values() const { return values_; }
  double value_at(const Offset& o) const {
    return spec_.contains(o) ? values_[spec_.flat(o)] : 0.0;
  }

private:
  GridSpec spec_;
  std::span<const double> values_;
};

namespace detail {

template <class Self>
class FieldStorage {
public:
  const GridSpec& spec() const { return spec_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& data() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double value_at(const Offset& o) const {
    return spec_.contains(o) ? values_[spec_.flat(o)] : 0.0;
  }
  FieldView view() const { return FieldView(spec_, values_); }

  friend bool operator==(const Self& a, const Self& b) {
    return a.spec_ == b.spec_ && a.values_ == b.values_;
  }

protected:
  FieldStorage() = default;
  FieldStorage(const GridSpec& spec, std::vector<double> values)
      : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.size())
      throw InvalidArgument("expected " + std::to_string(spec_.size()) + " values, got " +
                            std::to_string(values_.size()));
    for (double v : values_)
      if (!std::isfinite(v)) throw InvalidArgument("grid values must be finite");
  }

  GridSpec spec_;
  std::vector<double> values_;
};

} // namespace detail

/// Real-valued (possibly signed) samples. Only used where the toolkit must
/// ingest sign-changing data before the |u| reduction.
class SignedField : public detail::FieldStorage<SignedField> {
public:
  SignedField() = default;
  SignedField(const GridSpec& spec, std::vector<double> values)
      : FieldStorage(spec, std::move(values)) {}

  template <class Fn>
  static SignedField sample(const GridSpec& spec, Fn&& fn) {
    std::vector<double> v(spec.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(spec.center(i));
    return SignedField(spec, std::move(v));
  }
};

/// Nonnegative function on a box grid, zero outside the box.
class GridFunction : public detail::FieldStorage<GridFunction> {
public:
  GridFunction() = default;
  GridFunction(const GridSpec& spec, std::vector<double> values)
      : FieldStorage(spec, std::move(values)) {
    for (double v : values_)
      if (v < 0.0) throw InvalidArgument("grid function values must be nonnegative");
  }

  static GridFunction zeros(const GridSpec& spec) {
    return GridFunction(spec, std::vector<double>(spec.size(), 0.0));
  }

  template <class Fn>
  static GridFunction sample(const GridSpec& spec, Fn&& fn) {
    std::vector<double> v(spec.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(spec.center(i));
    return GridFunction(spec, std::move(v));
  }

  GridFunction scaled(double c) const {
    if (c < 0.0) throw InvalidArgument("scale factor must be nonnegative");
    std::vector<double> v = values_;
    for (double& x : v) x *= c;
    return GridFunction(spec_, std::move(v));
  }

  double max() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
  }
};

/// Closed half-space H = {x : x.normal <= offset} with offset >= 0, so 0 is in H.
class HalfSpace {
public:
  HalfSpace() = default;

  /// Builds a half-space; the normal is normalized. grid_exact stays false.
  static HalfSpace make(int dim, Point normal, double offset) {
    if (dim != 1 && dim != 2) throw InvalidArgument("half-space dimension must be 1 or 2");
    if (dim == 1) normal[1] = 0.0;
    const double n = std::sqrt(detail::dot(normal, normal, dim));
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("half-space normal must be nonzero");
    if (!(offset >= 0.0) || !std::isfinite(offset))
      throw InvalidArgument("half-space offset must be >= 0 so that the origin lies in H");
    HalfSpace H;
    H.dim_ = dim;
    H.normal_ = {normal[0] / n, normal[1] / n};
    H.offset_ = offset;
    return H;
  }

  /// Builds a half-space and classifies it against a grid: grid_exact iff the
  /// reflection maps every lattice center to a lattice center and every box
  /// cell outside H to a box cell.
  static HalfSpace make(const GridSpec& spec, Point normal, double offset) {
    HalfSpace H = make(spec.dim, normal, offset);
    H.grid_exact_ = H.classify(spec);
    H.classified_for_ = spec;
    H.classified_ = true;
    return H;
  }

  int dim() const { return dim_; }
  const Point& normal() const { return normal_; }
  double offset() const { return offset_; }
  bool grid_exact() const { return grid_exact_; }

  /// grid_exact with respect to a particular grid (reclassifies if H was
  /// built for a different one).
  bool exact_on(const GridSpec& spec) const {
    if (classified_ && classified_for_ == spec) return grid_exact_;
    return spec.dim == dim_ && classify(spec);
  }

  bool contains(const Point& x) const {
    return detail::dot(x, normal_, dim_) <= offset_ + boundary_slack(x);
  }

  Point reflect(const Point& x) const {
    const double s = 2.0 * (detail::dot(x, normal_, dim_) - offset_);
    Point y{x[0] - s * normal_[0], x[1] - s * normal_[1]};
    if (dim_ == 1) y[1] = 0.0;
    return y;
  }

  /// Lattice image of a cell under the reflection. Only meaningful when the
  /// reflection is lattice preserving.
  Offset reflect(const GridSpec& spec, const Offset& o) const {
    const Point y = reflect(spec.center(o));
    const double h = spec.spacing();
    return {static_cast<int>(std::lround(y[0] / h)),
            spec.dim == 2 ? static_cast<int>(std::lround(y[1] / h)) : 0};
  }

private:
  // Centers on the hyperplane are fixed by the reflection, so the side they
  // are assigned to does not change u^H; the slack only absorbs rounding.
  double boundary_slack(const Point& x) const {
    return 1e-12 * (1.0 + std::abs(offset_) + std::abs(x[0]) + std::abs(x[1]));
  }

  bool classify(const GridSpec& spec) const {
    const double h = spec.spacing();
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const Offset o = spec.offset(i);
      const Point y = reflect(spec.center(o));
      for (int a = 0; a < spec.dim; ++a) {
        const double q = y[a] / h;
        if (std::abs(q - std::round(q)) > 1e-9) return false;
      }
      if (!contains(spec.center(o)) && !spec.contains(reflect(spec, o))) return false;
    }
    return true;
  }

  int dim_ = 1;
  Point normal_{1.0, 0.0};
  double offset_ = 0.0;
  bool grid_exact_ = false;
  bool classified_ = false;
  GridSpec classified_for_{};
};

/// sigma_H(x) = x - 2 (x.nu - d) nu.
inline Point reflect(const Point& x, const HalfSpace& H) { return H.reflect(x); }

/// mu({u > t}) = (number of cells with value > t) * h^N.
template <SampledField F>
double distribution_function(const F& u, double t) {
  if (!(t > 0.0)) throw InvalidArgument("distribution function is defined for t > 0 only");
  const auto vals = u.values();
  const auto count = std::count_if(vals.begin(), vals.end(), [t](double v) { return v > t; });
  return static_cast<double>(count) * u.spec().cell_volume();
}

/// Gradient magnitude at any lattice cell.
///
/// Per axis the squared forward and backward difference quotients are
/// averaged: |grad u|^2 = sum_a ((D+_a u)^2 + (D-_a u)^2) / 2. The stencil
/// commutes with every lattice reflection (axis, half-cell and diagonal), so a
/// reflected function has the reflected gradient field bit for bit.
template <SampledField F>
double stencil_gradient(const F& u, const Offset& o) {
  const double h = u.spec().spacing();
  const double c = u.value_at(o);
  double acc = 0.0;
  for (int a = 0; a < u.spec().dim; ++a) {
    Offset up = o, dn = o;
    ++up[a];
    --dn[a];
    const double f = (u.value_at(up) - c) / h;
    const double b = (c - u.value_at(dn)) / h;
    acc += (f * f + b * b) / 2.0;
  }
  return std::sqrt(acc);
}

/// Per-cell |grad u| on the box.
template <SampledField F>
GridFunction gradient_norm(const F& u) {
  const GridSpec& spec = u.spec();
  std::vector<double> g(spec.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = stencil_gradient(u, spec.offset(i));
  return GridFunction(spec, std::move(g));
}

/// (sum_i |u_i|^p h^N)^(1/p).
template <SampledField F>
double lp_norm(const F& u, double p) {
  if (!(p > 1.0)) throw InvalidArgument("L^p norm requires p > 1");
  const auto vals = u.values();
  std::vector<double> terms(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) terms[i] = std::pow(std::abs(vals[i]), p);
  return std::pow(detail::pairwise_sum(terms) * u.spec().cell_volume(), 1.0 / p);
}

/// ||grad u||_p over the box and its halo.
template <SampledField F>
double sobolev_seminorm(const F& u, double p) {
  if (!(p > 1.0)) throw InvalidArgument("Sobolev seminorm requires p > 1");
  std::vector<double> terms;
  for_each_energy_cell(u.spec(), [&](const Offset& o) {
    terms.push_back(std::pow(stencil_gradient(u, o), p));
  });
  return std::pow(detail::pairwise_sum(terms) * u.spec().cell_volume(), 1.0 / p);
}

/// ||u - v||_p for two fields on the same grid.
template <SampledField F, SampledField G>
double lp_distance(const F& u, const G& v, double p) {
  if (!(u.spec() == v.spec())) throw InvalidArgument("lp_distance: grids differ");
  if (!(p > 1.0)) throw InvalidArgument("L^p norm requires p > 1");
  const auto a = u.values();
  const auto b = v.values();
  std::vector<double> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) terms[i] = std::pow(std::abs(a[i] - b[i]), p);
  return std::pow(detail::pairwise_sum(terms) * u.spec().cell_volume(), 1.0 / p);
}

/// Named measurements of one function in a W^{1,p} context, with the
/// quadrature weight they were computed with.
struct Measurement {
  double lp_exponent = 2.0;
  double weight = 1.0;  // spacing^dim
  bool below_dimension = false;  // 1 < p < N holds
  std::map<std::string, double> values;
};

template <SampledField F>
Measurement measure(const F& u, double p) {
  Measurement m;
  m.lp_exponent = p;
  m.weight = u.spec().cell_volume();
  m.below_dimension = p > 1.0 && p < u.spec().dim;
  m.values["lp_norm"] = lp_norm(u, p);
  m.values["seminorm"] = sobolev_seminorm(u, p);
  const auto vals = u.values();
  m.values["sup"] = vals.empty() ? 0.0 : *std::max_element(vals.begin(), vals.end());
  m.values["support_measure"] =
      static_cast<double>(std::count_if(vals.begin(), vals.end(), [](double v) { return v > 0; })) *
      m.weight;
  return m;
}

/// Sorted (descending) copy of the values; two functions on the same grid are
/// discretely equimeasurable iff these agree exactly.
template <SampledField F>
std::vector<double> sorted_values(const F& u) {
  const auto v = u.values();
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

template <SampledField F, SampledField G>
bool equimeasurable(const F& u, const G& v) {
  return u.spec() == v.spec() && sorted_values(u) == sorted_values(v);
}

/// Multilinear interpolation of the zero-extended lattice function at x.
template <SampledField F>
double interpolate(const F& u, const Point& x) {
  const GridSpec& spec = u.spec();
  const double h = spec.spacing();
  if (spec.dim == 1) {
    const double q = x[0] / h;
    const double fl = std::floor(q);
    const double w = q - fl;
    const int i = static_cast<int>(fl);
    return (1.0 - w) * u.value_at({i, 0}) + (w == 0.0 ? 0.0 : w * u.value_at({i + 1, 0}));
  }
  const double q0 = x[0] / h, q1 = x[1] / h;
  const double f0 = std::floor(q0), f1 = std::floor(q1);
  const double w0 = q0 - f0, w1 = q1 - f1;
  const int i = static_cast<int>(f0), j = static_cast<int>(f1);
  double r = (1 - w0) * (1 - w1) * u.value_at({i, j});
  if (w0 != 0.0) r += w0 * (1 - w1) * u.value_at({i + 1, j});
  if (w1 != 0.0) r += (1 - w0) * w1 * u.value_at({i, j + 1});
  if (w0 != 0.0 && w1 != 0.0) r += w0 * w1 * u.value_at({i + 1, j + 1});
  return r;
}

} // namespace schwarz
