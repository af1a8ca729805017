#pragma once

// GF1 text format:
//   GF1 dim=<N> M=<M> L=<L>
//   <M^N whitespace separated decimal values, row-major>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "schwarz/grid.hpp"

namespace schwarz::gf1 {

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string take_field(const std::string& token, const std::string& key) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0)
    throw FormatError("GF1 header: expected '" + prefix + "...', got '" + token + "'");
  return token.substr(prefix.size());
}

template <class T>
T parse_number(const std::string& s, const char* what) {
  std::istringstream is(s);
  T value{};
  is >> value;
  if (!is || !is.eof()) throw FormatError(std::string("GF1 header: bad ") + what + " '" + s + "'");
  return value;
}

} // namespace detail

inline GridFunction read(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("GF1: empty input");
  std::istringstream hs(header);
  std::string magic, tdim, tm, tl;
  hs >> magic >> tdim >> tm >> tl;
  if (magic != "GF1") throw FormatError("GF1: missing magic 'GF1'");
  const int dim = detail::parse_number<int>(detail::take_field(tdim, "dim"), "dim");
  const int cells = detail::parse_number<int>(detail::take_field(tm, "M"), "M");
  const double extent = detail::parse_number<double>(detail::take_field(tl, "L"), "L");
  if (cells < 1 || cells % 2 == 0) throw FormatError("GF1: M must be a positive odd integer");
  GridSpec spec;
  try {
    spec = GridSpec::make(dim, cells, extent);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("GF1: ") + e.what());
  }
  std::vector<double> values;
  values.reserve(spec.size());
  std::string tok;
  while (in >> tok) {
    double v = 0;
    try {
      std::size_t used = 0;
      v = std::stod(tok, &used);
      if (used != tok.size()) throw FormatError("GF1: bad value '" + tok + "'");
    } catch (const std::logic_error&) {
      throw FormatError("GF1: bad value '" + tok + "'");
    }
    if (v < 0.0) throw FormatError("GF1: negative value " + tok);
    if (!std::isfinite(v)) throw FormatError("GF1: non-finite value " + tok);
    values.push_back(v);
  }
  if (values.size() != spec.size())
    throw FormatError("GF1: expected " + std::to_string(spec.size()) + " values, got " +
                      std::to_string(values.size()));
  return GridFunction(spec, std::move(values));
}

inline GridFunction read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open GF1 file '" + path + "'");
  return read(in);
}

/// Values are printed with 17 significant digits so that read(write(u)) == u.
inline void write(std::ostream& out, const GridFunction& u) {
  const GridSpec& s = u.spec();
  out << "GF1 dim=" << s.dim << " M=" << s.cells << " L=" << detail::fmt(s.extent) << "\n";
  const std::size_t per_line = static_cast<std::size_t>(s.cells);
  for (std::size_t i = 0; i < u.size(); ++i) {
    out << detail::fmt(u[i]);
    out << (((i + 1) % per_line == 0) ? '\n' : ' ');
  }
}

inline void write_file(const std::string& path, const GridFunction& u) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  write(out, u);
}

/// Plot-ready CSV: cell center coordinates and value per row.
inline void write_csv(std::ostream& out, const GridFunction& u) {
  const GridSpec& s = u.spec();
  out << (s.dim == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point c = s.center(i);
    out << detail::fmt(c[0]) << ',';
    if (s.dim == 2) out << detail::fmt(c[1]) << ',';
    out << detail::fmt(u[i]) << '\n';
  }
}

} // namespace schwarz::gf1
