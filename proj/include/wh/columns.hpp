#pragma once

// Columnar text (abscissa, Re, Im) for frequency slices, grid functions and sampled data.

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "dirichlet.hpp"

namespace wh {

struct ColumnRow {
  double t = 0.0;
  cplx value = 0.0;
};

inline void write_columns(std::ostream& out, const std::vector<ColumnRow>& rows) {
  std::ostringstream s;
  s.precision(17);
  for (const auto& r : rows) s << r.t << ' ' << r.value.real() << ' ' << r.value.imag() << '\n';
  out << s.str();
}

/// Reads whitespace-separated rows of two or three numbers; '#' starts a comment line.
inline std::vector<ColumnRow> read_columns(std::istream& in) {
  std::vector<ColumnRow> rows;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    double t, re, im = 0.0;
    require(bool(s >> t >> re), "columns", "line " + std::to_string(number) + ": expected at least two numbers");
    if (!(s >> im)) im = 0.0;
    rows.push_back({t, cplx(re, im)});
  }
  require(!rows.empty(), "columns", "no data rows");
  return rows;
}

inline std::vector<ColumnRow> columns_of(const FreqSlice& f) {
  std::vector<ColumnRow> rows(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) rows[k] = {f.node(k), f[k]};
  return rows;
}

inline std::vector<ColumnRow> columns_of(const GridFunction& u) {
  std::vector<ColumnRow> rows(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) rows[k] = {u.x(k), u[k]};
  return rows;
}

/// Rebuilds a grid function from rows at x_k = -X + k h; the grid is inferred from the abscissae.
inline GridFunction grid_function_from_columns(const std::vector<ColumnRow>& rows,
                                               std::optional<Region> support = std::nullopt) {
  SpaceGrid g{rows.size(), -rows.front().t};
  g.validate();
  const double h = g.spacing();
  std::vector<cplx> v(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    require(std::abs(rows[k].t - g.x(k)) <= 1e-9 * h * double(rows.size()), "columns",
            "row " + std::to_string(k) + " is off the uniform grid centred at 0");
    v[k] = rows[k].value;
  }
  return GridFunction(g, std::move(v), support);
}

/// Cubic B-spline interpolant of rows on a uniform grid, zero outside [first, last] abscissa.
struct SampledFunction {
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  std::shared_ptr<Spline> re, im;
  double lo = 0.0, hi = 0.0;

  explicit SampledFunction(const std::vector<ColumnRow>& rows) {
    require(rows.size() >= 8, "columns", "need at least 8 samples of the data");
    lo = rows.front().t, hi = rows.back().t;
    const double h = (hi - lo) / double(rows.size() - 1);
    require(h > 0, "columns", "abscissae must increase");
    std::vector<double> r(rows.size()), i(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      require(std::abs(rows[k].t - (lo + double(k) * h)) <= 1e-9 * (std::abs(lo) + double(k) * h + h), "columns",
              "abscissae must be uniform");
      r[k] = rows[k].value.real(), i[k] = rows[k].value.imag();
    }
    re = std::make_shared<Spline>(r.begin(), r.end(), lo, h);
    im = std::make_shared<Spline>(i.begin(), i.end(), lo, h);
  }
  bool within(double x) const { return x >= lo && x <= hi; }
  cplx operator()(double x) const { return within(x) ? cplx((*re)(x), (*im)(x)) : cplx(0.0); }
  cplx prime(double x) const { return within(x) ? cplx(re->prime(x), im->prime(x)) : cplx(0.0); }
  cplx double_prime(double x) const { return within(x) ? cplx(re->double_prime(x), im->double_prime(x)) : cplx(0.0); }
};

/// Half-line data w sampled from x = 0; w is taken as zero beyond the last sample, so it should have decayed there.
inline Profile profile_from_columns(const std::vector<ColumnRow>& rows) {
  require(!rows.empty() && std::abs(rows.front().t) < 1e-12, "columns", "data must start at x = 0");
  SampledFunction s(rows);
  return Profile::smooth([s](double x) { return s(x); }, [s](double x) { return s.prime(x); },
                         [s](double x) { return s.double_prime(x); }, 45.0 / s.hi);
}

}  // namespace wh
