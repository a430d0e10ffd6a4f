#include "hlab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

namespace hlab {

Grid Grid::uniform(int dim, double half_extent, int points) {
  if (dim < 1) throw GridError("grid dimension must be >= 1");
  if (!(half_extent > 0.0)) throw GridError("half_extent must be positive");
  if (points < 2 || points % 2 != 0) throw GridError("points_per_axis must be even and >= 2");
  Grid g;
  g.half_extent.assign(static_cast<std::size_t>(dim), half_extent);
  g.points.assign(static_cast<std::size_t>(dim), points);
  return g;
}

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int p : points) s *= static_cast<std::size_t>(p);
  return s;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing(a);
  return v;
}

void Grid::coords(std::size_t index, double* out) const {
  for (int a = dim() - 1; a >= 0; --a) {
    const auto p = static_cast<std::size_t>(points[a]);
    out[a] = node(a, static_cast<int>(index % p));
    index /= p;
  }
}

std::vector<double> Grid::coords(std::size_t index) const {
  std::vector<double> c(static_cast<std::size_t>(dim()));
  coords(index, c.data());
  return c;
}

Grid Grid::scaled(double s) const {
  Grid g = *this;
  for (double& h : g.half_extent) h *= s;
  return g;
}

SampledField::SampledField(Grid g, std::vector<cd> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw GridError("value count does not match grid node count");
}

SampledField::SampledField(Grid g) : grid(std::move(g)), values(grid.size(), cd(0.0, 0.0)) {}

SampledField SampledField::sample(const Grid& g, const std::function<cd(std::span<const double>)>& fn) {
  SampledField f(g);
  std::vector<double> x(static_cast<std::size_t>(g.dim()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.coords(i, x.data());
    f.values[i] = fn(x);
  }
  return f;
}

SampledField& SampledField::operator+=(const SampledField& o) {
  if (!(grid == o.grid)) throw GridError("grid mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

SampledField& SampledField::operator-=(const SampledField& o) {
  if (!(grid == o.grid)) throw GridError("grid mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

SampledField& SampledField::operator*=(cd s) {
  for (auto& v : values) v *= s;
  return *this;
}

SampledField operator+(SampledField a, const SampledField& b) { return a += b; }
SampledField operator-(SampledField a, const SampledField& b) { return a -= b; }
SampledField operator*(cd s, SampledField a) { return a *= s; }

double lp_norm(const SampledField& f, double p) {
  if (p == kInf) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (const auto& v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

cd inner(const SampledField& a, const SampledField& b) {
  if (!(a.grid == b.grid)) throw GridError("grid mismatch");
  cd s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values[i] * std::conj(b.values[i]);
  return s * a.grid.cell_volume();
}

CylinderField CylinderField::from_factors(const SampledField& h, const SampledField& g) {
  CylinderField f;
  f.horizontal = g.grid;
  f.central = h.grid;
  f.values.resize(h.size() * g.size());
  for (std::size_t c = 0; c < h.size(); ++c) {
    for (std::size_t i = 0; i < g.size(); ++i) f.values[c * g.size() + i] = h.values[c] * g.values[i];
  }
  f.separable = true;
  f.h_factor = h;
  f.g_factor = g;
  return f;
}

CylinderField CylinderField::dense(const Grid& horizontal, const Grid& central, std::vector<cd> values) {
  if (values.size() != horizontal.size() * central.size()) {
    throw GridError("value count does not match central x horizontal node count");
  }
  CylinderField f;
  f.horizontal = horizontal;
  f.central = central;
  f.values = std::move(values);
  return f;
}

CylinderField CylinderField::with_factors(const SampledField& h, const SampledField& g, std::vector<cd> values) {
  CylinderField f = from_factors(h, g);
  if (values.size() != f.values.size()) throw GridError("value count does not match factor grids");
  double scale = 0.0;
  for (const auto& v : f.values) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - f.values[i]) > 1e-12 * std::max(scale, 1e-300)) {
      throw GridError("separable flag set but values are not the outer product of the factors");
    }
  }
  f.values = std::move(values);
  return f;
}

SampledField CylinderField::slice(std::size_t central_index) const {
  const std::size_t nh = horizontal.size();
  std::vector<cd> v(values.begin() + static_cast<std::ptrdiff_t>(central_index * nh),
                    values.begin() + static_cast<std::ptrdiff_t>((central_index + 1) * nh));
  return SampledField(horizontal, std::move(v));
}

namespace {

void check_exponent(double e) {
  if (!(e >= 1.0)) throw std::invalid_argument("Lebesgue exponent must lie in [1, inf]");
}

}  // namespace

double mixed_norm(const CylinderField& f, double inner_exp, double outer_exp) {
  check_exponent(inner_exp);
  check_exponent(outer_exp);
  for (const auto& v : f.values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::domain_error("mixed_norm: field has non-finite entries");
    }
  }
  const std::size_t nh = f.horizontal.size();
  const std::size_t nc = f.central.size();
  const double dc = f.central.cell_volume();
  const double dh = f.horizontal.cell_volume();
  double outer = 0.0;
  for (std::size_t h = 0; h < nh; ++h) {
    double in = 0.0;
    if (inner_exp == kInf) {
      for (std::size_t c = 0; c < nc; ++c) in = std::max(in, std::abs(f.values[c * nh + h]));
    } else {
      for (std::size_t c = 0; c < nc; ++c) in += std::pow(std::abs(f.values[c * nh + h]), inner_exp);
      in = std::pow(in * dc, 1.0 / inner_exp);
    }
    if (outer_exp == kInf) {
      outer = std::max(outer, in);
    } else {
      outer += std::pow(in, outer_exp);
    }
  }
  return outer_exp == kInf ? outer : std::pow(outer * dh, 1.0 / outer_exp);
}

namespace {

void check_aliasing(const Grid& central, std::span<const double> eta) {
  if (static_cast<int>(eta.size()) != central.dim()) throw GridError("eta dimension does not match central grid");
  double norm = 0.0;
  for (double e : eta) norm += e * e;
  norm = std::sqrt(norm);
  for (int a = 0; a < central.dim(); ++a) {
    if (!(norm * central.spacing(a) < std::numbers::pi)) {
      throw AliasingError("central_fourier: |eta| * spacing >= pi, central grid does not resolve e^{i eta.Z}");
    }
  }
}

std::vector<cd> plane_wave(const Grid& central, std::span<const double> eta) {
  std::vector<cd> w(central.size());
  std::vector<double> z(static_cast<std::size_t>(central.dim()));
  const double dv = central.cell_volume();
  for (std::size_t c = 0; c < w.size(); ++c) {
    central.coords(c, z.data());
    double ph = 0.0;
    for (std::size_t a = 0; a < z.size(); ++a) ph += eta[a] * z[a];
    w[c] = std::polar(dv, ph);
  }
  return w;
}

}  // namespace

SampledField central_fourier(const CylinderField& f, std::span<const double> eta) {
  check_aliasing(f.central, eta);
  const auto w = plane_wave(f.central, eta);
  const std::size_t nh = f.horizontal.size();
  if (f.separable && f.h_factor && f.g_factor) {
    cd hh = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) hh += w[c] * f.h_factor->values[c];
    SampledField out = *f.g_factor;
    out *= hh;
    return out;
  }
  SampledField out(f.horizontal);
  for (std::size_t c = 0; c < w.size(); ++c) {
    for (std::size_t h = 0; h < nh; ++h) out.values[h] += w[c] * f.values[c * nh + h];
  }
  return out;
}

cd central_fourier(const SampledField& h, std::span<const double> eta) {
  check_aliasing(h.grid, eta);
  const auto w = plane_wave(h.grid, eta);
  cd s = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) s += w[c] * h.values[c];
  return s;
}

double ExponentSpec::conjugate(double x) {
  if (x == 1.0) return kInf;
  if (x == kInf) return 1.0;
  return x / (x - 1.0);
}

bool ExponentSpec::in_theorem_range() const {
  return r >= 1.0 && p >= 1.0 && p <= 2.0 && q >= 2.0;
}

void write_csv(std::ostream& os, const SampledField& f) {
  const int d = f.grid.dim();
  for (int a = 0; a < d; ++a) os << 'x' << (a + 1) << ',';
  os << "re,im\n";
  std::vector<double> x(static_cast<std::size_t>(d));
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.grid.coords(i, x.data());
    line.str("");
    for (double v : x) line << v << ',';
    line << f.values[i].real() << ',' << f.values[i].imag() << '\n';
    os << line.str();
  }
}

SampledField read_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw GridError("read_csv: empty input");
  const auto cols = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
  if (cols < 3) throw GridError("read_csv: expected at least one coordinate column plus re,im");
  const std::size_t d = cols - 2;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != cols) throw GridError("read_csv: ragged row");
    rows.push_back(std::move(row));
  }
  Grid g;
  for (std::size_t a = 0; a < d; ++a) {
    std::set<double> uniq;
    for (const auto& r : rows) uniq.insert(r[a]);
    if (uniq.size() < 2) throw GridError("read_csv: axis with fewer than two nodes");
    const double lo = *uniq.begin();
    const double hi = *uniq.rbegin();
    const auto n = static_cast<int>(uniq.size());
    const double step = (hi - lo) / (n - 1);
    const double half = n * step / 2.0;
    if (std::abs(lo + half) > 1e-9 * half) throw GridError("read_csv: axis is not a centred uniform grid");
    g.half_extent.push_back(half);
    g.points.push_back(n);
  }
  SampledField f(g);
  if (rows.size() != g.size()) throw GridError("read_csv: row count does not match inferred grid");
  for (const auto& r : rows) {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const int i = static_cast<int>(std::lround((r[a] + g.half_extent[a]) / g.spacing(static_cast<int>(a))));
      idx = idx * static_cast<std::size_t>(g.points[a]) + static_cast<std::size_t>(i);
    }
    f.values[idx] = cd(r[d], r[d + 1]);
  }
  return f;
}

double interior_relative_error(const SampledField& a, const SampledField& b, double fraction) {
  if (!(a.grid == b.grid)) throw GridError("grid mismatch");
  const Grid& g = a.grid;
  std::vector<double> x(static_cast<std::size_t>(g.dim()));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    g.coords(i, x.data());
    bool inside = true;
    for (int ax = 0; ax < g.dim(); ++ax) inside = inside && std::abs(x[ax]) <= fraction * g.half_extent[ax];
    if (!inside) continue;
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace hlab
