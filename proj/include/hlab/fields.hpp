#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace hlab {

using cd = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class AliasingError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Uniform grid with nodes x_i = -L + i * (2L / N), i = 0..N-1, per axis (N even).
// The origin is a node and differences of nodes are nodes. Linear indices are
// row-major (last axis fastest).
struct Grid {
  std::vector<double> half_extent;
  std::vector<int> points;

  static Grid uniform(int dim, double half_extent, int points);

  int dim() const { return static_cast<int>(points.size()); }
  std::size_t size() const;
  double spacing(int axis) const { return 2.0 * half_extent[axis] / points[axis]; }
  double node(int axis, int i) const { return -half_extent[axis] + i * spacing(axis); }
  // Index of the node at coordinate 0 on an axis.
  int zero_index(int axis) const { return points[axis] / 2; }
  double cell_volume() const;
  void coords(std::size_t index, double* out) const;
  std::vector<double> coords(std::size_t index) const;
  // Grid with every length multiplied by s (same node counts).
  Grid scaled(double s) const;

  bool operator==(const Grid& other) const = default;
};

struct SampledField {
  Grid grid;
  std::vector<cd> values;

  SampledField() = default;
  SampledField(Grid g, std::vector<cd> v);
  explicit SampledField(Grid g);

  static SampledField sample(const Grid& g, const std::function<cd(std::span<const double>)>& fn);

  std::size_t size() const { return values.size(); }
  cd& operator[](std::size_t i) { return values[i]; }
  const cd& operator[](std::size_t i) const { return values[i]; }

  SampledField& operator+=(const SampledField& o);
  SampledField& operator-=(const SampledField& o);
  SampledField& operator*=(cd s);
};

SampledField operator+(SampledField a, const SampledField& b);
SampledField operator-(SampledField a, const SampledField& b);
SampledField operator*(cd s, SampledField a);

// Midpoint-rule L^p norm (p = kInf gives the grid maximum).
double lp_norm(const SampledField& f, double p);
// <a, b> = sum a conj(b) dV.
cd inner(const SampledField& a, const SampledField& b);

// Function of (V, Z): values indexed (central node, horizontal node), i.e.
// values[c * horizontal.size() + h].
struct CylinderField {
  Grid horizontal;
  Grid central;
  std::vector<cd> values;
  bool separable = false;
  std::optional<SampledField> h_factor;  // central factor
  std::optional<SampledField> g_factor;  // horizontal factor

  // f = h (x) g.
  static CylinderField from_factors(const SampledField& h, const SampledField& g);
  static CylinderField dense(const Grid& horizontal, const Grid& central, std::vector<cd> values);
  // Explicit values plus claimed factors; throws GridError unless the values are
  // the outer product of the factors.
  static CylinderField with_factors(const SampledField& h, const SampledField& g, std::vector<cd> values);

  cd at(std::size_t central_index, std::size_t horizontal_index) const {
    return values[central_index * horizontal.size() + horizontal_index];
  }
  // Horizontal slice at a central node.
  SampledField slice(std::size_t central_index) const;
};

// Mixed norm L^inner(central) L^outer(horizontal): the central variable is the
// inner integral. Infinite exponents become grid maxima. Throws on non-finite values.
double mixed_norm(const CylinderField& f, double inner_exp, double outer_exp);

// V -> int e^{i eta.Z} f(V, Z) dZ by midpoint quadrature. Throws AliasingError
// unless |eta| * spacing < pi on every central axis.
SampledField central_fourier(const CylinderField& f, std::span<const double> eta);
// int e^{i eta.Z} h(Z) dZ for a function on the central grid.
cd central_fourier(const SampledField& h, std::span<const double> eta);

struct ExponentSpec {
  double r = 1.0;
  double p = 1.0;
  double q = 2.0;

  static double conjugate(double x);
  double r_conj() const { return conjugate(r); }
  double p_conj() const { return conjugate(p); }
  double q_conj() const { return conjugate(q); }
  // 1 <= p <= 2 <= q <= inf and r in [1, inf].
  bool in_theorem_range() const;
};

// CSV with header "x1,...,xD,re,im", one row per node in linear-index order.
void write_csv(std::ostream& os, const SampledField& f);
SampledField read_csv(std::istream& is);

// Relative L^2 error ||a - b|| / ||b|| restricted to the central box covering
// `fraction` of each axis' extent.
double interior_relative_error(const SampledField& a, const SampledField& b, double fraction = 0.8);

}  // namespace hlab
