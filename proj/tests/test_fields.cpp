#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hlab/fields.hpp"

using namespace hlab;

namespace {

constexpr double kPi = std::numbers::pi;

SampledField gaussian(const Grid& g, double b) {
  return SampledField::sample(g, [b](std::span<const double> z) {
    double s = 0.0;
    for (double x : z) s += x * x;
    return cd(std::exp(-b * s));
  });
}

}  // namespace

TEST(Grid, NodesAndOrigin) {
  const Grid g = Grid::uniform(2, 3.0, 8);
  EXPECT_EQ(g.size(), 64u);
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.75);
  EXPECT_DOUBLE_EQ(g.node(0, 0), -3.0);
  EXPECT_DOUBLE_EQ(g.node(1, g.zero_index(1)), 0.0);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.5625);
  // Row-major: the last axis is fastest.
  const auto c = g.coords(1);
  EXPECT_DOUBLE_EQ(c[0], -3.0);
  EXPECT_DOUBLE_EQ(c[1], -2.25);
  EXPECT_THROW(Grid::uniform(1, 1.0, 7), GridError);
  EXPECT_THROW(Grid::uniform(1, -1.0, 8), GridError);
}

TEST(MixedNorm, IndicatorOfABox) {
  // Central box of length a = 2, horizontal box of area A = 4 (sides 2 x 2).
  const Grid hz = Grid::uniform(2, 4.0, 16);
  const Grid ct = Grid::uniform(1, 4.0, 16);
  auto box = [](double half) {
    return [half](std::span<const double> z) {
      for (double x : z) {
        if (x < -half || x >= half) return cd(0.0);
      }
      return cd(1.0);
    };
  };
  const CylinderField f = CylinderField::from_factors(SampledField::sample(ct, box(1.0)), SampledField::sample(hz, box(1.0)));
  for (auto [r, p] : {std::pair{1.0, 2.0}, {2.0, 1.0}, {3.0, 1.5}}) {
    EXPECT_NEAR(mixed_norm(f, r, p), std::pow(2.0, 1.0 / r) * std::pow(4.0, 1.0 / p), 1e-12);
  }
  EXPECT_NEAR(mixed_norm(f, kInf, 2.0), 2.0, 1e-12);
}

TEST(MixedNorm, GaussianClosedForm) {
  const Grid hz = Grid::uniform(2, 8.0, 64);
  const Grid ct = Grid::uniform(1, 8.0, 64);
  const CylinderField f = CylinderField::from_factors(gaussian(ct, 1.0), gaussian(hz, 1.0));
  // inner L^1 over t gives sqrt(pi) e^{-|V|^2}; outer L^2 over V gives sqrt(pi / 2).
  EXPECT_NEAR(mixed_norm(f, 1.0, 2.0), std::sqrt(kPi) * std::sqrt(kPi / 2.0), 1e-6);
}

TEST(MixedNorm, HomogeneityAndCollapse) {
  const Grid hz = Grid::uniform(2, 6.0, 32);
  const Grid ct = Grid::uniform(1, 6.0, 32);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::vector<cd> v(hz.size() * ct.size());
  for (auto& x : v) x = cd(nd(rng), nd(rng));
  const CylinderField f = CylinderField::dense(hz, ct, v);
  std::vector<cd> v3(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) v3[i] = cd(0.0, -3.0) * v[i];
  const CylinderField f3 = CylinderField::dense(hz, ct, v3);
  for (auto [a, b] : {std::pair{1.0, 2.0}, {2.0, kInf}, {kInf, 1.0}}) {
    EXPECT_NEAR(mixed_norm(f3, a, b), 3.0 * mixed_norm(f, a, b), 1e-10 * mixed_norm(f3, a, b));
  }
  // inner = outer is the plain L^p norm over the product grid.
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    double s = 0.0;
    for (const auto& x : v) s += std::pow(std::abs(x), p);
    s *= hz.cell_volume() * ct.cell_volume();
    EXPECT_NEAR(mixed_norm(f, p, p), std::pow(s, 1.0 / p), 1e-12 * std::pow(s, 1.0 / p));
  }
}

TEST(MixedNorm, MonotoneInModulus) {
  const Grid hz = Grid::uniform(2, 3.0, 8);
  const Grid ct = Grid::uniform(1, 3.0, 8);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cd> a(hz.size() * ct.size());
    std::vector<cd> b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double m = u(rng);
      b[i] = std::polar(m, 6.0 * u(rng));
      a[i] = std::polar(m * u(rng), 6.0 * u(rng));
    }
    const auto fa = CylinderField::dense(hz, ct, a);
    const auto fb = CylinderField::dense(hz, ct, b);
    for (auto [r, p] : {std::pair{1.0, 2.0}, {3.0, 1.0}, {kInf, 2.0}, {2.0, kInf}}) {
      EXPECT_LE(mixed_norm(fa, r, p), mixed_norm(fb, r, p));
    }
  }
}

TEST(MixedNorm, RejectsNonFinite) {
  const Grid hz = Grid::uniform(2, 1.0, 2);
  const Grid ct = Grid::uniform(1, 1.0, 2);
  std::vector<cd> v(8, 1.0);
  v[3] = cd(std::nan(""), 0.0);
  EXPECT_THROW(mixed_norm(CylinderField::dense(hz, ct, v), 1.0, 2.0), std::exception);
}

TEST(CentralFourier, GaussianValues) {
  const Grid ct = Grid::uniform(1, 16.0, 256);
  const SampledField h = gaussian(ct, 0.5);
  const double eta0[1] = {0.0};
  const double eta1[1] = {1.0};
  EXPECT_NEAR(std::abs(central_fourier(h, eta0) - std::sqrt(2.0 * kPi)), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(central_fourier(h, eta1) - std::sqrt(2.0 * kPi) * std::exp(-0.5)), 0.0, 1e-8);
  const double too_high[1] = {kPi / ct.spacing(0) + 0.1};
  EXPECT_THROW(central_fourier(h, too_high), AliasingError);
}

TEST(CentralFourier, SeparableInput) {
  const Grid hz = Grid::uniform(2, 4.0, 16);
  const Grid ct = Grid::uniform(1, 8.0, 64);
  const SampledField g = SampledField::sample(hz, [](std::span<const double> z) { return cd(z[0], z[1] * z[1]); });
  const SampledField h = gaussian(ct, 0.7);
  const CylinderField f = CylinderField::from_factors(h, g);
  const double eta[1] = {0.8};
  const SampledField fe = central_fourier(f, eta);
  const cd he = central_fourier(h, eta);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(std::abs(fe[i] - he * g[i]), 0.0, 1e-13);
}

TEST(CentralFourier, Parseval) {
  // Gaussian envelope with modulation; frequencies sampled on the dual grid.
  const Grid ct = Grid::uniform(1, 16.0, 128);
  const SampledField h = SampledField::sample(ct, [](std::span<const double> t) {
    return std::exp(-0.3 * (t[0] - 1.0) * (t[0] - 1.0)) * std::polar(1.0, 0.7 * t[0]);
  });
  double lhs = 0.0;
  for (const auto& v : h.values) lhs += std::norm(v);
  lhs *= ct.spacing(0);
  const double deta = 2.0 * kPi / (2.0 * ct.half_extent[0]);
  const int m = ct.points[0];
  double rhs = 0.0;
  for (int j = -m / 2 + 1; j < m / 2; ++j) {  // the Nyquist node itself aliases
    const double eta[1] = {j * deta};
    rhs += std::norm(central_fourier(h, eta));
  }
  rhs *= deta / (2.0 * kPi);
  EXPECT_NEAR(rhs, lhs, 1e-6 * lhs);
}

TEST(CylinderField, FactorsAreChecked) {
  const Grid hz = Grid::uniform(2, 1.0, 2);
  const Grid ct = Grid::uniform(1, 1.0, 2);
  const SampledField g = SampledField::sample(hz, [](std::span<const double> z) { return cd(1.0 + z[0]); });
  const SampledField h = SampledField::sample(ct, [](std::span<const double> t) { return cd(2.0 + t[0]); });
  const CylinderField f = CylinderField::from_factors(h, g);
  EXPECT_TRUE(f.separable);
  EXPECT_NO_THROW(CylinderField::with_factors(h, g, f.values));
  auto bad = f.values;
  bad[1] += 0.5;
  EXPECT_THROW(CylinderField::with_factors(h, g, bad), GridError);
  EXPECT_EQ(f.at(1, 2), h[1] * g[2]);
}

TEST(Exponents, ConjugatesAndRange) {
  EXPECT_DOUBLE_EQ(ExponentSpec::conjugate(2.0), 2.0);
  EXPECT_EQ(ExponentSpec::conjugate(1.0), kInf);
  EXPECT_EQ(ExponentSpec::conjugate(kInf), 1.0);
  EXPECT_NEAR(ExponentSpec::conjugate(1.2), 6.0, 1e-12);
  EXPECT_TRUE((ExponentSpec{1.0, 1.0, 2.0}.in_theorem_range()));
  EXPECT_TRUE((ExponentSpec{1.0, 2.0, kInf}.in_theorem_range()));
  EXPECT_FALSE((ExponentSpec{1.0, 2.5, 3.0}.in_theorem_range()));
  EXPECT_FALSE((ExponentSpec{1.0, 1.0, 1.5}.in_theorem_range()));
}

TEST(Csv, RoundTrip) {
  const Grid g = Grid::uniform(2, 2.0, 4);
  const SampledField f = SampledField::sample(g, [](std::span<const double> z) { return cd(z[0] + 0.1, -z[1] / 3.0); });
  std::stringstream ss;
  write_csv(ss, f);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "x1,x2,re,im");
  ss.seekg(0);
  const SampledField back = read_csv(ss);
  ASSERT_TRUE(back.grid == g);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(back[i], f[i]);
}

TEST(InteriorError, UsesCentralBoxOnly) {
  const Grid g = Grid::uniform(1, 10.0, 20);
  SampledField a = SampledField::sample(g, [](std::span<const double>) { return cd(1.0); });
  SampledField b = a;
  b.values.front() = 100.0;  // outside the 80% box
  EXPECT_EQ(interior_relative_error(b, a, 0.8), 0.0);
  b.values[10] = 2.0;
  EXPECT_GT(interior_relative_error(b, a, 0.8), 0.0);
}
