#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hlab/heisenberg.hpp"
#include "hlab/metivier.hpp"
#include "hlab/twisted.hpp"

using namespace hlab;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd standard_j(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return j;
}

SampledField offset_gaussian(const Grid& grid) {
  return SampledField::sample(grid, [](std::span<const double> z) {
    const double r2 = (z[0] - 0.5) * (z[0] - 0.5) + (z[1] + 0.3) * (z[1] + 0.3);
    return std::exp(-0.5 * r2) * std::polar(1.0, 0.4 * z[1]);
  });
}

std::vector<double> random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> nd;
  std::vector<double> w(d);
  double s = 0.0;
  for (auto& x : w) {
    x = nd(rng);
    s += x * x;
  }
  for (auto& x : w) x /= std::sqrt(s);
  return w;
}

}  // namespace

TEST(Structures, BuiltinNames) {
  const auto names = builtin_structure_names();
  for (const char* want : {"heisenberg_1", "complex_heisenberg", "quaternionic_h_type"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
    EXPECT_NO_THROW(builtin_structure(want));
  }
  EXPECT_THROW(builtin_structure("nope"), StructureError);
  const auto q = builtin_structure("quaternionic_h_type");
  EXPECT_EQ(q.d, 3);
  EXPECT_EQ(q.n, 2);
}

TEST(Structures, BOmega) {
  const auto h = MetivierStructure::heisenberg_1();
  const double plus[1] = {1.0};
  EXPECT_EQ(h.b_omega(plus), h.J[0]);
  EXPECT_EQ(h.J[0], standard_j(1));
  std::mt19937_64 rng(2);
  for (const auto& st : {MetivierStructure::complex_heisenberg(), MetivierStructure::quaternionic_h_type()}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_unit(rng, st.d);
      const auto b = random_unit(rng, st.d);
      EXPECT_NEAR(st.b_omega(a).determinant(), 1.0, 1e-12);
      EXPECT_LT((st.b_omega(a) + st.b_omega(a).transpose()).norm(), 1e-15);
      std::vector<double> c(st.d);
      for (int i = 0; i < st.d; ++i) c[i] = 0.3 * a[i] - 1.7 * b[i];
      EXPECT_LT((st.b_omega(c) - 0.3 * st.b_omega(a) + 1.7 * st.b_omega(b)).norm(), 1e-13);
    }
  }
}

TEST(Structures, MetivierCheck) {
  const auto h = check_metivier(MetivierStructure::heisenberg_1(), SphereRule::two_point());
  EXPECT_TRUE(h.ok);
  EXPECT_NEAR(h.min_abs_det, 1.0, 1e-15);
  const auto c = check_metivier(MetivierStructure::complex_heisenberg(), SphereRule::circle(64));
  EXPECT_TRUE(c.ok);
  EXPECT_NEAR(c.min_abs_det, 1.0, 1e-12);
  // Two 2 x 2 skew forms are proportional, so some direction degenerates.
  MetivierStructure bad;
  bad.d = 2;
  bad.n = 1;
  bad.J = {standard_j(1), 2.0 * standard_j(1)};
  const double w[2] = {2.0 / std::sqrt(5.0), -1.0 / std::sqrt(5.0)};
  SphereRule rule = SphereRule::circle(64);
  rule.nodes.insert(rule.nodes.end(), w, w + 2);
  rule.weights.push_back(0.0);
  EXPECT_FALSE(check_metivier(bad, rule).ok);
}

TEST(Structures, FromJson) {
  const auto st = MetivierStructure::from_json(R"({"d": 1, "n": 1, "J": [[0, 1, -1, 0]]})", "mine");
  EXPECT_EQ(st.name, "mine");
  EXPECT_EQ(st.J[0], standard_j(1));
  EXPECT_THROW(MetivierStructure::from_json("{not json"), StructureError);
  EXPECT_THROW(MetivierStructure::from_json(R"({"d": 1, "n": 1})"), StructureError);
  EXPECT_THROW(MetivierStructure::from_json(R"({"d": 1, "n": 1, "J": [[0, 1, 1, 0]]})"), StructureError);
  EXPECT_THROW(MetivierStructure::from_json(R"({"d": 1, "n": 1, "J": [[0, 1, -1]]})"), StructureError);
  EXPECT_THROW(MetivierStructure::from_json(R"({"d": 2, "n": 1, "J": [[0, 1, -1, 0]]})"), StructureError);
  EXPECT_THROW(MetivierStructure::from_json(R"({"d": 2, "n": 1, "J": [[0, 1, -1, 0], [0, 2, -2, 0]]})"),
               StructureError);
}

TEST(SphereRules, WeightsAndNodes) {
  const std::pair<SphereRule, double> rules[] = {{SphereRule::two_point(), 2.0},
                                                 {SphereRule::circle(64), 2.0 * kPi},
                                                 {SphereRule::sphere(16, 32), 4.0 * kPi},
                                                 {SphereRule::cap(0.3, 8, 16), 2.0 * kPi * (1.0 - std::cos(0.3))}};
  for (const auto& [rule, total] : rules) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      s += rule.weights[i];
      EXPECT_GT(rule.weights[i], 0.0);
      double r = 0.0;
      for (double x : rule.node(i)) r += x * x;
      EXPECT_NEAR(r, 1.0, 1e-14);
    }
    EXPECT_NEAR(s, total, 1e-12 * total);
  }
}

TEST(SphereRules, ExtensionOracles) {
  const SphereRule s3 = SphereRule::sphere(32, 64);
  const std::vector<cd> one3(s3.size(), 1.0);
  const double z0[3] = {0.0, 0.0, 0.0};
  EXPECT_NEAR(std::abs(sphere_extension(one3, z0, s3) - 4.0 * kPi), 0.0, 1e-12);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 8.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = random_unit(rng, 3);
    const double r = u(rng);
    const double z[3] = {r * w[0], r * w[1], r * w[2]};
    EXPECT_NEAR(std::abs(sphere_extension(one3, z, s3) - 4.0 * kPi * std::sin(r) / r), 0.0, 1e-6) << r;
  }
  const SphereRule s2 = SphereRule::circle(64);
  const std::vector<cd> one2(s2.size(), 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = random_unit(rng, 2);
    const double r = u(rng);
    const double z[2] = {r * w[0], r * w[1]};
    EXPECT_NEAR(std::abs(sphere_extension(one2, z, s2) - 2.0 * kPi * std::cyl_bessel_j(0.0, r)), 0.0, 1e-6) << r;
  }
}

TEST(Normalizer, Examples) {
  EXPECT_LT((symplectic_normalizer(standard_j(1)) - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-14);
  const Eigen::MatrixXd a = symplectic_normalizer(2.0 * standard_j(1));
  EXPECT_LT((a - Eigen::MatrixXd::Identity(2, 2) / std::sqrt(2.0)).norm(), 1e-14);
  EXPECT_NEAR(a.determinant() * a.determinant(), 0.25, 1e-15);
  EXPECT_THROW(symplectic_normalizer(1e-14 * standard_j(1)), NearSingularError);
}

TEST(Normalizer, RandomSkewMatrices) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  int tested = 0;
  while (tested < 100) {
    Eigen::MatrixXd m(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) m(i, j) = nd(rng);
    }
    const Eigen::MatrixXd b = m - m.transpose();
    // Well-conditioned forms only; the residual scales with the condition number.
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    if (svd.singularValues()(3) < 0.1 * svd.singularValues()(0)) continue;
    const Eigen::MatrixXd a = symplectic_normalizer(b);
    EXPECT_LT((a.transpose() * b * a - standard_j(2)).norm(), 1e-10);
    EXPECT_NEAR(a.determinant() * a.determinant() * std::abs(b.determinant()), 1.0, 1e-10);
    ++tested;
  }
}

TEST(PiK, HeisenbergReduction) {
  const Grid grid = Grid::uniform(2, 10.0, 64);
  const SampledField g = offset_gaussian(grid);
  const auto st = MetivierStructure::heisenberg_1();
  const double plus[1] = {1.0};
  const double minus[1] = {-1.0};
  for (int k : {0, 2}) {
    const SampledField a = pi_k_projection(g, k, 1.3, plus, st);
    const SampledField b = lambda_projection(g, k, 1.3);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]);
    // omega = -1 is the reflected twist.
    const SampledField c = pi_k_projection(g, k, 1.3, minus, st);
    const SampledField d = lambda_projection(g, k, -1.3);
    EXPECT_LT(lp_norm(c - d, 2.0), 1e-12 * lp_norm(d, 2.0));
  }
}

TEST(PiK, ExpansionSumsToInput) {
  // rho^n sum_{k <= 40} Pi_k^{rho omega} g = g for the complex Heisenberg group.
  const auto st = MetivierStructure::complex_heisenberg();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (bool centred : {true, false}) {
    IsotropicGaussian g;
    g.b = 0.5;
    g.center = centred ? std::vector<double>{0.0, 0.0, 0.0, 0.0} : std::vector<double>{0.3, -0.2, 0.1, 0.25};
    for (int trial = 0; trial < 4; ++trial) {
      const auto w = random_unit(rng, 2);
      const double rho = 1.0 + 0.5 * trial;
      const Eigen::MatrixXd a = symplectic_normalizer(st.b_omega(w));
      const std::vector<double> v = {u(rng), u(rng), u(rng), u(rng)};
      const auto parts = pi_k_projection_at(g, 40, rho, a, v);
      cd s = 0.0;
      for (const auto& x : parts) s += x;
      s *= rho * rho;
      EXPECT_NEAR(std::abs(s - g(v)), 0.0, 1e-3) << centred << " " << trial;
    }
  }
}

TEST(Radon, GaussianMarginal) {
  const Grid hz = Grid::uniform(2, 4.0, 8);
  const Grid ct = Grid::uniform(2, 8.0, 128);
  const Grid tg = Grid::uniform(1, 4.0, 32);
  const SampledField g = offset_gaussian(hz);
  const SampledField h = SampledField::sample(ct, [](std::span<const double> z) {
    return cd(std::exp(-0.5 * (z[0] * z[0] + z[1] * z[1])));
  });
  const CylinderField f = CylinderField::from_factors(h, g);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto w = random_unit(rng, 2);
    const CylinderField r = radon_transform(f, w, tg);
    double worst = 0.0;
    for (std::size_t c = 0; c < tg.size(); ++c) {
      const double t = tg.node(0, static_cast<int>(c));
      for (std::size_t i = 0; i < hz.size(); ++i) {
        worst = std::max(worst, std::abs(r.at(c, i) - g[i] * std::sqrt(2.0 * kPi) * std::exp(-0.5 * t * t)));
      }
    }
    EXPECT_LT(worst, 1e-6);
  }
}

TEST(Radon, FourierSliceAndMass) {
  const Grid hz = Grid::uniform(2, 4.0, 8);
  const Grid ct = Grid::uniform(2, 10.0, 96);
  const Grid tg = Grid::uniform(1, 10.0, 96);
  const SampledField g = offset_gaussian(hz);
  const SampledField h = SampledField::sample(ct, [](std::span<const double> z) {
    const double a = z[0] - 0.5;
    return cd(std::exp(-0.5 * a * a - z[1] * z[1]) * (1.0 + 0.3 * z[0]), 0.2 * z[1] * std::exp(-z[0] * z[0] - z[1] * z[1]));
  });
  const CylinderField f = CylinderField::from_factors(h, g);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto w = random_unit(rng, 2);
    const double l = trial == 0 ? 0.0 : u(rng);
    const CylinderField r = radon_transform(f, w, tg);
    const double eta1[1] = {l};
    const double eta2[2] = {l * w[0], l * w[1]};
    const SampledField a = central_fourier(r, eta1);
    const SampledField b = central_fourier(f, eta2);
    EXPECT_LT(lp_norm(a - b, kInf), 1e-6) << trial;
  }
}

TEST(PMuMetivier, HeisenbergConsistency) {
  const Grid hz = Grid::uniform(2, 6.0, 24);
  const Grid ct = Grid::uniform(1, 8.0, 32);
  const SampledField g = offset_gaussian(hz);
  const SampledField h = SampledField::sample(ct, [](std::span<const double> t) {
    return cd(std::exp(-0.5 * t[0] * t[0]) * std::cos(2.0 * t[0]));
  });
  const CylinderField f = CylinderField::from_factors(h, g);
  const MultiplierSpec spec;
  const CylinderField a = p_mu(f, spec, 3.0, SpectralTruncation::build(spec, 3.0, 10));
  const CylinderField b = p_mu_metivier(f, 3.0, 10, SphereRule::two_point(), MetivierStructure::heisenberg_1());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(a.values[i]);
  }
  EXPECT_LT(std::sqrt(num / den), 1e-8);
}
