#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hlab/norms.hpp"
#include "hlab/special_fn.hpp"

using namespace hlab;

TEST(FitExponent, Examples) {
  EXPECT_NEAR(fit_exponent({{1, 1}, {2, 2}, {4, 4}}), 1.0, 1e-15);
  EXPECT_NEAR(fit_exponent({{1, 1}, {2, 1}, {4, 1}}), 0.0, 1e-15);
  std::vector<std::pair<double, double>> pts;
  for (double x : {1.0, 2.0, 4.0, 8.0}) pts.emplace_back(x, std::pow(x, 1.5));
  const PowerFit f = fit_power_law(pts);
  EXPECT_NEAR(f.slope, 1.5, 1e-12);
  EXPECT_LT(f.residual, 1e-12);
}

TEST(FitExponent, Degenerate) {
  EXPECT_THROW(fit_exponent({{1, 1}, {2, 2}}), std::invalid_argument);
  EXPECT_THROW(fit_exponent({{1, 1}, {1, 2}, {1, 3}}), std::invalid_argument);
  EXPECT_THROW(fit_exponent({{1, 1}, {2, 0}, {3, 3}}), std::invalid_argument);
  EXPECT_THROW(fit_exponent({{-1, 1}, {2, 1}, {3, 3}}), std::invalid_argument);
}

TEST(OpnormOneToTwo, ConstantInKForNEqualsOne) {
  // ||phi_k||_2^2 = 2 pi int L_k(s)^2 e^{-s} ds = 2 pi for every k when n = 1.
  const double ref = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (int k = 0; k <= 30; ++k) EXPECT_NEAR(opnorm_1_to_2(k, 1).value, ref, 1e-9 * ref) << k;
}

TEST(OpnormOneToTwo, GroundStateAgainstGridSweep) {
  // Column norms of the kernel (2 pi)^{-1} phi_0(z - w) e^{i ...} on a grid, for several w.
  const Grid grid = Grid::uniform(2, 14.0, 160);
  const double value = opnorm_1_to_2(0, 1).value;
  for (auto [wx, wy] : {std::pair{0.0, 0.0}, {1.0, -0.5}, {-2.0, 2.5}}) {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto z = grid.coords(i);
      const double r2 = (z[0] - wx) * (z[0] - wx) + (z[1] - wy) * (z[1] - wy);
      s += std::pow(laguerre_phi_r2(0, 1, r2, 1.0), 2);
    }
    EXPECT_NEAR(std::sqrt(s * grid.cell_volume()) / (2.0 * std::numbers::pi), value, 1e-4);
  }
}

TEST(OpnormOneToTwo, GrowthForNEqualsTwo) {
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k <= 32; ++k) pts.emplace_back(2.0 * k + 2.0, opnorm_1_to_2(k, 2).value);
  EXPECT_NEAR(fit_exponent(pts), gamma_exponent(1.0, 2), 0.05);
  EXPECT_THROW(opnorm_1_to_2(-1, 1), std::invalid_argument);
}

TEST(OpnormPToTwo, EndpointsAndSandwich) {
  const Grid grid = Grid::uniform(2, 10.0, 64);
  const NormEstimate two = opnorm_p_to_2(2, 1, 2.0, grid, 3, 7);
  EXPECT_NEAR(two.value, 1.0, 1e-6);
  EXPECT_EQ(two.method, NormMethod::exact_2_to_2);
  const NormEstimate one = opnorm_p_to_2(2, 1, 1.0, grid, 3, 7);
  const double closed = opnorm_1_to_2(2, 1).value;
  EXPECT_NEAR(one.value, closed, 0.02 * closed);
  for (const auto* e : {&two, &one}) {
    EXPECT_GE(e->value, e->gaussian_start_ratio * (1.0 - 1e-12));
    for (double v : e->start_values) EXPECT_LE(v, e->value);
  }
  EXPECT_THROW(opnorm_p_to_2(2, 1, 2.5, grid, 3, 7), std::domain_error);
}

TEST(OpnormPToTwo, SeededRunsRepeat) {
  const Grid grid = Grid::uniform(2, 10.0, 48);
  const NormEstimate a = opnorm_p_to_2(3, 1, 1.5, grid, 3, 11);
  const NormEstimate b = opnorm_p_to_2(3, 1, 1.5, grid, 3, 11);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Knapp, HomogeneousInTheAmplitude) {
  const std::vector<double> deltas = {0.4, 0.3, 0.2};
  KnappOptions scaled;
  scaled.scale = 3.0;
  const KnappResult a = knapp_experiment(3, 2.0, deltas);
  const KnappResult b = knapp_experiment(3, 2.0, deltas, 0.1, scaled);
  ASSERT_EQ(a.rows.size(), deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) EXPECT_NEAR(b.rows[i].ratio, a.rows[i].ratio, 1e-10 * a.rows[i].ratio);
}

TEST(Knapp, ResolutionGuard) {
  EXPECT_THROW(knapp_experiment(3, 2.0, {0.4, 0.2, 0.01}), GridError);
  EXPECT_THROW(knapp_experiment(4, 2.0, {0.4, 0.2, 0.1}), std::exception);
}

TEST(Restriction, RangeGuard) {
  EXPECT_NO_THROW(check_restriction_range(1, {1.0, 1.0, 2.0}, false));
  try {
    check_restriction_range(1, {2.0, 1.0, 2.0}, false);
    FAIL() << "expected RangeError";
  } catch (const RangeError& e) {
    EXPECT_NE(std::string(e.what()).find("p_*(1)"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("--probe-out-of-range"), std::string::npos);
  }
  EXPECT_NO_THROW(check_restriction_range(1, {2.0, 1.0, 2.0}, true));
  EXPECT_THROW(check_restriction_range(3, {1.5, 1.0, 2.0}, false), RangeError);
  EXPECT_THROW(check_restriction_range(2, {1.0, 2.5, 2.0}, false), RangeError);
  EXPECT_THROW(check_restriction_range(2, {1.0, 1.0, 1.5}, false), RangeError);
}

TEST(Restriction, OnlyImpulseProfileIsMeasured) {
  const auto st = MetivierStructure::quaternionic_h_type();
  EXPECT_THROW(restriction_experiment(st, {1.2, 1.0, 2.0}, {1.0, 2.0, 4.0}), std::invalid_argument);
}

TEST(Restriction, HeisenbergSlope) {
  const auto st = MetivierStructure::heisenberg_1();
  const RestrictionReport rep = restriction_experiment(st, {1.0, 1.0, 2.0}, {1.0, 2.0, 4.0, 8.0});
  EXPECT_NEAR(rep.predicted_slope, 0.5, 1e-15);
  EXPECT_NEAR(rep.measured_slope, rep.predicted_slope, 0.15);
  EXPECT_FALSE(rep.out_of_range);
  EXPECT_EQ(rep.rows.size(), 4u);
}
