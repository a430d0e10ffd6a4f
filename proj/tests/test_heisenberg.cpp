#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hlab/heisenberg.hpp"
#include "hlab/twisted.hpp"

using namespace hlab;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const MultiplierSpec kSub{MultiplierKind::sublaplacian, 1};
const MultiplierSpec kFull{MultiplierKind::full_laplacian, 1};

SampledField offset_gaussian(const Grid& grid) {
  return SampledField::sample(grid, [](std::span<const double> z) {
    const double r2 = (z[0] - 0.5) * (z[0] - 0.5) + (z[1] + 0.3) * (z[1] + 0.3);
    return std::exp(-0.5 * r2) * std::polar(1.0, 0.4 * z[1]);
  });
}

}  // namespace

TEST(LambdaOfMu, Examples) {
  const LambdaPair s = lambda_k_of_mu(kSub, 0, 3.0);
  EXPECT_DOUBLE_EQ(s.lambda, 3.0);
  EXPECT_DOUBLE_EQ(s.lambda_prime, 1.0);
  EXPECT_NEAR(lambda_k_of_mu(kFull, 0, 2.0).lambda, 1.0, 1e-15);
  EXPECT_THROW(lambda_k_of_mu(kSub, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(lambda_k_of_mu(kSub, -1, 1.0), std::invalid_argument);
}

TEST(LambdaOfMu, FullLaplacianSolvesItsEquation) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double mu = std::exp(12.0 * u(rng) - 6.0);
    const int k = static_cast<int>(100 * u(rng));
    for (int n : {1, 2, 3}) {
      const MultiplierSpec spec{MultiplierKind::full_laplacian, n};
      const LambdaPair lp = lambda_k_of_mu(spec, k, mu);
      const double m = 2.0 * k + n;
      EXPECT_NEAR(lp.lambda * m + lp.lambda * lp.lambda, mu, 1e-12 * mu);
      // Derivative against a central difference.
      const double h = 1e-5 * mu;
      const double fd = (lambda_k_of_mu(spec, k, mu + h).lambda - lambda_k_of_mu(spec, k, mu - h).lambda) / (2 * h);
      EXPECT_NEAR(lp.lambda_prime, fd, 1e-6 * lp.lambda_prime);
    }
  }
}

TEST(LambdaOfMu, StrictlyIncreasingFromZero) {
  for (const auto& spec : {kSub, kFull}) {
    for (int k : {0, 3, 40}) {
      double prev = 0.0;
      for (double mu = 1e-6; mu < 1e4; mu *= 1.7) {
        const LambdaPair lp = lambda_k_of_mu(spec, k, mu);
        EXPECT_GT(lp.lambda, prev);
        EXPECT_GT(lp.lambda_prime, 0.0);
        prev = lp.lambda;
      }
      EXPECT_LT(lambda_k_of_mu(spec, k, 1e-12).lambda, 1e-11);
    }
  }
}

TEST(SpectralTruncation, Coefficients) {
  for (const auto& spec : {kSub, kFull, MultiplierSpec{MultiplierKind::sublaplacian, 2}}) {
    const SpectralTruncation t = SpectralTruncation::build(spec, 2.5, 30);
    ASSERT_EQ(t.coefficients.size(), 31u);
    for (int k = 0; k <= 30; ++k) {
      const LambdaPair lp = lambda_k_of_mu(spec, k, 2.5);
      EXPECT_DOUBLE_EQ(t.lambdas[k], lp.lambda);
      EXPECT_NEAR(t.coefficients[k], std::pow(lp.lambda, spec.n) * lp.lambda_prime / std::pow(kTwoPi, spec.n + 1),
                  1e-14 * t.coefficients[k]);
      EXPECT_GT(t.coefficients[k], 0.0);
      EXPECT_TRUE(std::isfinite(t.coefficients[k]));
    }
  }
}

TEST(SpectralTruncation, FractionalAtZeroIsSublaplacian) {
  for (int n : {1, 2}) {
    const SpectralTruncation a = fractional_truncation(n, 3.0, 0.0, 25);
    const SpectralTruncation b = SpectralTruncation::build({MultiplierKind::sublaplacian, n}, 3.0, 25);
    ASSERT_EQ(a.coefficients.size(), b.coefficients.size());
    for (std::size_t k = 0; k < a.coefficients.size(); ++k) {
      EXPECT_EQ(a.coefficients[k], b.coefficients[k]);
      EXPECT_EQ(a.lambdas[k], b.lambdas[k]);
    }
  }
}

TEST(SpectralTruncation, FractionalWeightsDecrease) {
  for (double alpha : {-2.0, 0.0, 0.5, 0.99}) {
    const SpectralTruncation t = fractional_truncation(1, 2.0, alpha, 50);
    for (int k = 1; k <= 50; ++k) EXPECT_LT(t.coefficients[k], t.coefficients[k - 1]) << alpha;
  }
}

TEST(SpectralTruncation, DefaultCutoffIsMinimal) {
  const MultiplierSpec spec{MultiplierKind::sublaplacian, 2};
  const int K = default_cutoff(spec, 2.0, 2.0, 2.0);
  ASSERT_LT(K, kMaxCutoff);
  EXPECT_LT(SpectralTruncation::build(spec, 2.0, K).relative_tail, 1e-6);
  EXPECT_GE(SpectralTruncation::build(spec, 2.0, K - 1).relative_tail, 1e-6);
  EXPECT_GE(default_cutoff(spec, 2.0, 2.0, 2.0, 1e-8), K);
  // n = 1 coefficients decay like k^{-2}, so the tail stays large and the cap applies.
  EXPECT_EQ(default_cutoff(kSub, 2.0, 1.0, 2.0), kMaxCutoff);
}

TEST(GroupFourierTrace, MatchesTwistedConvolution) {
  // tr(pi_l(z)^* pi_l(f) P_k) = f x_l phi_k^{|l|}(z) = (2 pi)^n Lambda_k^l f(z).
  const Grid grid = Grid::uniform(2, 10.0, 80);
  const SampledField g = offset_gaussian(grid);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const double z[2] = {u(rng), u(rng)};
    const double lambda = trial % 2 == 0 ? 1.0 : -0.7;
    const auto proj = lambda_projection_at(g, 3, lambda, z);
    for (int k = 0; k <= 3; ++k) {
      const TraceResult t = group_fourier_trace(g, lambda, k, z, 40);
      EXPECT_FALSE(t.truncated);
      EXPECT_NEAR(std::abs(t.value - kTwoPi * proj[k]), 0.0, 1e-3) << trial << " " << k;
    }
  }
}

TEST(GroupFourierTrace, GroundStateAndZero) {
  const Grid grid = Grid::uniform(2, 10.0, 80);
  const SampledField phi0 = SampledField::sample(grid, [](std::span<const double> z) {
    return cd(std::exp(-0.25 * (z[0] * z[0] + z[1] * z[1])));
  });
  const double z0[2] = {0.0, 0.0};
  EXPECT_NEAR(std::abs(group_fourier_trace(phi0, 1.0, 0, z0, 24).value - kTwoPi), 0.0, 1e-3 * kTwoPi);
  const SampledField zero(grid);
  EXPECT_EQ(group_fourier_trace(zero, 1.0, 2, z0, 24).value, cd(0.0));
  EXPECT_THROW(group_fourier_trace(phi0, 1.0, 3, z0, 10), std::invalid_argument);
  EXPECT_THROW(group_fourier_trace(phi0, 0.0, 0, z0, 24), std::invalid_argument);
}

TEST(PMu, RealInputGivesRealOutput) {
  const Grid hz = Grid::uniform(2, 8.0, 32);
  const Grid ct = Grid::uniform(1, 8.0, 32);
  const SampledField g = SampledField::sample(hz, [](std::span<const double> z) {
    return cd(std::exp(-0.5 * ((z[0] - 0.4) * (z[0] - 0.4) + z[1] * z[1])));
  });
  const SampledField h = SampledField::sample(ct, [](std::span<const double> t) { return cd(std::exp(-0.5 * (t[0] - 0.3) * (t[0] - 0.3))); });
  const CylinderField f = CylinderField::from_factors(h, g);
  for (const auto& spec : {kSub, kFull}) {
    const CylinderField p = p_mu(f, spec, 3.0, SpectralTruncation::build(spec, 3.0, 10));
    double im = 0.0;
    double mag = 0.0;
    for (const auto& v : p.values) {
      im = std::max(im, std::abs(v.imag()));
      mag = std::max(mag, std::abs(v));
    }
    EXPECT_GT(mag, 0.0);
    EXPECT_LT(im, 1e-10 * mag);
  }
}

TEST(PMu, VanishingFourierDataGivesZero) {
  const Grid hz = Grid::uniform(2, 6.0, 24);
  const SampledField g = offset_gaussian(hz);
  const double mu = 3.0;
  const SpectralTruncation t = SpectralTruncation::build(kSub, mu, 12);
  // sin(pi mu / l) vanishes at l = +-mu / (2k + 1).
  const WaveSum zero = p_mu_waves(g, [mu](double l) { return cd(std::sin(std::numbers::pi * mu / l)); }, t);
  const WaveSum ref = p_mu_waves(g, [](double) { return cd(1.0); }, t);
  EXPECT_LT(zero.amplitudes.cwiseAbs().maxCoeff(), 1e-13 * ref.amplitudes.cwiseAbs().maxCoeff());
}

TEST(PMu, FractionalAtZeroIsBitwiseSublaplacian) {
  const Grid hz = Grid::uniform(2, 6.0, 24);
  const Grid ct = Grid::uniform(1, 8.0, 32);
  const SampledField h = SampledField::sample(ct, [](std::span<const double> t) { return cd(std::exp(-0.5 * t[0] * t[0])); });
  const CylinderField f = CylinderField::from_factors(h, offset_gaussian(hz));
  const CylinderField a = p_mu_fractional(f, 2.0, 0.0, 8);
  const CylinderField b = p_mu(f, kSub, 2.0, SpectralTruncation::build(kSub, 2.0, 8));
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) ASSERT_EQ(a.values[i], b.values[i]);
}

TEST(Exponents, PStar) {
  EXPECT_DOUBLE_EQ(p_star(1), 1.0);
  EXPECT_DOUBLE_EQ(p_star(2), 6.0 / 5.0);
  EXPECT_DOUBLE_EQ(p_star(3), 4.0 / 3.0);
}

TEST(Exponents, Gamma) {
  for (int n : {1, 2, 3, 5}) {
    EXPECT_NEAR(gamma_exponent(1.0, n), n / 2.0 - 0.5, 1e-15);
    EXPECT_NEAR(gamma_exponent(2.0, n), 0.0, 1e-15);
    const double ps = p_star(2 * n);
    const double ip = 1.0 / ps;
    EXPECT_NEAR(n * (ip - 0.5) - 0.5, 0.5 * (0.5 - ip), 1e-12);
    EXPECT_NEAR(gamma_exponent(ps - 1e-12, n), gamma_exponent(ps + 1e-12, n), 1e-10);
  }
  EXPECT_NEAR(gamma_exponent(1.2, 1), -1.0 / 6.0, 1e-12);
  EXPECT_THROW(gamma_exponent(0.5, 1), std::domain_error);
  EXPECT_THROW(gamma_exponent(2.5, 1), std::domain_error);
}

TEST(Series, Examples) {
  EXPECT_EQ(series_case(1.0, 2.0, 1), 1);
  EXPECT_TRUE(series_converges(1.0, 2.0, 1, -1.0));
  EXPECT_EQ(series_case(2.0, 2.0, 1), 3);
  EXPECT_FALSE(series_converges(2.0, 2.0, 1, -1.0));
  EXPECT_EQ(series_case(1.0, kInf, 1), 2);
  EXPECT_EQ(series_case(1.5, kInf, 1), 4);
  EXPECT_THROW(series_case(1.0, 1.5, 1), std::domain_error);
}

TEST(Series, CaseThresholdsMatchTheExponent) {
  // The lemma's thresholds are exactly where the term exponent crosses -1.
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = 1 + trial % 3;
    const double p = 1.0 + u(rng);
    const double iq = 0.5 * u(rng);
    const double q = iq == 0.0 ? kInf : 1.0 / iq;
    const double alpha = -3.0 + 4.0 * u(rng);
    const double e = series_exponent(p, q, n, alpha);
    if (std::abs(e + 1.0) < 1e-9) continue;
    EXPECT_EQ(series_converges(p, q, n, alpha), e < -1.0) << p << " " << q << " " << n << " " << alpha;
    ++checked;
  }
  EXPECT_GT(checked, 4900);
}

TEST(Series, PartialSumsAreCauchyWhenConvergent) {
  double prev = kInf;
  for (long K : {1000L, 10000L, 100000L}) {
    const double d = series_partial(1.0, 2.0, 1, -1.0, 2 * K) - series_partial(1.0, 2.0, 1, -1.0, K);
    EXPECT_GT(d, 0.0);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 1e-2);
  EXPECT_LT(series_block_ratio(1.0, 2.0, 1, -1.0, 20), 1.0);
  EXPECT_GT(series_block_ratio(2.0, 2.0, 1, -0.5, 20), 1.0);
}
