#include "hlab/special_fn.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

namespace hlab {

namespace {

// Rescaling threshold for the Hermite recurrence; values are carried as
// mantissa * exp(log_scale).
constexpr double kBig = 1e150;
constexpr double kLogBig = 345.38776394910684;  // log(1e150)

void check_hermite_range(int i, double t) {
  if (i < 0 || i > kHermiteMaxOrder || !(std::abs(t) <= kHermiteMaxAbsT)) {
    throw RangeError("hermite_eval: (i=" + std::to_string(i) + ", t=" + std::to_string(t) +
                     ") outside |t| <= 40, 0 <= i <= 200");
  }
}

}  // namespace

std::vector<double> hermite_eval_upto(int imax, double t) {
  check_hermite_range(imax, t);
  std::vector<double> out(static_cast<std::size_t>(imax) + 1);
  // The Gaussian factor is kept in log form so that h_0 does not underflow at
  // large |t| while higher orders are still representable.
  double log_scale = -0.5 * t * t;
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  std::vector<double> mant(out.size());
  std::vector<double> scale(out.size());
  mant[0] = cur;
  scale[0] = log_scale;
  for (int i = 0; i < imax; ++i) {
    const double next = std::sqrt(2.0 / (i + 1)) * t * cur - std::sqrt(static_cast<double>(i) / (i + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      prev /= kBig;
      log_scale += kLogBig;
    }
    mant[i + 1] = cur;
    scale[i + 1] = log_scale;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = mant[i] == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(mant[i])) + scale[i]), mant[i]);
  }
  return out;
}

double hermite_eval(int i, double t) {
  check_hermite_range(i, t);
  return hermite_eval_upto(i, t)[static_cast<std::size_t>(i)];
}

void laguerre_poly_upto(int kmax, int a, double x, double* out) {
  out[0] = 1.0;
  if (kmax == 0) return;
  out[1] = 1.0 + a - x;
  for (int k = 1; k < kmax; ++k) {
    out[k + 1] = ((2.0 * k + 1.0 + a - x) * out[k] - (k + a) * out[k - 1]) / (k + 1.0);
  }
}

double laguerre_poly(int k, int a, double x) {
  if (k == 0) return 1.0;
  double p0 = 1.0;
  double p1 = 1.0 + a - x;
  for (int j = 1; j < k; ++j) {
    const double p2 = ((2.0 * j + 1.0 + a - x) * p1 - (j + a) * p0) / (j + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double laguerre_phi_r2(int k, int n, double r2, double lambda) {
  const double x = 0.5 * lambda * r2;
  return laguerre_poly(k, n - 1, x) * std::exp(-0.5 * x);
}

double laguerre_phi(int k, int n, std::span<const double> z, double lambda) {
  double r2 = 0.0;
  for (double v : z) r2 += v * v;
  return laguerre_phi_r2(k, n, r2, lambda);
}

void laguerre_phi_upto(int kmax, int n, double r2, double lambda, double* out) {
  const double x = 0.5 * lambda * r2;
  laguerre_poly_upto(kmax, n - 1, x, out);
  const double e = std::exp(-0.5 * x);
  for (int k = 0; k <= kmax; ++k) out[k] *= e;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

Quadrature gauss_legendre(int m, double a, double b) {
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(m));
  q.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 1; j < m; ++j) {
        const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int j = 1; j < m; ++j) {
      const double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto idx = static_cast<std::size_t>(m - 1 - i);
    q.nodes[idx] = 0.5 * (b - a) * x + 0.5 * (b + a);
    q.weights[idx] = 0.5 * (b - a) * w;
  }
  return q;
}

Quadrature gauss_hermite(int m) {
  // Golub-Welsch for the initial nodes, then Newton on h_m and Christoffel weights
  // 1 / sum_j h_j(t)^2, which are the rule's weights times e^{t^2}.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) {
    T(i, i + 1) = T(i + 1, i) = std::sqrt((i + 1) / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(m));
  q.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double t = es.eigenvalues()(i);
    for (int it = 0; it < 5; ++it) {
      const auto h = hermite_eval_upto(m, t);
      const double hm = h[static_cast<std::size_t>(m)];
      const double dh = std::sqrt(2.0 * m) * h[static_cast<std::size_t>(m - 1)] - t * hm;
      if (dh == 0.0) break;
      const double dt = hm / dh;
      t -= dt;
      if (std::abs(dt) < 1e-15 * std::max(1.0, std::abs(t))) break;
    }
    const auto h = hermite_eval_upto(m - 1, t);
    double s = 0.0;
    for (double v : h) s += v * v;
    q.nodes[static_cast<std::size_t>(i)] = t;
    q.weights[static_cast<std::size_t>(i)] = 1.0 / s;
  }
  return q;
}

}  // namespace hlab
