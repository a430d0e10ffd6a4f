#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "hlab/fields.hpp"

namespace hlab {

enum class MultiplierKind { sublaplacian, full_laplacian };

struct MultiplierSpec {
  MultiplierKind kind = MultiplierKind::sublaplacian;
  int n = 1;
};

struct LambdaPair {
  double lambda = 0.0;
  double lambda_prime = 0.0;  // d lambda / d mu
};

// Root lambda_k(mu) of m(lambda (2k+n), lambda) = mu and its derivative:
// sublaplacian mu / (2k+n); full Laplacian sqrt(4 mu + (2k+n)^2) / 2 - (2k+n) / 2.
LambdaPair lambda_k_of_mu(const MultiplierSpec& spec, int k, double mu);

// Per-k data of the projector sum for k = 0..K.
struct SpectralTruncation {
  int K = 0;
  std::vector<double> lambdas;
  std::vector<double> coefficients;  // lambda_k^n lambda'_k / (2 pi)^{n+1}
  // Estimate of sum_{k > K} c_k (2k+n)^growth relative to the kept head sum.
  double relative_tail = 0.0;

  static SpectralTruncation build(const MultiplierSpec& spec, double mu, int K, double growth = 0.0);
};

// Smallest K (capped at kMaxCutoff) whose relative tail with per-term growth
// (2k+n)^{gamma(1/p) + gamma(1/q')} is below tol.
inline constexpr int kMaxCutoff = 4096;
int default_cutoff(const MultiplierSpec& spec, double mu, double p, double q, double tol = 1e-6);

struct TraceResult {
  cd value;
  double tail_mass = 0.0;  // share of |pi_l(f)|^2 in rows/columns >= M/2
  bool truncated = false;  // tail_mass > 1e-6
};

// tr(pi_l(z)^* pi_l(f) P_k) for n = 1, with pi_l(f) = int f^(l)(w) pi_l(w) dw built as
// an M x M matrix in the Hermite basis Phi_a(xi) = |l|^{1/4} h_a(|l|^{1/2} xi) and
// pi_l(z) phi(xi) = e^{i l (x xi + x y / 2)} phi(xi + y). Requires M >= k + 8.
TraceResult group_fourier_trace(const SampledField& f_lambda, double lambda, int k, std::span<const double> z, int M);
TraceResult group_fourier_trace(const CylinderField& f, double lambda, int k, std::span<const double> z, int M);

// f(x, Z) = sum_j a_j(x) e^{i xi_j . Z} over a set of horizontal points with
// quadrature weights. freqs holds central_dim entries per term.
struct WaveSum {
  int central_dim = 1;
  std::vector<double> weights;
  std::vector<double> freqs;
  Eigen::MatrixXcd amplitudes;  // points x terms

  std::size_t points() const { return weights.size(); }
  std::size_t terms() const { return static_cast<std::size_t>(amplitudes.cols()); }
  void add_term(std::span<const double> xi, const Eigen::VectorXcd& a);
  cd value(std::size_t point, std::span<const double> z) const;
  // Dense samples on horizontal x central grids (points must be the horizontal nodes).
  CylinderField sample(const Grid& horizontal, const Grid& central) const;
};

// (sum_x w_x (max_{Z in central_points} |f(x, Z)|)^q)^{1/q}; q = kInf gives the
// maximum over x. central_points is flattened (central_dim entries per point).
double sup_central_lq_norm(const WaveSum& ws, double q, std::span<const double> central_points);

// a, a + dt, ... strictly below b.
std::vector<double> uniform_points(double a, double b, double dt);

// P_mu f as a wave sum over the horizontal grid: for each k the terms
//   c_k e^{-i l_k t} f^(l_k) x_{-l_k} phi_k^{l_k}  and  c_k e^{+i l_k t} f^(-l_k) x_{l_k} phi_k^{l_k}
// (raw twisted convolutions), where f^(l)(z) = f_hat(l) g(z) for f = h (x) g.
// f_hat(l) = int e^{i l t} h(t) dt is supplied as a function.
WaveSum p_mu_waves(const SampledField& g, const std::function<cd(double)>& f_hat, const SpectralTruncation& trunc);

// Same for a general cylinder field (f^(l) from central_fourier).
WaveSum p_mu_waves(const CylinderField& f, const SpectralTruncation& trunc);

// P_mu f sampled on f's grids.
CylinderField p_mu(const CylinderField& f, const MultiplierSpec& spec, double mu, const SpectralTruncation& trunc);

// Coefficients of mu^{n - alpha} (2k+n)^{alpha - (n+1)} / (2 pi)^{n+1} with
// lambda_k = mu / (2k+n); alpha = 0 reproduces the sublaplacian truncation.
SpectralTruncation fractional_truncation(int n, double mu, double alpha, int K);
CylinderField p_mu_fractional(const CylinderField& f, double mu, double alpha, int K);

// int_0^inf P_mu f dmu for the sublaplacian with f = h (x) g, after the change of
// variables mu = (2k+n) lambda: sum over the midpoint nodes of (0, lambda_max]
// of lambda^n / (2 pi)^{n+1} [e^{-i l t} f^(l) x_{-l} Phi_K^l + e^{i l t} f^(-l) x_l Phi_K^l],
// Phi_K = sum_{k <= K} phi_k, one convolution per node and sign.
CylinderField integrate_p_mu(const CylinderField& f, int K, double lambda_max, int lambda_nodes);

// Piecewise exponent gamma(1/p) of the growth of ||Lambda_k||_{p -> 2}.
double gamma_exponent(double p, int n);
// Stein-Tomas exponent 2 (d+1) / (d+3).
double p_star(int d);

// Exponent of (2k+n) in the series S_alpha.
double series_exponent(double p, double q, int n, double alpha);
// Case I..IV (1..4) of the convergence lemma for (p, q).
int series_case(double p, double q, int n);
// Convergence by the case-wise thresholds on alpha.
bool series_converges(double p, double q, int n, double alpha);
// Partial sum over k = 0..K.
double series_partial(double p, double q, int n, double alpha, long K);
// Ratio of the last two dyadic block sums up to 2^levels; below 1 for convergent series.
double series_block_ratio(double p, double q, int n, double alpha, int levels = 24);

}  // namespace hlab
