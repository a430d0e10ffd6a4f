#include "hlab/heisenberg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hlab/parallel.hpp"
#include "hlab/special_fn.hpp"
#include "hlab/twisted.hpp"

namespace hlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double term_at(const MultiplierSpec& spec, int k, double mu, double growth) {
  const LambdaPair lp = lambda_k_of_mu(spec, k, mu);
  const double m = 2.0 * k + spec.n;
  return std::pow(lp.lambda, spec.n) * lp.lambda_prime * std::pow(m, growth);
}

// sum_{k > K} t_k / sum_{k <= K} t_k for positive terms decaying like a power.
double tail_ratio(const std::function<double(int)>& t, int K) {
  double head = 0.0;
  for (int k = 0; k <= K; ++k) head += t(k);
  const int kend = std::max(4 * K, K + 20000);
  double tail = 0.0;
  for (int k = K + 1; k <= kend; ++k) tail += t(k);
  const double a = t(kend);
  const double b = t(kend / 2);
  if (a <= 0.0 || b <= 0.0) return head > 0.0 ? tail / head : 0.0;
  // Local power law t_k ~ k^e; the remainder beyond kend is about t(kend) kend / (-(e + 1)).
  const double e = std::log(a / b) / std::log(static_cast<double>(kend) / (kend / 2));
  if (e >= -1.0) return std::numeric_limits<double>::infinity();
  tail += a * kend / (-(e + 1.0));
  return head > 0.0 ? tail / head : 0.0;
}

void hermite_basis(int M, double lambda, double xi, double* out) {
  const double a = std::abs(lambda);
  const double s = std::sqrt(a);
  const double t = s * xi;
  if (std::abs(t) > kHermiteMaxAbsT) {
    std::fill(out, out + M, 0.0);
    return;
  }
  const auto h = hermite_eval_upto(M - 1, t);
  const double c = std::pow(a, 0.25);
  for (int i = 0; i < M; ++i) out[i] = c * h[i];
}

struct XiRule {
  std::vector<double> nodes;
  double step = 0.0;
};

XiRule xi_rule(int M, double lambda, double max_abs_x) {
  const double a = std::abs(lambda);
  const double reach = (std::sqrt(2.0 * M + 1.0) + 7.0) / std::sqrt(a);
  const double freq = a * max_abs_x + 2.0 * std::sqrt((2.0 * M + 1.0) * a);
  XiRule r;
  r.step = std::numbers::pi / (4.0 * freq);
  const int half = static_cast<int>(std::ceil(reach / r.step));
  for (int i = -half; i <= half; ++i) r.nodes.push_back(i * r.step);
  return r;
}

// <pi_l(z) Phi_a, Phi_b> for b = 0..M-1 at fixed a.
std::vector<cd> matrix_column(int M, double lambda, int a, double x, double y, const XiRule& rule) {
  std::vector<cd> col(static_cast<std::size_t>(M), cd(0.0, 0.0));
  std::vector<double> pa(static_cast<std::size_t>(M));
  std::vector<double> pb(static_cast<std::size_t>(M));
  for (double xi : rule.nodes) {
    hermite_basis(M, lambda, xi + y, pa.data());
    if (pa[a] == 0.0) continue;
    hermite_basis(M, lambda, xi, pb.data());
    const cd w = std::polar(pa[a] * rule.step, lambda * (x * xi + 0.5 * x * y));
    for (int b = 0; b < M; ++b) col[b] += w * pb[b];
  }
  return col;
}

}  // namespace

LambdaPair lambda_k_of_mu(const MultiplierSpec& spec, int k, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("lambda_k_of_mu: mu must be positive");
  if (k < 0) throw std::invalid_argument("lambda_k_of_mu: k must be >= 0");
  const double m = 2.0 * k + spec.n;
  if (spec.kind == MultiplierKind::sublaplacian) return {mu / m, 1.0 / m};
  const double root = std::sqrt(4.0 * mu + m * m);
  // 0.5 (root - m) written without cancellation for small mu.
  return {2.0 * mu / (root + m), 1.0 / root};
}

SpectralTruncation SpectralTruncation::build(const MultiplierSpec& spec, double mu, int K, double growth) {
  if (K < 0) throw std::invalid_argument("SpectralTruncation: K must be >= 0");
  SpectralTruncation t;
  if (spec.kind == MultiplierKind::sublaplacian) {
    t = fractional_truncation(spec.n, mu, 0.0, K);
  } else {
    t.K = K;
    const double c = std::pow(kTwoPi, -(spec.n + 1));
    for (int k = 0; k <= K; ++k) {
      const LambdaPair lp = lambda_k_of_mu(spec, k, mu);
      t.lambdas.push_back(lp.lambda);
      t.coefficients.push_back(std::pow(lp.lambda, spec.n) * lp.lambda_prime * c);
    }
  }
  t.relative_tail = tail_ratio([&](int k) { return term_at(spec, k, mu, growth); }, K);
  return t;
}

int default_cutoff(const MultiplierSpec& spec, double mu, double p, double q, double tol) {
  const double growth = gamma_exponent(p, spec.n) + gamma_exponent(ExponentSpec::conjugate(q), spec.n);
  auto tail = [&](int K) { return tail_ratio([&](int k) { return term_at(spec, k, mu, growth); }, K); };
  int hi = 8;
  while (hi < kMaxCutoff && !(tail(hi) < tol)) hi *= 2;
  if (hi >= kMaxCutoff) return kMaxCutoff;
  int lo = hi / 2;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (tail(mid) < tol ? hi : lo) = mid;
  }
  return hi;
}

TraceResult group_fourier_trace(const SampledField& f_lambda, double lambda, int k, std::span<const double> z, int M) {
  const Grid& grid = f_lambda.grid;
  if (grid.dim() != 2) throw GridError("group_fourier_trace supports n = 1");
  if (lambda == 0.0) throw std::invalid_argument("group_fourier_trace: lambda must be nonzero");
  if (M < k + 8) throw std::invalid_argument("group_fourier_trace: need M >= k + 8");
  const int nx = grid.points[0];
  const int ny = grid.points[1];
  const double max_x = std::max({grid.half_extent[0], std::abs(z[0]), grid.half_extent[1]});
  const XiRule rule = xi_rule(M, lambda, max_x);
  const std::size_t nq = rule.nodes.size();

  // pi_l(f)[b][a] = sum_j sum_xi G_j(xi) Phi_a(xi + y_j) Phi_b(xi) dxi dA,
  // G_j(xi) = sum_i f(x_i, y_j) e^{i l x_i (xi + y_j / 2)}.
  Eigen::MatrixXcd pf = Eigen::MatrixXcd::Zero(M, M);
  std::vector<double> pb(nq * static_cast<std::size_t>(M));
  for (std::size_t q = 0; q < nq; ++q) hermite_basis(M, lambda, rule.nodes[q], pb.data() + q * M);
  std::vector<double> pa(static_cast<std::size_t>(M));
  for (int j = 0; j < ny; ++j) {
    const double y = grid.node(1, j);
    for (std::size_t q = 0; q < nq; ++q) {
      const double xi = rule.nodes[q];
      cd gq = 0.0;
      for (int i = 0; i < nx; ++i) {
        const cd v = f_lambda.values[static_cast<std::size_t>(i) * ny + j];
        if (v == cd(0.0, 0.0)) continue;
        const double x = grid.node(0, i);
        gq += v * std::polar(1.0, lambda * x * (xi + 0.5 * y));
      }
      if (gq == cd(0.0, 0.0)) continue;
      hermite_basis(M, lambda, xi + y, pa.data());
      const double* b = pb.data() + q * M;
      for (int a = 0; a < M; ++a) {
        if (pa[a] == 0.0) continue;
        const cd w = gq * pa[a];
        for (int bb = 0; bb < M; ++bb) pf(bb, a) += w * b[bb];
      }
    }
  }
  pf *= rule.step * grid.cell_volume();

  TraceResult res;
  double total = pf.squaredNorm();
  double tail = 0.0;
  for (int b = 0; b < M; ++b) {
    for (int a = 0; a < M; ++a) {
      if (a >= M / 2 || b >= M / 2) tail += std::norm(pf(b, a));
    }
  }
  res.tail_mass = total > 0.0 ? tail / total : 0.0;
  res.truncated = res.tail_mass > 1e-6;

  const auto col = matrix_column(M, lambda, k, z[0], z[1], rule);
  cd tr = 0.0;
  for (int b = 0; b < M; ++b) tr += pf(b, k) * std::conj(col[b]);
  res.value = tr;
  return res;
}

TraceResult group_fourier_trace(const CylinderField& f, double lambda, int k, std::span<const double> z, int M) {
  if (f.central.dim() != 1) throw GridError("group_fourier_trace needs a one-dimensional centre");
  const double eta[1] = {lambda};
  return group_fourier_trace(central_fourier(f, eta), lambda, k, z, M);
}

void WaveSum::add_term(std::span<const double> xi, const Eigen::VectorXcd& a) {
  if (static_cast<int>(xi.size()) != central_dim) throw std::invalid_argument("WaveSum: frequency dimension mismatch");
  if (static_cast<std::size_t>(a.size()) != points()) throw std::invalid_argument("WaveSum: amplitude size mismatch");
  freqs.insert(freqs.end(), xi.begin(), xi.end());
  amplitudes.conservativeResize(static_cast<Eigen::Index>(points()), amplitudes.cols() + 1);
  amplitudes.col(amplitudes.cols() - 1) = a;
}

cd WaveSum::value(std::size_t point, std::span<const double> z) const {
  cd s = 0.0;
  for (std::size_t j = 0; j < terms(); ++j) {
    double ph = 0.0;
    for (int a = 0; a < central_dim; ++a) ph += freqs[j * central_dim + a] * z[a];
    s += amplitudes(static_cast<Eigen::Index>(point), static_cast<Eigen::Index>(j)) * std::polar(1.0, ph);
  }
  return s;
}

CylinderField WaveSum::sample(const Grid& horizontal, const Grid& central) const {
  if (horizontal.size() != points()) throw GridError("WaveSum::sample: horizontal grid does not match the points");
  if (central.dim() != central_dim) throw GridError("WaveSum::sample: central dimension mismatch");
  const std::size_t nc = central.size();
  const auto nt = static_cast<Eigen::Index>(terms());
  Eigen::MatrixXcd w(nt, static_cast<Eigen::Index>(nc));
  std::vector<double> z(static_cast<std::size_t>(central_dim));
  for (std::size_t c = 0; c < nc; ++c) {
    central.coords(c, z.data());
    for (Eigen::Index j = 0; j < nt; ++j) {
      double ph = 0.0;
      for (int a = 0; a < central_dim; ++a) ph += freqs[static_cast<std::size_t>(j) * central_dim + a] * z[a];
      w(j, static_cast<Eigen::Index>(c)) = std::polar(1.0, ph);
    }
  }
  const Eigen::MatrixXcd v = amplitudes * w;  // points x central
  std::vector<cd> values(nc * points());
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t h = 0; h < points(); ++h) values[c * points() + h] = v(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(c));
  }
  return CylinderField::dense(horizontal, central, std::move(values));
}

double sup_central_lq_norm(const WaveSum& ws, double q, std::span<const double> central_points) {
  const int d = ws.central_dim;
  const std::size_t np = central_points.size() / static_cast<std::size_t>(d);
  const auto nt = static_cast<Eigen::Index>(ws.terms());
  const auto nx = static_cast<Eigen::Index>(ws.points());
  Eigen::VectorXd best = Eigen::VectorXd::Zero(nx);
  constexpr std::size_t kChunk = 2048;
  Eigen::MatrixXcd w;
  for (std::size_t s = 0; s < np; s += kChunk) {
    const std::size_t e = std::min(np, s + kChunk);
    w.resize(nt, static_cast<Eigen::Index>(e - s));
    for (std::size_t c = s; c < e; ++c) {
      for (Eigen::Index j = 0; j < nt; ++j) {
        double ph = 0.0;
        for (int a = 0; a < d; ++a) ph += ws.freqs[static_cast<std::size_t>(j) * d + a] * central_points[c * d + a];
        w(j, static_cast<Eigen::Index>(c - s)) = std::polar(1.0, ph);
      }
    }
    const Eigen::MatrixXcd v = ws.amplitudes * w;
    best = best.cwiseMax(v.cwiseAbs().rowwise().maxCoeff());
  }
  if (q == kInf) return best.size() ? best.maxCoeff() : 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < nx; ++i) acc += ws.weights[static_cast<std::size_t>(i)] * std::pow(best[i], q);
  return std::pow(acc, 1.0 / q);
}

std::vector<double> uniform_points(double a, double b, double dt) {
  std::vector<double> t;
  for (long i = 0;; ++i) {
    const double v = a + i * dt;
    if (v >= b) break;
    t.push_back(v);
  }
  return t;
}

namespace {

Eigen::VectorXcd to_vector(const SampledField& f) {
  return Eigen::Map<const Eigen::VectorXcd>(f.values.data(), static_cast<Eigen::Index>(f.size()));
}

WaveSum waves_from(const Grid& grid, const SpectralTruncation& trunc,
                   const std::function<SampledField(double)>& f_of_lambda) {
  const int n = grid.dim() / 2;
  if (n != 1) throw GridError("P_mu on sampled grids supports n = 1");
  WaveSum ws;
  ws.central_dim = 1;
  ws.weights.assign(grid.size(), grid.cell_volume());
  ws.amplitudes.resize(static_cast<Eigen::Index>(grid.size()), 0);
  const int K = trunc.K;
  std::vector<Eigen::VectorXcd> minus(static_cast<std::size_t>(K) + 1);
  std::vector<Eigen::VectorXcd> plus(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    const double l = trunc.lambdas[k];
    const double c = trunc.coefficients[k];
    auto kernel = [&](double r2) { return laguerre_phi_r2(k, n, r2, l); };
    SampledField fp = f_of_lambda(l);
    SampledField fm = f_of_lambda(-l);
    minus[k] = c * to_vector(twisted_convolve_radial(fp, kernel, -l));
    plus[k] = c * to_vector(twisted_convolve_radial(fm, kernel, l));
  }
  for (int k = 0; k <= K; ++k) {
    const double l = trunc.lambdas[k];
    const double xm[1] = {-l};
    const double xp[1] = {l};
    ws.add_term(xm, minus[k]);
    ws.add_term(xp, plus[k]);
  }
  return ws;
}

}  // namespace

WaveSum p_mu_waves(const SampledField& g, const std::function<cd(double)>& f_hat, const SpectralTruncation& trunc) {
  return waves_from(g.grid, trunc, [&](double l) {
    SampledField f = g;
    f *= f_hat(l);
    return f;
  });
}

WaveSum p_mu_waves(const CylinderField& f, const SpectralTruncation& trunc) {
  if (f.central.dim() != 1) throw GridError("P_mu needs a one-dimensional centre");
  return waves_from(f.horizontal, trunc, [&](double l) {
    const double eta[1] = {l};
    return central_fourier(f, eta);
  });
}

CylinderField p_mu(const CylinderField& f, const MultiplierSpec& spec, double mu, const SpectralTruncation& trunc) {
  if (f.horizontal.dim() != 2 * spec.n) throw GridError("p_mu: horizontal dimension does not match n");
  if (!(mu > 0.0)) throw std::invalid_argument("p_mu: mu must be positive");
  return p_mu_waves(f, trunc).sample(f.horizontal, f.central);
}

SpectralTruncation fractional_truncation(int n, double mu, double alpha, int K) {
  if (!(mu > 0.0)) throw std::invalid_argument("fractional_truncation: mu must be positive");
  SpectralTruncation t;
  t.K = K;
  const double pre = std::pow(mu, n - alpha) / std::pow(kTwoPi, n + 1);
  for (int k = 0; k <= K; ++k) {
    const double m = 2.0 * k + n;
    t.lambdas.push_back(mu / m);
    t.coefficients.push_back(pre * std::pow(m, alpha - (n + 1)));
  }
  return t;
}

CylinderField p_mu_fractional(const CylinderField& f, double mu, double alpha, int K) {
  if (!(alpha < 1.0)) throw std::invalid_argument("p_mu_fractional: alpha must be < 1");
  return p_mu_waves(f, fractional_truncation(f.horizontal.dim() / 2, mu, alpha, K)).sample(f.horizontal, f.central);
}

CylinderField integrate_p_mu(const CylinderField& f, int K, double lambda_max, int lambda_nodes) {
  if (f.central.dim() != 1 || f.horizontal.dim() != 2) throw GridError("integrate_p_mu supports n = 1, d = 1");
  const int n = 1;
  const double dl = lambda_max / lambda_nodes;
  const std::size_t nh = f.horizontal.size();
  const std::size_t nc = f.central.size();
  std::vector<cd> out(nh * nc, cd(0.0, 0.0));
  std::vector<double> phis(static_cast<std::size_t>(K) + 1);
  for (int j = 0; j < lambda_nodes; ++j) {
    const double l = (j + 0.5) * dl;
    auto kernel = [&](double r2) {
      laguerre_phi_upto(K, n, r2, l, phis.data());
      double s = 0.0;
      for (double v : phis) s += v;
      return s;
    };
    const double ep[1] = {l};
    const double em[1] = {-l};
    const SampledField a = twisted_convolve_radial(central_fourier(f, ep), kernel, -l);
    const SampledField b = twisted_convolve_radial(central_fourier(f, em), kernel, l);
    const double w = std::pow(l, n) / std::pow(kTwoPi, n + 1) * dl;
    for (std::size_t c = 0; c < nc; ++c) {
      const double t = f.central.node(0, static_cast<int>(c));
      const cd wm = w * std::polar(1.0, -l * t);
      const cd wp = w * std::polar(1.0, l * t);
      cd* row = out.data() + c * nh;
      for (std::size_t h = 0; h < nh; ++h) row[h] += wm * a.values[h] + wp * b.values[h];
    }
  }
  return CylinderField::dense(f.horizontal, f.central, std::move(out));
}

double p_star(int d) {
  if (d < 1) throw std::invalid_argument("p_star: d must be >= 1");
  return 2.0 * (d + 1) / (d + 3);
}

double gamma_exponent(double p, int n) {
  if (!(p >= 1.0 - 1e-12 && p <= 2.0 + 1e-12)) throw std::domain_error("gamma_exponent: p must lie in [1, 2]");
  const double ip = 1.0 / p;
  if (p <= p_star(2 * n)) return n * (ip - 0.5) - 0.5;
  return 0.5 * (0.5 - ip);
}

double series_exponent(double p, double q, int n, double alpha) {
  const double iq = q == kInf ? 0.0 : 1.0 / q;
  return gamma_exponent(p, n) + gamma_exponent(ExponentSpec::conjugate(q), n) - n * (1.0 / p - iq) + alpha;
}

int series_case(double p, double q, int n) {
  if (!(p >= 1.0 && p <= 2.0 && q >= 2.0)) throw std::domain_error("series_case: need 1 <= p <= 2 <= q");
  const double ps = p_star(2 * n);
  const double psc = ps / (ps - 1.0);
  if (p < ps) return q <= psc ? 1 : 2;
  return q <= psc ? 3 : 4;
}

bool series_converges(double p, double q, int n, double alpha) {
  const double ps = p_star(2 * n);
  const double psc = ps / (ps - 1.0);
  const double iq = q == kInf ? 0.0 : 1.0 / q;
  const double c = (2.0 * n + 1.0) / 2.0;
  switch (series_case(p, q, n)) {
    case 1:
      return alpha < c * (1.0 / psc - iq);
    case 2:
      return alpha < 0.0;
    case 3:
      return alpha < c * (1.0 / p - iq) - 1.0;
    default:
      return alpha < c * (1.0 / p - 1.0 / ps);
  }
}

double series_partial(double p, double q, int n, double alpha, long K) {
  const double e = series_exponent(p, q, n, alpha);
  double s = 0.0;
  for (long k = 0; k <= K; ++k) s += std::pow(2.0 * k + n, e);
  return s;
}

double series_block_ratio(double p, double q, int n, double alpha, int levels) {
  const double e = series_exponent(p, q, n, alpha);
  auto block = [&](int j) {
    double s = 0.0;
    for (long k = 1L << j; k < (1L << (j + 1)); ++k) s += std::pow(2.0 * k + n, e);
    return s;
  };
  return block(levels - 1) / block(levels - 2);
}

}  // namespace hlab
