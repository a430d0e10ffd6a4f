#include "hlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hlab/special_fn.hpp"
#include "hlab/twisted.hpp"

namespace hlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

// |S^{m-1}| = 2 pi^{m/2} / Gamma(m/2).
double sphere_area(int m) { return 2.0 * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m); }

double ratio_of(const EigenspaceProjector& proj, const SampledField& g, double p, SampledField* image) {
  SampledField pg = proj.apply(g);
  const double den = lp_norm(g, p);
  const double r = den > 0.0 ? lp_norm(pg, 2.0) / den : 0.0;
  if (image) *image = std::move(pg);
  return r;
}

// One duality-map run from g0. Returns the best ratio and leaves its input in best.
double duality_run(const EigenspaceProjector& proj, SampledField g, double p, const OpnormOptions& opts,
                   int& iterations, bool& converged, SampledField& best) {
  const double pc = ExponentSpec::conjugate(p);
  double best_r = -1.0;
  double prev = -1.0;
  converged = false;
  iterations = 0;
  SampledField image;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double r = ratio_of(proj, g, p, &image);
    iterations = it + 1;
    if (r > best_r) {
      best_r = r;
      best = g;
    }
    if (prev > 0.0 && std::abs(r - prev) <= opts.tolerance * r) {
      converged = true;
      break;
    }
    prev = r;
    double amax = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < image.size(); ++i) {
      const double a = std::abs(image[i]);
      if (a > amax) {
        amax = a;
        arg = i;
      }
    }
    if (amax == 0.0) break;
    if (p == 1.0) {
      std::fill(g.values.begin(), g.values.end(), cd(0.0));
      g.values[arg] = 1.0;
      continue;
    }
    for (std::size_t i = 0; i < image.size(); ++i) {
      const double a = std::abs(image[i]);
      g.values[i] = a > 0.0 ? std::pow(a / amax, pc - 1.0) * (image[i] / a) : cd(0.0);
    }
  }
  return std::max(best_r, 0.0);
}

std::vector<std::pair<std::string, SampledField>> make_starts(const Grid& grid, int k, int count, std::uint64_t seed) {
  std::vector<std::pair<std::string, SampledField>> out;
  const double h = grid.spacing(0);
  out.emplace_back("gaussian", SampledField::sample(grid, [&](std::span<const double> z) {
                     return cd(std::exp(-(z[0] * z[0] + z[1] * z[1]) / (1.4 * h * h)));
                   }));
  if (count >= 2) {
    out.emplace_back("annulus", SampledField::sample(grid, [&](std::span<const double> z) {
                       const cd w(z[0], z[1]);
                       return std::pow(w, k) * std::exp(-std::norm(w) / 4.0);
                     }));
  }
  for (int s = 2; s < count; ++s) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(s - 2));
    std::normal_distribution<double> normal;
    SampledField g(grid);
    double c[2];
    for (std::size_t i = 0; i < g.size(); ++i) {
      grid.coords(i, c);
      const double env = std::exp(-(c[0] * c[0] + c[1] * c[1]) / 20.0);
      const double re = normal(rng);
      const double im = normal(rng);
      g[i] = cd(re, im) * env;
    }
    out.emplace_back("random" + std::to_string(s - 2), std::move(g));
  }
  return out;
}

}  // namespace

std::string to_string(NormMethod m) {
  switch (m) {
    case NormMethod::closed_form_1_to_2:
      return "closed_form_1_to_2";
    case NormMethod::exact_2_to_2:
      return "exact_2_to_2";
    case NormMethod::duality_iteration:
      return "duality_iteration";
  }
  return "unknown";
}

NormEstimate opnorm_1_to_2(int k, int n, int radial_nodes) {
  if (k < 0 || n < 1) throw std::invalid_argument("opnorm_1_to_2: need k >= 0 and n >= 1");
  // phi_k decays like e^{-r^2 / 4} beyond the last Laguerre zero (r^2 < 4(2k + n)).
  const double rmax = 2.0 * std::sqrt(2.0 * k + n) + 16.0;
  const Quadrature qr = gauss_legendre(radial_nodes, 0.0, rmax);
  double s = 0.0;
  for (std::size_t i = 0; i < qr.nodes.size(); ++i) {
    const double r = qr.nodes[i];
    const double phi = laguerre_phi_r2(k, n, r * r, 1.0);
    s += qr.weights[i] * phi * phi * std::pow(r, 2 * n - 1);
  }
  NormEstimate e;
  e.k = k;
  e.n = n;
  e.p = 1.0;
  e.q = 2.0;
  e.value = std::pow(kTwoPi, -n) * std::sqrt(sphere_area(2 * n) * s);
  e.method = NormMethod::closed_form_1_to_2;
  e.converged = true;
  return e;
}

NormEstimate opnorm_p_to_2(const EigenspaceProjector& proj, double p, const OpnormOptions& opts,
                           const SampledField* warm, SampledField* best_out) {
  if (!(p >= 1.0 && p <= 2.0)) throw std::domain_error("opnorm_p_to_2: p must lie in [1, 2]");
  if (opts.starts < 1) throw std::invalid_argument("opnorm_p_to_2: need at least one start");
  NormEstimate e;
  e.k = proj.k();
  e.n = 1;
  e.p = p;
  e.q = 2.0;
  auto starts = make_starts(proj.grid(), proj.k(), opts.starts, opts.seed);
  e.gaussian_start_ratio = ratio_of(proj, starts.front().second, p, nullptr);
  if (p == 2.0) {
    e.value = 1.0;
    e.method = NormMethod::exact_2_to_2;
    e.converged = true;
    if (best_out) *best_out = proj.apply(starts.front().second);
    return e;
  }
  e.method = NormMethod::duality_iteration;
  if (warm) starts.emplace_back("warm", *warm);
  SampledField overall;
  for (auto& [name, g0] : starts) {
    int its = 0;
    bool conv = false;
    SampledField best;
    const double v = duality_run(proj, g0, p, opts, its, conv, best);
    e.start_names.push_back(name);
    e.start_values.push_back(v);
    if (v > e.value || e.iterations == 0) {
      e.value = v;
      e.iterations = its;
      e.converged = conv;
      overall = std::move(best);
    }
  }
  if (best_out) *best_out = std::move(overall);
  return e;
}

NormEstimate opnorm_p_to_2(int k, int n, double p, const Grid& grid, int starts, std::uint64_t seed) {
  if (n != 1) throw std::invalid_argument("opnorm_p_to_2: the sampled eigenbasis supports n = 1");
  const EigenspaceProjector proj(grid, k);
  OpnormOptions o;
  o.starts = starts;
  o.seed = seed;
  return opnorm_p_to_2(proj, p, o);
}

std::vector<NormEstimate> opnorm_p_sweep(const EigenspaceProjector& proj, std::vector<double> ps,
                                         const OpnormOptions& opts) {
  std::sort(ps.begin(), ps.end(), std::greater<>());
  std::vector<NormEstimate> out;
  SampledField warm;
  bool have_warm = false;
  for (double p : ps) {
    SampledField best;
    out.push_back(opnorm_p_to_2(proj, p, opts, have_warm ? &warm : nullptr, &best));
    warm = std::move(best);
    have_warm = true;
  }
  return out;
}

PowerFit fit_power_law(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw std::invalid_argument("fit_exponent: need at least three pairs");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [x, y] : pairs) {
    if (!(x > 0.0 && y > 0.0)) throw std::invalid_argument("fit_exponent: pairs must be positive");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double m = static_cast<double>(pairs.size());
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : pairs) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (sxx <= 1e-300) throw std::invalid_argument("fit_exponent: degenerate abscissae (all x equal)");
  PowerFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (const auto& [x, y] : pairs) {
    const double e = std::log(y) - (f.intercept + f.slope * std::log(x));
    rss += e * e;
  }
  f.residual = std::sqrt(rss / m);
  return f;
}

double fit_exponent(const std::vector<std::pair<double, double>>& pairs) { return fit_power_law(pairs).slope; }

namespace {

double knapp_ratio(int d, double r, double delta, const KnappOptions& o) {
  const double rc = ExponentSpec::conjugate(r);
  const double d2 = delta * delta;
  const double d4 = d2 * d2;
  const double theta_max = std::min(kPi, 8.0 * delta);
  const int nth = o.theta_points;
  const double hth = theta_max / nth;
  auto cap = [&](double th) {
    const double s = std::sin(th);
    const double c = -2.0 * std::pow(std::sin(0.5 * th), 2);  // cos th - 1 without cancellation
    return o.scale * std::exp(-s * s / (2.0 * d2) - c * c / (2.0 * d4));
  };
  const int na = o.axial_points;
  const double za = o.axial_extent / d2;
  const double dz = 2.0 * za / (na - 1);
  Eigen::MatrixXcd axial(0, na);
  double cross_weight = 0.0;
  Eigen::MatrixXcd F;
  if (d == 3) {
    // R* R h(rho, z) = 2 pi int J_0(rho sin th) h_hat(th) e^{i z cos th} sin th dth.
    const int nr = o.radial_points;
    const double dr = o.radial_extent / delta / nr;
    Eigen::MatrixXd J(nr, nth);
    Eigen::MatrixXcd E(nth, na);
    for (int j = 0; j < nth; ++j) {
      const double th = (j + 0.5) * hth;
      const double w = kTwoPi * cap(th) * std::sin(th) * hth;
      for (int i = 0; i < nr; ++i) J(i, j) = std::cyl_bessel_j(0.0, (i + 0.5) * dr * std::sin(th)) * w;
      for (int c = 0; c < na; ++c) E(j, c) = std::polar(1.0, (-za + c * dz) * std::cos(th));
    }
    F = J.cast<cd>() * E;
    double s = 0.0;
    for (int i = 0; i < nr; ++i) {
      const double rho = (i + 0.5) * dr;
      for (int c = 0; c < na; ++c) s += std::pow(std::abs(F(i, c)), rc) * kTwoPi * rho;
    }
    cross_weight = s * dr * dz;
  } else if (d == 2) {
    // R* R h(z1, z2) = int h_hat(th) e^{i (z1 sin th + z2 cos th)} dth over |th| <= theta_max.
    const int nr = o.radial_points;
    const double z1 = o.radial_extent / delta;
    const double dz1 = 2.0 * z1 / (nr - 1);
    Eigen::MatrixXcd A(nr, 2 * nth);
    Eigen::MatrixXcd E(2 * nth, na);
    for (int j = 0; j < 2 * nth; ++j) {
      const double th = -theta_max + (j + 0.5) * hth;
      const double w = cap(th) * hth;
      for (int i = 0; i < nr; ++i) A(i, j) = w * std::polar(1.0, (-z1 + i * dz1) * std::sin(th));
      for (int c = 0; c < na; ++c) E(j, c) = std::polar(1.0, (-za + c * dz) * std::cos(th));
    }
    F = A * E;
    double s = 0.0;
    for (Eigen::Index i = 0; i < F.size(); ++i) s += std::pow(std::abs(F.data()[i]), rc);
    cross_weight = s * dz1 * dz;
  } else {
    throw std::invalid_argument("knapp_experiment: d must be 2 or 3");
  }
  const double fn = std::pow(cross_weight, 1.0 / rc);
  // h(Z) = (2 pi)^{-d/2} delta^{d+1} exp(-delta^2 |Z'|^2 / 2 - delta^4 Z_d^2 / 2).
  const double amp = o.scale * std::pow(kTwoPi, -0.5 * d) * std::pow(delta, d + 1);
  const double hn = amp * std::pow(kTwoPi / (r * d2), (d - 1) / (2.0 * r)) * std::pow(kTwoPi / (r * d4), 1.0 / (2.0 * r));
  return fn / hn;
}

}  // namespace

KnappResult knapp_experiment(int d, double r, const std::vector<double>& deltas, double tolerance,
                             const KnappOptions& opts) {
  if (d != 2 && d != 3) throw std::invalid_argument("knapp_experiment: d must be 2 or 3");
  if (!(r > 1.0 && r <= 2.0)) throw std::invalid_argument("knapp_experiment: r must lie in (1, 2]");
  KnappResult res;
  res.d = d;
  res.r = r;
  std::vector<std::pair<double, double>> pts;
  for (double delta : deltas) {
    if (!(delta > 0.0) || delta < 4.0 * opts.frequency_spacing) {
      std::ostringstream os;
      os << "knapp_experiment: delta = " << delta << " is below four frequency grid steps ("
         << 4.0 * opts.frequency_spacing << ")";
      throw GridError(os.str());
    }
    const double v = knapp_ratio(d, r, delta, opts);
    res.rows.push_back({delta, v});
    pts.emplace_back(1.0 / delta, v);
  }
  if (pts.size() >= 3) {
    res.slope = fit_exponent(pts);
    res.blow_up = res.slope > tolerance;
  }
  return res;
}

void check_restriction_range(int d, const ExponentSpec& e, bool probe) {
  if (probe) return;
  const double ps = p_star(d);
  if (e.r < 1.0 || e.r > ps + 1e-12) {
    std::ostringstream os;
    os << "r = " << e.r << " is outside [1, p_*(" << d << ")] = [1, " << ps
       << "]; the restriction estimate fails beyond the Stein-Tomas exponent (Knapp example)."
       << " Pass --probe-out-of-range to run anyway.";
    throw RangeError(os.str());
  }
  if (e.p < 1.0 || e.p > 2.0 || e.q < 2.0) {
    std::ostringstream os;
    os << "(p, q) = (" << e.p << ", " << e.q << ") is outside 1 <= p <= 2 <= q."
       << " Pass --probe-out-of-range to run anyway.";
    throw RangeError(os.str());
  }
}

RestrictionRow restriction_ratio(const MetivierStructure& st, const ExponentSpec& e, double mu,
                                 const RestrictionOptions& o) {
  if (e.r != 1.0) throw std::invalid_argument("restriction_ratio: only r = 1 (impulse central profile) is measured");
  if (!(mu > 0.0)) throw std::invalid_argument("restriction_ratio: mu must be positive");
  const int n = st.n;
  const int m = 2 * n;
  const double hs = o.dilate ? 1.0 / std::sqrt(mu) : 1.0;  // horizontal length scale
  const double cs = o.dilate ? 1.0 / mu : 1.0;             // central length scale
  const double b = o.gaussian_b / (hs * hs);
  const bool delta = o.profile == HorizontalProfile::delta;
  if (delta && st.d != 1) throw std::invalid_argument("restriction_ratio: the delta profile is implemented for d = 1");

  // Radial horizontal points (r, 0, ..., 0) with weights |S^{2n-1}| r^{2n-1} dr.
  const Quadrature qr = gauss_legendre(o.radial_nodes, 0.0, o.radial_extent * hs);
  const std::size_t np = qr.nodes.size();
  std::vector<double> points(np * m, 0.0);
  std::vector<double> weights(np);
  for (std::size_t i = 0; i < np; ++i) {
    points[i * m] = qr.nodes[i];
    weights[i] = qr.weights[i] * sphere_area(m) * std::pow(qr.nodes[i], m - 1);
  }

  WaveSum ws;
  if (st.d == 1) {
    MultiplierSpec spec;
    spec.kind = o.multiplier;
    spec.n = n;
    if (o.alpha != 0.0 && o.multiplier != MultiplierKind::sublaplacian) {
      throw std::invalid_argument("restriction_ratio: fractional weights need the sublaplacian");
    }
    const SpectralTruncation tr =
        o.alpha != 0.0 ? fractional_truncation(n, mu, o.alpha, o.K) : SpectralTruncation::build(spec, mu, o.K);
    ws.central_dim = 1;
    ws.weights = weights;
    ws.amplitudes.resize(static_cast<Eigen::Index>(np), 0);
    for (int k = 0; k <= o.K; ++k) {
      const double lam = tr.lambdas[k];
      Eigen::VectorXcd a(static_cast<Eigen::Index>(np));
      for (std::size_t i = 0; i < np; ++i) {
        const double r2 = qr.nodes[i] * qr.nodes[i];
        // delta x phi_k = phi_k; Gaussian: (2 pi)^n Lambda_k of the closed form.
        const double v = delta ? laguerre_phi_r2(k, n, r2, lam)
                               : std::pow(kTwoPi, n) * gaussian_lambda_projection(b, k, n, lam, r2);
        a[static_cast<Eigen::Index>(i)] = tr.coefficients[k] * v;
      }
      const double xm = -lam;
      const double xp = lam;
      ws.add_term(std::span<const double>(&xm, 1), a);
      ws.add_term(std::span<const double>(&xp, 1), a);
    }
  } else {
    if (o.multiplier != MultiplierKind::sublaplacian) {
      throw std::invalid_argument("restriction_ratio: only the sublaplacian is available for d > 1");
    }
    IsotropicGaussian g;
    g.b = b;
    g.center.assign(static_cast<std::size_t>(m), 0.0);
    const SphereRule rule = st.d == 2 ? SphereRule::circle(o.sphere_points) : SphereRule::for_dimension(st.d);
    CentralSpectrum one = [](std::span<const double>) { return cd(1.0); };
    ws = p_mu_metivier_waves(st, mu, o.K, rule, one, g, points, weights);
  }

  std::vector<double> central;
  if (st.d == 1) {
    central = uniform_points(0.0, o.central_window * cs, o.central_step * cs);
  } else {
    const int c = o.central_points;
    const double ext = o.central_window * cs;
    std::size_t total = 1;
    for (int a = 0; a < st.d; ++a) total *= static_cast<std::size_t>(c);
    central.resize(total * st.d);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (int a = st.d - 1; a >= 0; --a) {
        const int i = static_cast<int>(rem % c);
        rem /= c;
        central[idx * st.d + a] = c > 1 ? -ext + 2.0 * ext * i / (c - 1) : 0.0;
      }
    }
  }

  RestrictionRow row;
  row.mu = mu;
  row.numerator = sup_central_lq_norm(ws, e.q, central);
  if (delta) {
    if (e.p != 1.0) throw std::invalid_argument("restriction_ratio: the delta profile needs p = 1");
    row.denominator = 1.0;
  } else if (e.p == kInf) {
    row.denominator = 1.0;
  } else {
    double s = 0.0;
    for (std::size_t i = 0; i < np; ++i) s += weights[i] * std::exp(-e.p * b * qr.nodes[i] * qr.nodes[i]);
    row.denominator = std::pow(s, 1.0 / e.p);
  }
  row.ratio = row.numerator / row.denominator;
  return row;
}

RestrictionReport restriction_experiment(const MetivierStructure& st, const ExponentSpec& exps,
                                         const std::vector<double>& mus, const RestrictionOptions& opts, bool probe) {
  const double ps = p_star(st.d);
  RestrictionReport rep;
  rep.out_of_range = exps.r < 1.0 || exps.r > ps + 1e-12 || exps.p < 1.0 || exps.p > 2.0 || exps.q < 2.0;
  check_restriction_range(st.d, exps, probe);
  rep.structure = st.name;
  rep.d = st.d;
  rep.n = st.n;
  rep.exps = exps;
  const double iq = exps.q == kInf ? 0.0 : 1.0 / exps.q;
  const double ir = 1.0 / exps.r;
  const double irc = exps.r == 1.0 ? 0.0 : 1.0 - ir;
  rep.predicted_slope = st.d * (2.0 * ir - 1.0) + st.n * (1.0 / exps.p - iq) - 1.0;
  rep.conditional_exponent = st.d * (ir - irc) + st.n * (1.0 / exps.p - iq) - 1.0;
  if (!rep.out_of_range) {
    rep.series_partial_sum = series_partial(exps.p, exps.q, st.n, 0.0, opts.K);
    rep.series_converges = series_converges(exps.p, exps.q, st.n, 0.0);
  }
  std::vector<std::pair<double, double>> pts;
  for (double mu : mus) {
    rep.rows.push_back(restriction_ratio(st, exps, mu, opts));
    pts.emplace_back(mu, rep.rows.back().ratio);
  }
  if (pts.size() >= 3) rep.measured_slope = fit_exponent(pts);
  return rep;
}

}  // namespace hlab
