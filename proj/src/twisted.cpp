#include "hlab/twisted.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "hlab/parallel.hpp"
#include "hlab/special_fn.hpp"

namespace hlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_plane(const Grid& g) {
  if (g.dim() != 2) throw GridError("twisted convolution needs a two-dimensional (n = 1) grid");
}

// Kernel sampled on the lattice of node differences, (2Nx - 1) x (2Ny - 1), with
// each row stored reversed.
struct DifferenceKernel {
  int nx = 0;
  int ny = 0;
  std::vector<double> re;
  std::vector<double> im;  // empty for real kernels

  int cols() const { return 2 * ny - 1; }
};

// Row p, column q hold the kernel at node offset (p - (Nx - 1) + ox, q - (Ny - 1) + oy).
template <class Fn>
DifferenceKernel make_kernel(const Grid& grid, bool complex_kernel, Fn value, int ox = 0, int oy = 0) {
  DifferenceKernel k;
  k.nx = grid.points[0];
  k.ny = grid.points[1];
  const int rows = 2 * k.nx - 1;
  const int cols = k.cols();
  k.re.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  if (complex_kernel) k.im.assign(k.re.size(), 0.0);
  for (int p = 0; p < rows; ++p) {
    for (int q = 0; q < cols; ++q) {
      const cd v = value(p - (k.nx - 1) + ox, q - (k.ny - 1) + oy);
      const std::size_t at = static_cast<std::size_t>(p) * cols + (cols - 1 - q);
      k.re[at] = v.real();
      if (complex_kernel) k.im[at] = v.imag();
    }
  }
  return k;
}

// out(a, b) = dA sum_c E[b][c] sum_d K(a - c, b - d) g(c, d) F[a][d] with
// E[b][c] = e^{(i/2) l y_b x_c} and F[a][d] = e^{-(i/2) l x_a y_d}, which is
// (K x_l g) at the output nodes (x_{a + ox}, y_{b + oy}). For each row offset
// p = a - c the d-sum is one Toeplitz matrix applied to all columns with that
// offset, so the work runs through blocked matrix products.
std::vector<cd> convolve_core(const DifferenceKernel& ker, const SampledField& g, double lambda, int ox = 0,
                              int oy = 0) {
  const Grid& grid = g.grid;
  const int nx = grid.points[0];
  const int ny = grid.points[1];
  const int cols = ker.cols();
  const bool cplx = !ker.im.empty();

  std::vector<cd> e(static_cast<std::size_t>(ny) * nx);
  std::vector<cd> f(static_cast<std::size_t>(nx) * ny);
  for (int b = 0; b < ny; ++b) {
    for (int c = 0; c < nx; ++c) {
      e[static_cast<std::size_t>(b) * nx + c] = std::polar(1.0, 0.5 * lambda * grid.node(1, b + oy) * grid.node(0, c));
    }
  }
  for (int a = 0; a < nx; ++a) {
    for (int d = 0; d < ny; ++d) {
      f[static_cast<std::size_t>(a) * ny + d] = std::polar(1.0, -0.5 * lambda * grid.node(0, a + ox) * grid.node(1, d));
    }
  }

  std::vector<cd> out(g.size());
  const double da = grid.cell_volume();
  // Output rows [a0, a1) per worker; writes are disjoint.
  parallel_for(static_cast<std::size_t>(nx), [&](std::size_t a0s, std::size_t a1s) {
    const int a0 = static_cast<int>(a0s);
    const int a1 = static_cast<int>(a1s);
    Eigen::MatrixXd tr(ny, ny);
    Eigen::MatrixXd ti(cplx ? ny : 0, cplx ? ny : 0);
    Eigen::MatrixXd v(ny, 2 * (a1 - a0));
    Eigen::MatrixXd wr;
    Eigen::MatrixXd wi;
    for (int pi = 0; pi < 2 * nx - 1; ++pi) {
      const int p = pi - (nx - 1);
      const int c_lo = std::max(0, a0 - p);
      const int c_hi = std::min(nx, a1 - p);
      if (c_lo >= c_hi) continue;
      const int m = c_hi - c_lo;
      // T(b, d) = K(p, b - d), stored reversed at column ny - 1 - b + d.
      const double* kr = ker.re.data() + static_cast<std::size_t>(pi) * cols;
      for (int d = 0; d < ny; ++d) {
        for (int b = 0; b < ny; ++b) tr(b, d) = kr[ny - 1 - b + d];
      }
      if (cplx) {
        const double* ki = ker.im.data() + static_cast<std::size_t>(pi) * cols;
        for (int d = 0; d < ny; ++d) {
          for (int b = 0; b < ny; ++b) ti(b, d) = ki[ny - 1 - b + d];
        }
      }
      for (int j = 0; j < m; ++j) {
        const int c = c_lo + j;
        const std::size_t a = static_cast<std::size_t>(p + c);
        for (int d = 0; d < ny; ++d) {
          const cd val = g.values[static_cast<std::size_t>(c) * ny + d] * f[a * ny + d];
          v(d, j) = val.real();
          v(d, m + j) = val.imag();
        }
      }
      const auto vb = v.leftCols(2 * m);
      wr.noalias() = tr * vb;
      if (cplx) wi.noalias() = ti * vb;
      for (int j = 0; j < m; ++j) {
        const int c = c_lo + j;
        const std::size_t a = static_cast<std::size_t>(p + c);
        cd* row = out.data() + a * ny;
        for (int b = 0; b < ny; ++b) {
          cd s(wr(b, j), wr(b, m + j));
          if (cplx) s += cd(-wi(b, m + j), wi(b, j));
          row[b] += e[static_cast<std::size_t>(b) * nx + c] * s;
        }
      }
    }
    for (int a = a0; a < a1; ++a) {
      for (int b = 0; b < ny; ++b) out[static_cast<std::size_t>(a) * ny + b] *= da;
    }
  });
  return out;
}

}  // namespace

SampledField twisted_convolve(const SampledField& h, const SampledField& g, double lambda) {
  if (!(h.grid == g.grid)) throw GridError("twisted_convolve: grid mismatch");
  require_plane(g.grid);
  const Grid& grid = g.grid;
  const int ix0 = grid.zero_index(0);
  const int iy0 = grid.zero_index(1);
  const int nx = grid.points[0];
  const int ny = grid.points[1];
  auto ker = make_kernel(grid, true, [&](int dx, int dy) -> cd {
    const int i = dx + ix0;
    const int j = dy + iy0;
    if (i < 0 || i >= nx || j < 0 || j >= ny) return 0.0;
    return h.values[static_cast<std::size_t>(i) * ny + j];
  });
  return SampledField(grid, convolve_core(ker, g, lambda));
}

std::vector<cd> twisted_convolve_radial_shifted(const SampledField& g, const std::function<double(double)>& kernel,
                                                double lambda, int ox, int oy) {
  require_plane(g.grid);
  const double hx = g.grid.spacing(0);
  const double hy = g.grid.spacing(1);
  auto ker = make_kernel(
      g.grid, false,
      [&](int dx, int dy) -> cd {
        const double x = dx * hx;
        const double y = dy * hy;
        return kernel(x * x + y * y);
      },
      ox, oy);
  // g x_l K = K x_{-l} g.
  return convolve_core(ker, g, -lambda, ox, oy);
}

SampledField twisted_convolve_radial(const SampledField& g, const std::function<double(double)>& kernel,
                                     double lambda) {
  return SampledField(g.grid, twisted_convolve_radial_shifted(g, kernel, lambda, 0, 0));
}

SampledField lambda_projection(const SampledField& g, int k, double lambda) {
  if (k < 0) throw std::invalid_argument("lambda_projection: k must be >= 0");
  if (lambda == 0.0) throw std::invalid_argument("lambda_projection: lambda must be nonzero");
  const double a = std::abs(lambda);
  SampledField out = twisted_convolve_radial(g, [&](double r2) { return laguerre_phi_r2(k, 1, r2, a); }, lambda);
  out *= 1.0 / kTwoPi;
  return out;
}

SampledField lambda_projection_sum(const SampledField& g, std::span<const double> weights, double lambda) {
  if (lambda == 0.0) throw std::invalid_argument("lambda_projection_sum: lambda must be nonzero");
  if (weights.empty()) return SampledField(g.grid);
  const double a = std::abs(lambda);
  const int kmax = static_cast<int>(weights.size()) - 1;
  std::vector<double> phis(weights.size());
  SampledField out = twisted_convolve_radial(
      g,
      [&](double r2) {
        laguerre_phi_upto(kmax, 1, r2, a, phis.data());
        double s = 0.0;
        for (int k = 0; k <= kmax; ++k) s += weights[k] * phis[k];
        return s;
      },
      lambda);
  out *= 1.0 / kTwoPi;
  return out;
}

std::vector<cd> lambda_projection_at(const SampledField& g, int kmax, double lambda, std::span<const double> z) {
  require_plane(g.grid);
  if (z.size() != 2) throw GridError("lambda_projection_at: point must be two-dimensional");
  const double a = std::abs(lambda);
  std::vector<cd> out(static_cast<std::size_t>(kmax) + 1, cd(0.0, 0.0));
  std::vector<double> phis(out.size());
  double u[2];
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.values[i] == cd(0.0, 0.0)) continue;
    g.grid.coords(i, u);
    const double dx = z[0] - u[0];
    const double dy = z[1] - u[1];
    laguerre_phi_upto(kmax, 1, dx * dx + dy * dy, a, phis.data());
    const cd w = g.values[i] * std::polar(1.0, -0.5 * lambda * (z[1] * u[0] - z[0] * u[1]));
    for (int k = 0; k <= kmax; ++k) out[k] += w * phis[k];
  }
  const double scale = g.grid.cell_volume() / kTwoPi;
  for (auto& v : out) v *= scale;
  return out;
}

double gaussian_lambda_projection(double b, int k, int n, double lambda, double r2) {
  const double a = std::abs(lambda);
  const double q = 4.0 * b / a;
  const double s = (q - 1.0) / (q + 1.0);
  return std::pow(a, -n) * std::pow(1.0 - s, n) * std::pow(s, k) * laguerre_phi_r2(k, n, r2, a);
}

SampledField SeparableSum::expand(const Grid& grid4) const {
  if (grid4.dim() != 4) throw GridError("SeparableSum::expand needs a four-dimensional grid");
  SampledField out(grid4);
  const int n0 = grid4.points[0];
  const int n1 = grid4.points[1];
  const int n2 = grid4.points[2];
  const int n3 = grid4.points[3];
  for (const auto& [f1, f2] : terms) {
    if (f1.grid.points != std::vector<int>{n0, n2} || f2.grid.points != std::vector<int>{n1, n3}) {
      throw GridError("SeparableSum::expand: factor grids do not match the pair axes");
    }
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n0; ++i0) {
      for (int i1 = 0; i1 < n1; ++i1) {
        for (int i2 = 0; i2 < n2; ++i2) {
          const cd a = f1.values[static_cast<std::size_t>(i0) * n2 + i2];
          for (int i3 = 0; i3 < n3; ++i3) {
            out.values[idx++] += a * f2.values[static_cast<std::size_t>(i1) * n3 + i3];
          }
        }
      }
    }
  }
  return out;
}

SeparableSum lambda_projection_separable(const SampledField& g1, const SampledField& g2, int k, double lambda) {
  SeparableSum s;
  for (int k1 = 0; k1 <= k; ++k1) {
    s.terms.emplace_back(lambda_projection(g1, k1, lambda), lambda_projection(g2, k - k1, lambda));
  }
  return s;
}

SampledField twisted_laplacian_apply(const SampledField& g, double lambda) {
  const Grid& grid = g.grid;
  const int dim = grid.dim();
  if (dim % 2 != 0) throw GridError("twisted_laplacian_apply needs an even-dimensional grid");
  const int n = dim / 2;
  std::vector<std::size_t> stride(static_cast<std::size_t>(dim), 1);
  for (int a = dim - 2; a >= 0; --a) stride[a] = stride[a + 1] * static_cast<std::size_t>(grid.points[a + 1]);

  SampledField out(grid);
  std::vector<double> x(static_cast<std::size_t>(dim));
  std::vector<int> idx(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::size_t rem = i;
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % static_cast<std::size_t>(grid.points[a]));
      rem /= static_cast<std::size_t>(grid.points[a]);
      x[a] = grid.node(a, idx[a]);
    }
    auto at = [&](int axis, int off) -> cd {
      const int j = idx[axis] + off;
      if (j < 0 || j >= grid.points[axis]) return 0.0;
      return g.values[static_cast<std::size_t>(static_cast<long>(i) + static_cast<long>(off) * static_cast<long>(stride[axis]))];
    };
    cd lap = 0.0;
    std::vector<cd> d1(static_cast<std::size_t>(dim));
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double h = grid.spacing(a);
      const cd m2 = at(a, -2), m1 = at(a, -1), c0 = g.values[i], p1 = at(a, 1), p2 = at(a, 2);
      lap += (-m2 + 16.0 * m1 - 30.0 * c0 + 16.0 * p1 - p2) / (12.0 * h * h);
      d1[a] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
      r2 += x[a] * x[a];
    }
    cd ang = 0.0;
    for (int j = 0; j < n; ++j) ang += x[n + j] * d1[j] - x[j] * d1[n + j];
    out.values[i] = -lap + cd(0.0, lambda) * ang + 0.25 * lambda * lambda * r2 * g.values[i];
  }
  return out;
}

PlancherelReport plancherel_check(const CylinderField& f, int K, const Grid& lambda_grid) {
  if (f.central.dim() != 1 || lambda_grid.dim() != 1) throw GridError("plancherel_check needs a one-dimensional centre");
  if (f.horizontal.dim() != 2) throw GridError("plancherel_check supports n = 1");
  const int n = 1;
  PlancherelReport rep;
  double lhs = 0.0;
  for (const auto& v : f.values) lhs += std::norm(v);
  rep.lhs = lhs * f.horizontal.cell_volume() * f.central.cell_volume();

  const double dl = lambda_grid.cell_volume();
  double rhs = 0.0;
  for (int j = 0; j < lambda_grid.points[0]; ++j) {
    // Cell midpoints: symmetric about 0 and never on it, where the integrand has a kink.
    const double l = lambda_grid.node(0, j) + 0.5 * dl;
    const double eta[1] = {l};
    const SampledField fl = central_fourier(f, eta);
    const double a = std::abs(l);
    // ||Lambda_k g||^2 = <Lambda_k g, g>: the pairing only needs the output where g lives,
    // while Lambda_k g itself spreads beyond the grid for small |l|.
    std::vector<double> phis(static_cast<std::size_t>(K) + 1);
    const SampledField c = twisted_convolve_radial(fl, [&](double r2) {
      laguerre_phi_upto(K, n, r2, a, phis.data());
      double t = 0.0;
      for (double v : phis) t += v;
      return t;
    }, l);
    rhs += inner(c, fl).real() * std::pow(a, n) * dl;
  }
  rep.rhs = rhs * std::pow(kTwoPi, -(n + 1));
  rep.gap = rep.lhs > 0.0 ? std::abs(rep.lhs - rep.rhs) / rep.lhs : (rep.rhs > 0.0 ? 1.0 : 0.0);
  return rep;
}

}  // namespace hlab
