#include "hlab/metivier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hlab/special_fn.hpp"
#include "hlab/twisted.hpp"
#include "json.hpp"

namespace hlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

Eigen::MatrixXd from_entries(int dim, std::initializer_list<std::tuple<int, int, double>> entries) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& [r, c, v] : entries) m(r, c) = v;
  return m;
}

// Pf(B_omega) is homogeneous of degree n, so for odd n it changes sign between omega
// and -omega and must vanish on the connected sphere S^{d-1} when d >= 2.
bool odd_pfaffian_degree(int d, int n) { return d >= 2 && n % 2 == 1; }

// Deterministic sample of unit vectors in R^d.
std::vector<double> sample_directions(int d, int count) {
  std::vector<double> out;
  if (d == 1) return {1.0, -1.0};
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd;
  for (int i = 0; i < count; ++i) {
    std::vector<double> v(static_cast<std::size_t>(d));
    double s = 0.0;
    for (auto& x : v) {
      x = nd(rng);
      s += x * x;
    }
    s = std::sqrt(s);
    for (auto x : v) out.push_back(x / s);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd MetivierStructure::b_omega(std::span<const double> omega) const {
  if (static_cast<int>(omega.size()) != d) throw StructureError("b_omega: omega has the wrong dimension");
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int a = 0; a < d; ++a) b += omega[a] * J[a];
  return b;
}

MetivierStructure MetivierStructure::heisenberg_1() {
  MetivierStructure s;
  s.name = "heisenberg_1";
  s.d = 1;
  s.n = 1;
  s.J.push_back(from_entries(2, {{0, 1, 1.0}, {1, 0, -1.0}}));
  return s;
}

MetivierStructure MetivierStructure::complex_heisenberg() {
  // Coordinates (a, b, c, d) with complex pairs (a, c) and (b, d).
  MetivierStructure s;
  s.name = "complex_heisenberg";
  s.d = 2;
  s.n = 2;
  s.J.push_back(from_entries(4, {{0, 2, 1.0}, {1, 3, -1.0}, {2, 0, -1.0}, {3, 1, 1.0}}));
  s.J.push_back(from_entries(4, {{0, 3, 1.0}, {1, 2, 1.0}, {2, 1, -1.0}, {3, 0, -1.0}}));
  return s;
}

MetivierStructure MetivierStructure::quaternionic_h_type() {
  // Quaternion coordinates (q0, q1, q2, q3) for q0 + q1 i + q2 j + q3 k.
  MetivierStructure s;
  s.name = "quaternionic_h_type";
  s.d = 3;
  s.n = 2;
  s.J.push_back(from_entries(4, {{0, 1, -1.0}, {1, 0, 1.0}, {2, 3, -1.0}, {3, 2, 1.0}}));
  s.J.push_back(from_entries(4, {{0, 2, -1.0}, {1, 3, 1.0}, {2, 0, 1.0}, {3, 1, -1.0}}));
  s.J.push_back(from_entries(4, {{0, 3, -1.0}, {1, 2, -1.0}, {2, 1, 1.0}, {3, 0, 1.0}}));
  return s;
}

MetivierStructure MetivierStructure::from_json(const std::string& text, const std::string& name) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw StructureError(std::string("structure file is not valid JSON: ") + e.what());
  }
  if (!j.contains("d") || !j.contains("n") || !j.contains("J")) throw StructureError("structure needs keys d, n and J");
  MetivierStructure s;
  s.name = name;
  s.d = j.at("d").get<int>();
  s.n = j.at("n").get<int>();
  if (s.d < 1 || s.n < 1) throw StructureError("structure needs d >= 1 and n >= 1");
  const auto& js = j.at("J");
  if (!js.is_array() || static_cast<int>(js.size()) != s.d) throw StructureError("J must list d matrices");
  const int m = 2 * s.n;
  for (const auto& flat : js) {
    if (!flat.is_array() || static_cast<int>(flat.size()) != m * m) {
      throw StructureError("each J matrix must have (2n)^2 row-major entries");
    }
    Eigen::MatrixXd a(m, m);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) a(r, c) = flat[static_cast<std::size_t>(r * m + c)].get<double>();
    }
    if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
      throw StructureError("J matrices must be skew-symmetric");
    }
    s.J.push_back(a);
  }
  if (odd_pfaffian_degree(s.d, s.n)) {
    throw StructureError("structure is not Metivier: for d >= 2 and odd n, B_omega degenerates on some direction");
  }
  const auto dirs = sample_directions(s.d, 1000);
  double min_det = kInf;
  for (std::size_t i = 0; i < dirs.size(); i += static_cast<std::size_t>(s.d)) {
    const double det = std::abs(s.b_omega({dirs.data() + i, static_cast<std::size_t>(s.d)}).determinant());
    min_det = std::min(min_det, det);
  }
  if (!(min_det >= 1e-10)) {
    throw StructureError("structure is not Metivier: B_omega degenerates (min |det| = " + std::to_string(min_det) + ")");
  }
  return s;
}

std::vector<std::string> builtin_structure_names() {
  return {"heisenberg_1", "complex_heisenberg", "quaternionic_h_type"};
}

MetivierStructure builtin_structure(const std::string& name) {
  if (name == "heisenberg_1") return MetivierStructure::heisenberg_1();
  if (name == "complex_heisenberg") return MetivierStructure::complex_heisenberg();
  if (name == "quaternionic_h_type") return MetivierStructure::quaternionic_h_type();
  throw StructureError("unknown built-in structure '" + name + "'");
}

SphereRule SphereRule::two_point() {
  SphereRule r;
  r.d = 1;
  r.nodes = {1.0, -1.0};
  r.weights = {1.0, 1.0};
  return r;
}

SphereRule SphereRule::circle(int m) {
  SphereRule r;
  r.d = 2;
  for (int i = 0; i < m; ++i) {
    const double th = kTwoPi * i / m;
    r.nodes.push_back(std::cos(th));
    r.nodes.push_back(std::sin(th));
    r.weights.push_back(kTwoPi / m);
  }
  return r;
}

namespace {

SphereRule polar_rule(double c_lo, int n_polar, int n_azimuth) {
  SphereRule r;
  r.d = 3;
  const Quadrature gl = gauss_legendre(n_polar, c_lo, 1.0);
  for (int i = 0; i < n_polar; ++i) {
    const double c = gl.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < n_azimuth; ++j) {
      const double ph = kTwoPi * j / n_azimuth;
      r.nodes.push_back(s * std::cos(ph));
      r.nodes.push_back(s * std::sin(ph));
      r.nodes.push_back(c);
      r.weights.push_back(gl.weights[i] * kTwoPi / n_azimuth);
    }
  }
  return r;
}

}  // namespace

SphereRule SphereRule::sphere(int n_polar, int n_azimuth) { return polar_rule(-1.0, n_polar, n_azimuth); }

SphereRule SphereRule::cap(double theta_max, int n_polar, int n_azimuth) {
  return polar_rule(std::cos(theta_max), n_polar, n_azimuth);
}

SphereRule SphereRule::for_dimension(int d) {
  switch (d) {
    case 1:
      return two_point();
    case 2:
      return circle(64);
    case 3:
      return sphere(16, 32);
    default:
      throw StructureError("sphere rules are provided for d <= 3");
  }
}

MetivierCheck check_metivier(const MetivierStructure& st, const SphereRule& rule, double eps) {
  if (rule.d != st.d) throw StructureError("check_metivier: rule dimension does not match the structure");
  MetivierCheck res;
  res.min_abs_det = kInf;
  double max_det = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double det = std::abs(st.b_omega(rule.node(i)).determinant());
    res.min_abs_det = std::min(res.min_abs_det, det);
    max_det = std::max(max_det, det);
  }
  res.ok = res.min_abs_det >= eps;
  if (odd_pfaffian_degree(st.d, st.n)) {
    res.ok = false;
    res.min_abs_det = 0.0;
  }
  // |det A| = |det B|^{-1/2}.
  if (res.ok) res.k_constant = std::max(std::pow(res.min_abs_det, -0.5), std::pow(max_det, 0.5));
  return res;
}

Eigen::MatrixXd symplectic_normalizer(const Eigen::MatrixXd& B) {
  const auto m = B.rows();
  if (m != B.cols() || m % 2 != 0) throw NearSingularError("symplectic_normalizer: B must be square of even size");
  const Eigen::Index n = m / 2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B.transpose() * B);
  const Eigen::VectorXd ev = es.eigenvalues();
  const Eigen::MatrixXd vecs = es.eigenvectors();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());

  // Clusters of equal beta^2, visited in descending order.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;  // [lo, hi) in ascending order
  Eigen::Index lo = 0;
  for (Eigen::Index i = 1; i <= m; ++i) {
    if (i == m || ev[i] - ev[i - 1] > 1e-8 * scale) {
      clusters.emplace_back(lo, i);
      lo = i;
    }
  }
  std::reverse(clusters.begin(), clusters.end());

  Eigen::MatrixXd A(m, m);
  Eigen::Index next = 0;
  for (const auto& [a, b] : clusters) {
    const double beta = std::sqrt(std::max(0.0, ev.segment(a, b - a).mean()));
    if (beta < 1e-12) throw NearSingularError("symplectic_normalizer: B is (near) singular");
    if ((b - a) % 2 != 0) throw NearSingularError("symplectic_normalizer: odd eigenspace, B is not skew");
    std::vector<Eigen::VectorXd> chosen;
    for (Eigen::Index pair = 0; pair < (b - a) / 2; ++pair) {
      Eigen::VectorXd best;
      double best_norm = -1.0;
      for (Eigen::Index c = a; c < b; ++c) {
        Eigen::VectorXd v = vecs.col(c);
        for (const auto& u : chosen) v -= u.dot(v) * u;
        const double nv = v.norm();
        if (nv > best_norm + 1e-12) {
          best_norm = nv;
          best = v;
        }
      }
      Eigen::VectorXd q1 = best / best_norm;
      for (Eigen::Index r = 0; r < m; ++r) {
        if (std::abs(q1[r]) > 1e-12) {
          if (q1[r] < 0.0) q1 = -q1;
          break;
        }
      }
      const Eigen::VectorXd q2 = -B * q1 / beta;
      chosen.push_back(q1);
      chosen.push_back(q2);
      A.col(next) = q1 / std::sqrt(beta);
      A.col(n + next) = q2 / std::sqrt(beta);
      ++next;
    }
  }
  return A;
}

cd IsotropicGaussian::operator()(std::span<const double> v) const {
  double r2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double c = i < center.size() ? center[i] : 0.0;
    r2 += (v[i] - c) * (v[i] - c);
  }
  return amplitude * std::exp(-b * r2);
}

bool IsotropicGaussian::centred() const {
  return std::all_of(center.begin(), center.end(), [](double c) { return c == 0.0; });
}

namespace {

// h(W) = g(M W) on g's grid: exact when M W is a node, bilinear otherwise; zero outside.
SampledField compose_linear(const SampledField& g, const Eigen::Matrix2d& M) {
  const Grid& grid = g.grid;
  const int nx = grid.points[0];
  const int ny = grid.points[1];
  const double hx = grid.spacing(0);
  const double hy = grid.spacing(1);
  auto at = [&](int i, int j) -> cd {
    if (i < 0 || i >= nx || j < 0 || j >= ny) return 0.0;
    return g.values[static_cast<std::size_t>(i) * ny + j];
  };
  SampledField out(grid);
  double w[2];
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    grid.coords(idx, w);
    const double x = M(0, 0) * w[0] + M(0, 1) * w[1];
    const double y = M(1, 0) * w[0] + M(1, 1) * w[1];
    const double sx = (x + grid.half_extent[0]) / hx;
    const double sy = (y + grid.half_extent[1]) / hy;
    const double rx = std::round(sx);
    const double ry = std::round(sy);
    if (std::abs(sx - rx) < 1e-9 && std::abs(sy - ry) < 1e-9) {
      out.values[idx] = at(static_cast<int>(rx), static_cast<int>(ry));
      continue;
    }
    const int i0 = static_cast<int>(std::floor(sx));
    const int j0 = static_cast<int>(std::floor(sy));
    const double fx = sx - i0;
    const double fy = sy - j0;
    out.values[idx] = (1 - fx) * (1 - fy) * at(i0, j0) + fx * (1 - fy) * at(i0 + 1, j0) + (1 - fx) * fy * at(i0, j0 + 1) +
                      fx * fy * at(i0 + 1, j0 + 1);
  }
  return out;
}

// Column of the single +-1 entry in each row, or empty when A is not a signed
// permutation of axes that share a node set.
std::vector<int> signed_permutation(const Eigen::Matrix2d& A, const Grid& grid) {
  std::vector<int> col(2, -1);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double v = A(r, c);
      if (std::abs(v) < 1e-14) continue;
      if (std::abs(std::abs(v) - 1.0) > 1e-14 || col[r] >= 0) return {};
      col[r] = c;
    }
    if (col[r] < 0) return {};
  }
  if (col[0] == col[1]) return {};
  if (col[0] == 1 && (grid.points[0] != grid.points[1] || grid.half_extent[0] != grid.half_extent[1])) return {};
  return col;
}

void require_orthogonal(const Eigen::MatrixXd& A) {
  const Eigen::MatrixXd e = A.transpose() * A - Eigen::MatrixXd::Identity(A.rows(), A.cols());
  if (e.cwiseAbs().maxCoeff() > 1e-10) {
    throw StructureError("closed-form projections need an orthogonal normalizer (H-type structure)");
  }
}

}  // namespace

SampledField pi_k_projection(const SampledField& g, int k, double rho, const Eigen::MatrixXd& A) {
  if (g.grid.dim() != 2 || A.rows() != 2) throw GridError("sampled pi_k_projection supports n = 1");
  if (!(rho > 0.0)) throw std::invalid_argument("pi_k_projection: rho must be positive");
  if (A.isIdentity(0.0)) return lambda_projection(g, k, rho);
  const Eigen::Matrix2d a = A;
  const SampledField ga = compose_linear(g, a);
  const auto perm = signed_permutation(a, g.grid);
  if (perm.empty()) {
    const SampledField pa = lambda_projection(ga, k, rho);
    return compose_linear(pa, a.inverse());
  }
  // A^{-1} = A^T maps the nodes onto themselves up to reflection, and a reflected
  // axis (node i -> node N - i) lands on the grid moved by one step. Evaluate there
  // so no boundary row is lost.
  const Grid& grid = g.grid;
  int sign[2];
  int source[2];  // (A^T V)_r = sign[r] V_{source[r]}
  for (int c = 0; c < 2; ++c) {
    const int r = perm[c];
    source[r] = c;
    sign[r] = a(c, r) > 0 ? 1 : -1;
  }
  const int ox = sign[0] < 0 ? 1 : 0;
  const int oy = sign[1] < 0 ? 1 : 0;
  const double lam = rho;
  const std::vector<cd> w = twisted_convolve_radial_shifted(
      ga, [&](double r2) { return laguerre_phi_r2(k, 1, r2, lam); }, rho, ox, oy);
  const int nx = grid.points[0];
  const int ny = grid.points[1];
  SampledField out(grid);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const int iv[2] = {i, j};
      int m[2];
      for (int r = 0; r < 2; ++r) {
        const int src = iv[source[r]];
        m[r] = sign[r] > 0 ? src : grid.points[source[r]] - 1 - src;
      }
      out.values[static_cast<std::size_t>(i) * ny + j] =
          w[static_cast<std::size_t>(m[0]) * ny + m[1]] / (2.0 * std::numbers::pi);
    }
  }
  return out;
}

SampledField pi_k_projection(const SampledField& g, int k, double rho, std::span<const double> omega,
                             const MetivierStructure& st) {
  return pi_k_projection(g, k, rho, symplectic_normalizer(st.b_omega(omega)));
}

std::vector<cd> shifted_gaussian_projection_at(double b, std::span<const double> c, double rho, int kmax,
                                               std::span<const double> w) {
  const double wn = std::hypot(w[0], w[1]);
  const double band = 0.5 * rho * wn + std::sqrt(rho * (2.0 * kmax + 1.0)) + 7.0 * std::sqrt(b + 0.25 * rho);
  const double h = kTwoPi / (1.25 * band);
  const double reach = std::sqrt(38.0 / b);
  const int m = static_cast<int>(std::ceil(reach / h));
  std::vector<cd> out(static_cast<std::size_t>(kmax) + 1, cd(0.0, 0.0));
  std::vector<double> phis(out.size());
  for (int i = -m; i <= m; ++i) {
    for (int j = -m; j <= m; ++j) {
      const double ux = c[0] + i * h;
      const double uy = c[1] + j * h;
      const double gv = std::exp(-b * h * h * (static_cast<double>(i) * i + static_cast<double>(j) * j));
      const double dx = w[0] - ux;
      const double dy = w[1] - uy;
      laguerre_phi_upto(kmax, 1, dx * dx + dy * dy, rho, phis.data());
      const cd e = std::polar(gv, -0.5 * rho * (w[1] * ux - w[0] * uy));
      for (int k = 0; k <= kmax; ++k) out[k] += e * phis[k];
    }
  }
  for (auto& v : out) v *= h * h / kTwoPi;
  return out;
}

std::vector<cd> pi_k_projection_at(const IsotropicGaussian& g, int kmax, double rho, const Eigen::MatrixXd& A,
                                   std::span<const double> v) {
  require_orthogonal(A);
  const auto m = A.rows();
  const int n = static_cast<int>(m / 2);
  const Eigen::VectorXd vv = Eigen::Map<const Eigen::VectorXd>(v.data(), m);
  const Eigen::VectorXd w = A.transpose() * vv;
  std::vector<cd> out(static_cast<std::size_t>(kmax) + 1);
  if (g.centred()) {
    const double r2 = w.squaredNorm();
    for (int k = 0; k <= kmax; ++k) out[k] = g.amplitude * gaussian_lambda_projection(g.b, k, n, rho, r2);
    return out;
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m && i < static_cast<Eigen::Index>(g.center.size()); ++i) c[i] = g.center[i];
  const Eigen::VectorXd cw = A.transpose() * c;
  std::vector<cd> acc(static_cast<std::size_t>(kmax) + 1, cd(0.0, 0.0));
  acc[0] = g.amplitude;
  for (int j = 0; j < n; ++j) {
    const double cp[2] = {cw[j], cw[n + j]};
    const double wp[2] = {w[j], w[n + j]};
    const auto pj = shifted_gaussian_projection_at(g.b, cp, rho, kmax, wp);
    std::vector<cd> next(acc.size(), cd(0.0, 0.0));
    for (int k1 = 0; k1 <= kmax; ++k1) {
      for (int k2 = 0; k1 + k2 <= kmax; ++k2) next[k1 + k2] += acc[k1] * pj[k2];
    }
    acc.swap(next);
  }
  return acc;
}

namespace {

// Eighth-order Lagrange interpolation of h on its grid at z; zero outside.
cd interpolate(const SampledField& h, std::span<const double> z) {
  const Grid& grid = h.grid;
  const int d = grid.dim();
  constexpr int kOrder = 8;
  std::vector<int> base(static_cast<std::size_t>(d));
  std::vector<double> w(static_cast<std::size_t>(d) * kOrder);
  for (int a = 0; a < d; ++a) {
    const double s = (z[a] + grid.half_extent[a]) / grid.spacing(a);
    const int i0 = static_cast<int>(std::floor(s)) - kOrder / 2 + 1;
    base[a] = i0;
    for (int p = 0; p < kOrder; ++p) {
      double l = 1.0;
      for (int q = 0; q < kOrder; ++q) {
        if (q != p) l *= (s - (i0 + q)) / static_cast<double>(p - q);
      }
      w[static_cast<std::size_t>(a) * kOrder + p] = l;
    }
  }
  cd acc = 0.0;
  const int total = static_cast<int>(std::pow(kOrder, d));
  for (int t = 0; t < total; ++t) {
    int rem = t;
    double wt = 1.0;
    std::size_t idx = 0;
    bool inside = true;
    for (int a = 0; a < d; ++a) {
      const int p = rem % kOrder;
      rem /= kOrder;
      const int i = base[a] + p;
      if (i < 0 || i >= grid.points[a]) {
        inside = false;
        break;
      }
      wt *= w[static_cast<std::size_t>(a) * kOrder + p];
    }
    if (!inside) continue;
    rem = t;
    std::vector<int> ii(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      ii[a] = base[a] + rem % kOrder;
      rem /= kOrder;
    }
    for (int a = 0; a < d; ++a) idx = idx * static_cast<std::size_t>(grid.points[a]) + static_cast<std::size_t>(ii[a]);
    acc += wt * h.values[idx];
  }
  return acc;
}

// Orthonormal basis of omega^perp (d - 1 vectors).
std::vector<Eigen::VectorXd> perp_basis(std::span<const double> omega) {
  const auto d = static_cast<Eigen::Index>(omega.size());
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(omega.data(), d);
  w.normalize();
  std::vector<Eigen::VectorXd> basis{w};
  for (Eigen::Index e = 0; e < d && static_cast<Eigen::Index>(basis.size()) < d; ++e) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(d, e);
    for (const auto& u : basis) v -= u.dot(v) * u;
    if (v.norm() > 1e-6) basis.push_back(v.normalized());
  }
  basis.erase(basis.begin());
  return basis;
}

std::vector<cd> radon_profile(const SampledField& h, std::span<const double> omega, const Grid& t_grid) {
  const int d = h.grid.dim();
  const auto perp = perp_basis(omega);
  double ds = h.grid.spacing(0);
  double reach = 0.0;
  for (int a = 0; a < d; ++a) {
    ds = std::min(ds, h.grid.spacing(a));
    reach += h.grid.half_extent[a] * h.grid.half_extent[a];
  }
  reach = std::sqrt(reach);
  const int m = static_cast<int>(std::ceil(reach / ds));
  std::vector<cd> out(static_cast<std::size_t>(t_grid.points[0]));
  std::vector<double> z(static_cast<std::size_t>(d));
  for (int it = 0; it < t_grid.points[0]; ++it) {
    const double t = t_grid.node(0, it);
    cd acc = 0.0;
    if (d == 2) {
      for (int i = -m; i <= m; ++i) {
        for (int a = 0; a < d; ++a) z[a] = t * omega[a] + i * ds * perp[0][a];
        acc += interpolate(h, z);
      }
      acc *= ds;
    } else {
      for (int i = -m; i <= m; ++i) {
        for (int j = -m; j <= m; ++j) {
          if (static_cast<double>(i) * i + static_cast<double>(j) * j > static_cast<double>(m) * m) continue;
          for (int a = 0; a < d; ++a) z[a] = t * omega[a] + i * ds * perp[0][a] + j * ds * perp[1][a];
          acc += interpolate(h, z);
        }
      }
      acc *= ds * ds;
    }
    out[static_cast<std::size_t>(it)] = acc;
  }
  return out;
}

}  // namespace

CylinderField radon_transform(const CylinderField& f, std::span<const double> omega, const Grid& t_grid) {
  const int d = f.central.dim();
  if (d != 2 && d != 3) throw GridError("radon_transform needs d in {2, 3}");
  if (static_cast<int>(omega.size()) != d) throw GridError("radon_transform: omega dimension mismatch");
  if (t_grid.dim() != 1) throw GridError("radon_transform: t grid must be one-dimensional");
  if (f.separable && f.h_factor && f.g_factor) {
    SampledField r(t_grid, radon_profile(*f.h_factor, omega, t_grid));
    return CylinderField::from_factors(r, *f.g_factor);
  }
  if (d != 2) throw GridError("radon_transform: dense inputs are supported for d = 2 only");
  const std::size_t nh = f.horizontal.size();
  const std::size_t nt = t_grid.size();
  std::vector<cd> values(nh * nt);
  for (std::size_t h = 0; h < nh; ++h) {
    std::vector<cd> col(f.central.size());
    for (std::size_t c = 0; c < col.size(); ++c) col[c] = f.at(c, h);
    const auto prof = radon_profile(SampledField(f.central, std::move(col)), omega, t_grid);
    for (std::size_t t = 0; t < nt; ++t) values[t * nh + h] = prof[t];
  }
  return CylinderField::dense(f.horizontal, t_grid, std::move(values));
}

cd sphere_extension(std::span<const cd> h_hat, std::span<const double> z, const SphereRule& rule) {
  if (h_hat.size() != rule.size()) throw std::invalid_argument("sphere_extension: one value per rule node expected");
  cd acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto w = rule.node(i);
    double ph = 0.0;
    for (int a = 0; a < rule.d; ++a) ph += w[a] * z[a];
    acc += rule.weights[i] * h_hat[i] * std::polar(1.0, -ph);
  }
  return acc;
}

namespace {

std::vector<Eigen::MatrixXd> normalizers(const MetivierStructure& st, const SphereRule& rule) {
  if (rule.d != st.d) throw StructureError("sphere rule dimension does not match the structure");
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t i = 0; i < rule.size(); ++i) out.push_back(symplectic_normalizer(st.b_omega(rule.node(i))));
  return out;
}

double term_coefficient(const MetivierStructure& st, double mu, int k) {
  const int n = st.n;
  const int d = st.d;
  return std::pow(kTwoPi, -d) * std::pow(mu, n + d - 1) * std::pow(2.0 * k + n, -n - d);
}

}  // namespace

WaveSum p_mu_metivier_waves(const MetivierStructure& st, double mu, int K, const SphereRule& rule,
                            const CentralSpectrum& h_hat, const IsotropicGaussian& g, std::span<const double> points,
                            std::span<const double> weights) {
  const int m = 2 * st.n;
  const std::size_t np = points.size() / static_cast<std::size_t>(m);
  if (weights.size() != np) throw std::invalid_argument("p_mu_metivier_waves: one weight per point expected");
  const auto as = normalizers(st, rule);
  WaveSum ws;
  ws.central_dim = st.d;
  ws.weights.assign(weights.begin(), weights.end());
  ws.amplitudes.resize(static_cast<Eigen::Index>(np), 0);
  std::vector<double> xi(static_cast<std::size_t>(st.d));
  for (int k = 0; k <= K; ++k) {
    const double rho = mu / (2.0 * k + st.n);
    const double ck = term_coefficient(st, mu, k);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const auto w = rule.node(i);
      for (int a = 0; a < st.d; ++a) xi[a] = rho * w[a];
      const cd c = ck * rule.weights[i] * h_hat(xi);
      Eigen::VectorXcd amp(static_cast<Eigen::Index>(np));
      for (std::size_t p = 0; p < np; ++p) {
        const auto pk = pi_k_projection_at(g, k, rho, as[i], points.subspan(p * m, static_cast<std::size_t>(m)));
        amp[static_cast<Eigen::Index>(p)] = c * pk[k];
      }
      ws.add_term(xi, amp);
    }
  }
  return ws;
}

WaveSum p_mu_metivier_waves(const MetivierStructure& st, double mu, int K, const SphereRule& rule,
                            const CentralSpectrum& h_hat, const SampledField& g) {
  if (st.n != 1 || g.grid.dim() != 2) throw GridError("sampled Metivier projector supports n = 1");
  const auto as = normalizers(st, rule);
  WaveSum ws;
  ws.central_dim = st.d;
  ws.weights.assign(g.size(), g.grid.cell_volume());
  ws.amplitudes.resize(static_cast<Eigen::Index>(g.size()), 0);
  std::vector<double> xi(static_cast<std::size_t>(st.d));
  for (int k = 0; k <= K; ++k) {
    const double rho = mu / (2.0 * k + st.n);
    const double ck = term_coefficient(st, mu, k);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const auto w = rule.node(i);
      for (int a = 0; a < st.d; ++a) xi[a] = rho * w[a];
      const cd c = ck * rule.weights[i] * h_hat(xi);
      const SampledField pk = pi_k_projection(g, k, rho, as[i]);
      Eigen::VectorXcd amp = c * Eigen::Map<const Eigen::VectorXcd>(pk.values.data(), static_cast<Eigen::Index>(pk.size()));
      ws.add_term(xi, amp);
    }
  }
  return ws;
}

CylinderField p_mu_metivier(const CylinderField& f, double mu, int K, const SphereRule& rule,
                            const MetivierStructure& st) {
  if (!(f.separable && f.h_factor && f.g_factor)) throw GridError("p_mu_metivier needs a separable input h (x) g");
  if (f.central.dim() != st.d) throw GridError("p_mu_metivier: central dimension does not match the structure");
  const SampledField& h = *f.h_factor;
  CentralSpectrum h_hat = [&](std::span<const double> xi) {
    std::vector<double> e(xi.begin(), xi.end());
    for (auto& v : e) v = -v;
    return central_fourier(h, e);
  };
  return p_mu_metivier_waves(st, mu, K, rule, h_hat, *f.g_factor).sample(f.horizontal, f.central);
}

WaveSum integrate_p_mu_metivier(const MetivierStructure& st, int K, const SphereRule& rule,
                                const CentralSpectrum& h_hat, const IsotropicGaussian& g, double rho_max,
                                int rho_nodes, std::span<const double> points) {
  const int m = 2 * st.n;
  const std::size_t np = points.size() / static_cast<std::size_t>(m);
  const auto as = normalizers(st, rule);
  const Quadrature gl = gauss_legendre(rho_nodes, 0.0, rho_max);
  WaveSum ws;
  ws.central_dim = st.d;
  ws.weights.assign(np, 1.0);
  ws.amplitudes.resize(static_cast<Eigen::Index>(np), 0);
  std::vector<double> xi(static_cast<std::size_t>(st.d));
  for (int j = 0; j < rho_nodes; ++j) {
    const double rho = gl.nodes[j];
    const double cr = std::pow(kTwoPi, -st.d) * std::pow(rho, st.n + st.d - 1) * gl.weights[j];
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const auto w = rule.node(i);
      for (int a = 0; a < st.d; ++a) xi[a] = rho * w[a];
      const cd c = cr * rule.weights[i] * h_hat(xi);
      Eigen::VectorXcd amp(static_cast<Eigen::Index>(np));
      for (std::size_t p = 0; p < np; ++p) {
        const auto pk = pi_k_projection_at(g, K, rho, as[i], points.subspan(p * m, static_cast<std::size_t>(m)));
        cd s = 0.0;
        for (const auto& v : pk) s += v;
        amp[static_cast<Eigen::Index>(p)] = c * s;
      }
      ws.add_term(xi, amp);
    }
  }
  return ws;
}

}  // namespace hlab
