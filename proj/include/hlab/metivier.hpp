#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlab/fields.hpp"
#include "hlab/heisenberg.hpp"

namespace hlab {

class StructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NearSingularError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Two-step structure on R^{2n} x R^d: J[a](j, k) = <Z_a, [V_j, V_k]>.
struct MetivierStructure {
  std::string name;
  int d = 1;
  int n = 1;
  std::vector<Eigen::MatrixXd> J;

  // B_omega = sum_a omega_a J^a.
  Eigen::MatrixXd b_omega(std::span<const double> omega) const;

  static MetivierStructure heisenberg_1();
  // J^1, J^2: real and imaginary parts of the complex symplectic form on C^2,
  // with complex pairs (v_j, v_{n+j}).
  static MetivierStructure complex_heisenberg();
  // Left multiplication by i, j, k on the quaternions H = R^4.
  static MetivierStructure quaternionic_h_type();

  // JSON text {"d": .., "n": .., "J": [[row-major 2n x 2n], ...]}; validates
  // skew-symmetry and non-degeneracy at 1000 sampled omega. Throws StructureError.
  static MetivierStructure from_json(const std::string& text, const std::string& name = "custom");
};

std::vector<std::string> builtin_structure_names();
// Throws StructureError for unknown names.
MetivierStructure builtin_structure(const std::string& name);

// Quadrature on the unit sphere S of R^d.
struct SphereRule {
  int d = 1;
  std::vector<double> nodes;  // d entries per node
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const { return {nodes.data() + i * d, static_cast<std::size_t>(d)}; }

  static SphereRule two_point();
  static SphereRule circle(int m = 64);
  // Gauss-Legendre in cos(theta) times uniform azimuth.
  static SphereRule sphere(int n_polar = 16, int n_azimuth = 32);
  // Polar cap theta <= theta_max around the north pole of S^2.
  static SphereRule cap(double theta_max, int n_polar, int n_azimuth);
  // Default rule for a centre dimension: two-point, 64-point circle or 16 x 32.
  static SphereRule for_dimension(int d);
};

struct MetivierCheck {
  bool ok = false;
  double min_abs_det = 0.0;
  // K with 1/K <= |det A_omega| <= K over the rule nodes.
  double k_constant = 0.0;
};

// min over the rule nodes of |det B_omega| against eps.
MetivierCheck check_metivier(const MetivierStructure& st, const SphereRule& rule, double eps = 1e-10);

// A with A^T B A = [[0, I], [-I, 0]] from the real normal form of the skew matrix B:
// pairs (q, -B q / beta) of B^T B eigenvectors, beta descending, columns scaled by
// beta^{-1/2}. Throws NearSingularError if min beta < 1e-12.
Eigen::MatrixXd symplectic_normalizer(const Eigen::MatrixXd& B);

// amplitude * exp(-b |V - center|^2) on R^{2n}.
struct IsotropicGaussian {
  double b = 0.5;
  std::vector<double> center;
  cd amplitude = 1.0;

  cd operator()(std::span<const double> v) const;
  bool centred() const;
};

// Pi_k^{rho omega} g = Lambda_k^rho(g o A) o A^{-1} for a sampled n = 1 input. Signed
// permutation normalizers are applied by exact re-indexing (zero extension),
// others by bilinear interpolation.
SampledField pi_k_projection(const SampledField& g, int k, double rho, std::span<const double> omega,
                             const MetivierStructure& st);
SampledField pi_k_projection(const SampledField& g, int k, double rho, const Eigen::MatrixXd& A);

// Pi_0 g(V), ..., Pi_kmax g(V) for a closed-form input and an orthogonal normalizer A.
// Centred inputs use the closed form; shifted ones factor over the complex pairs,
// each pair evaluated by quadrature.
std::vector<cd> pi_k_projection_at(const IsotropicGaussian& g, int kmax, double rho, const Eigen::MatrixXd& A,
                                   std::span<const double> v);

// Lambda_0^rho, ..., Lambda_kmax^rho of exp(-b |u - c|^2) on C = R^2 at w, by a
// uniform quadrature centred at c.
std::vector<cd> shifted_gaussian_projection_at(double b, std::span<const double> c, double rho, int kmax,
                                               std::span<const double> w);

// R_omega f(V, t) = int_{omega^perp} f(V, t omega + Z') dZ' for d in {2, 3}, with f
// interpolated by eighth-order Lagrange stencils on the central grid.
CylinderField radon_transform(const CylinderField& f, std::span<const double> omega, const Grid& t_grid);

// sum_i w_i h_hat(omega_i) e^{-i omega_i . Z}.
cd sphere_extension(std::span<const cd> h_hat, std::span<const double> z, const SphereRule& rule);

// h_hat(xi) = int e^{-i xi . Z} h(Z) dZ.
using CentralSpectrum = std::function<cd(std::span<const double>)>;

// P_mu f for f = h (x) g as a wave sum over horizontal points:
//   (2 pi)^{-d} mu^{n+d-1} sum_k (2k+n)^{-n-d} sum_i w_i h_hat(mu_k omega_i)
//     Pi_k^{mu_k omega_i} g(V) e^{i mu_k omega_i . Z},   mu_k = mu / (2k+n).
// points is flattened (2n entries per point); weights are the horizontal quadrature weights.
WaveSum p_mu_metivier_waves(const MetivierStructure& st, double mu, int K, const SphereRule& rule,
                            const CentralSpectrum& h_hat, const IsotropicGaussian& g, std::span<const double> points,
                            std::span<const double> weights);
// Sampled n = 1 input; points are the grid nodes.
WaveSum p_mu_metivier_waves(const MetivierStructure& st, double mu, int K, const SphereRule& rule,
                            const CentralSpectrum& h_hat, const SampledField& g);
// Separable sampled f = h (x) g with n = 1; h_hat from the central grid.
CylinderField p_mu_metivier(const CylinderField& f, double mu, int K, const SphereRule& rule,
                            const MetivierStructure& st);

// int_0^rho_max of the same sum in polar form (mu = (2k+n) rho), Gauss-Legendre in rho:
//   (2 pi)^{-d} sum_k int rho^{n+d-1} sum_i w_i h_hat(rho omega_i) Pi_k^{rho omega_i} g e^{i rho omega_i . Z} drho.
WaveSum integrate_p_mu_metivier(const MetivierStructure& st, int K, const SphereRule& rule,
                                const CentralSpectrum& h_hat, const IsotropicGaussian& g, double rho_max,
                                int rho_nodes, std::span<const double> points);

}  // namespace hlab
