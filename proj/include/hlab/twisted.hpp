#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "hlab/fields.hpp"

namespace hlab {

// Twist parameter lambda acting on C^n; lambda = 0 selects plain convolution.
struct TwistParameter {
  double lambda = 1.0;
  int n = 1;
};

// (h x_lambda g)(z) = int h(z - w) g(w) e^{(i/2) lambda Im(z . conj w)} dw by the
// direct double sum over grid nodes (n = 1 grids). Throws GridError unless h and g
// share a two-dimensional grid.
SampledField twisted_convolve(const SampledField& h, const SampledField& g, double lambda);

// g x_lambda K for a radial kernel K(z) = kernel(|z|^2), evaluated exactly on the
// lattice of node differences (no truncation at the grid edge).
SampledField twisted_convolve_radial(const SampledField& g, const std::function<double(double)>& kernel,
                                     double lambda);

// Same at the output nodes (x_{a + ox}, y_{b + oy}), i.e. the grid moved by (ox, oy)
// steps; values in the grid's linear order. Used where an exact reflection of the
// grid (node i -> node N - i) is needed.
std::vector<cd> twisted_convolve_radial_shifted(const SampledField& g, const std::function<double(double)>& kernel,
                                                double lambda, int ox, int oy);

// Lambda_k^lambda g = (2 pi)^{-n} g x_lambda phi_k^{|lambda|} for n = 1.
SampledField lambda_projection(const SampledField& g, int k, double lambda);

// sum_k weights[k] Lambda_k^lambda g using one convolution with the summed kernel.
SampledField lambda_projection_sum(const SampledField& g, std::span<const double> weights, double lambda);

// Lambda_0^lambda g(z), ..., Lambda_kmax^lambda g(z) at an arbitrary point z (n = 1),
// by the same node sum as lambda_projection.
std::vector<cd> lambda_projection_at(const SampledField& g, int kmax, double lambda, std::span<const double> z);

// Closed form of Lambda_k^lambda applied to exp(-b |z|^2) on C^n, at squared radius r2.
double gaussian_lambda_projection(double b, int k, int n, double lambda, double r2);

// Sum of tensor products f1(x1, y1) f2(x2, y2) of n = 1 fields, for n = 2 inputs.
struct SeparableSum {
  std::vector<std::pair<SampledField, SampledField>> terms;

  // Samples on a four-dimensional grid with axes (x1, x2, y1, y2); the factor
  // grids must be the restrictions to the complex pairs (x1, y1) and (x2, y2).
  SampledField expand(const Grid& grid4) const;
};

// Lambda_k^lambda (g1 (x) g2) on C^2 through sum_{k1 + k2 = k} Lambda_k1 g1 (x) Lambda_k2 g2.
SeparableSum lambda_projection_separable(const SampledField& g1, const SampledField& g2, int k, double lambda);

// Delta^(lambda) g = -sum (d_xj^2 + d_yj^2) + i lambda sum (y_j d_xj - x_j d_yj)
//                    + (lambda^2 / 4) |z|^2
// on a 2n-dimensional grid with axes (x_1..x_n, y_1..y_n), by fourth-order centred
// differences with zero extension. The outer band of two nodes is not reliable.
SampledField twisted_laplacian_apply(const SampledField& g, double lambda);

struct PlancherelReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;  // |lhs - rhs| / lhs (0 when both vanish)
};

// ||f||_2^2 against (2 pi)^{-(2n+1)} sum_{k <= K} int ||f^(l) x_l phi_k^{|l|}||^2 |l|^{2n} dl,
// with the l-integral taken as a midpoint sum over the cells of lambda_grid (d = 1).
// Each squared norm is evaluated as <Lambda_k f^(l), f^(l)>, which is exact for the
// orthogonal projection and needs no output outside the sampling grid.
PlancherelReport plancherel_check(const CylinderField& f, int K, const Grid& lambda_grid);

}  // namespace hlab
