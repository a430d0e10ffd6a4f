#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace hlab {

class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Envelope of hermite_eval: |t| <= 40, i <= 200.
inline constexpr double kHermiteMaxAbsT = 40.0;
inline constexpr int kHermiteMaxOrder = 200;

// L^2(R)-normalized Hermite function h_i(t), by the three-term recurrence on the
// normalized functions themselves. Throws RangeError outside the envelope.
double hermite_eval(int i, double t);

// h_0(t), ..., h_imax(t).
std::vector<double> hermite_eval_upto(int imax, double t);

// Generalized Laguerre polynomial L_k^a(x) by the three-term recurrence in k.
double laguerre_poly(int k, int a, double x);

// L_0^a(x), ..., L_kmax^a(x) written to out[0..kmax].
void laguerre_poly_upto(int kmax, int a, double x, double* out);

// phi_k^lambda(z) = L_k^{n-1}(lambda |z|^2 / 2) exp(-lambda |z|^2 / 4), z in R^{2n}.
double laguerre_phi(int k, int n, std::span<const double> z, double lambda);

// Same as laguerre_phi with r2 = |z|^2.
double laguerre_phi_r2(int k, int n, double r2, double lambda);

// phi_0^lambda, ..., phi_kmax^lambda at squared radius r2, written to out[0..kmax].
void laguerre_phi_upto(int kmax, int n, double r2, double lambda, double* out);

double binomial(int n, int k);

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with m nodes on [a, b].
Quadrature gauss_legendre(int m, double a = -1.0, double b = 1.0);

// Gauss-Hermite rule with m nodes in function form: weights already carry the
// factor e^{t^2}, so that int f(t) dt ~ sum_i w_i f(t_i) for Gaussian-decaying f.
Quadrature gauss_hermite(int m);

}  // namespace hlab
