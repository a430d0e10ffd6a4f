#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hlab/eigenbasis.hpp"
#include "hlab/fields.hpp"
#include "hlab/heisenberg.hpp"
#include "hlab/metivier.hpp"

namespace hlab {

enum class NormMethod { closed_form_1_to_2, exact_2_to_2, duality_iteration };
std::string to_string(NormMethod m);

struct NormEstimate {
  int k = 0;
  int n = 1;
  double p = 1.0;
  double q = 2.0;
  double value = 0.0;
  NormMethod method = NormMethod::closed_form_1_to_2;
  int iterations = 0;
  bool converged = false;
  // One entry per start of the duality iteration (empty otherwise).
  std::vector<std::string> start_names;
  std::vector<double> start_values;
  // Rayleigh quotient ||Lambda_k g||_2 / ||g||_p of the Gaussian start.
  double gaussian_start_ratio = 0.0;
};

// ||Lambda_k||_{1 -> 2} = (2 pi)^{-n} ||phi_k||_{L^2(C^n)} by Gauss-Legendre radial
// quadrature (twisted translations are unitary, so every column of the kernel has
// the same norm).
NormEstimate opnorm_1_to_2(int k, int n, int radial_nodes = 2000);

struct OpnormOptions {
  int starts = 3;
  std::uint64_t seed = 1;
  int max_iterations = 500;
  double tolerance = 1e-6;  // relative step that counts as converged
};

// Lower bound for ||Lambda_k||_{p -> 2} (n = 1, 1 <= p <= 2) on a sampled grid by the
// duality-map iteration g <- |P g|^{p' - 1} sgn(P g) from several starts (Gaussian,
// Knapp-type annulus z^k e^{-|z|^2/4}, seeded random); p = 1 moves a grid delta to
// the maximum of |P g|. warm adds one more start (e.g. the optimum at a larger p).
NormEstimate opnorm_p_to_2(const EigenspaceProjector& proj, double p, const OpnormOptions& opts = {},
                           const SampledField* warm = nullptr, SampledField* best_out = nullptr);
NormEstimate opnorm_p_to_2(int k, int n, double p, const Grid& grid, int starts, std::uint64_t seed);

// Estimates for each p (sorted in decreasing order), each run warm-started from the
// optimum of the previous one.
std::vector<NormEstimate> opnorm_p_sweep(const EigenspaceProjector& proj, std::vector<double> ps,
                                         const OpnormOptions& opts = {});

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square of the log residuals
};

// Least-squares line through (log x, log y). Throws std::invalid_argument for fewer
// than three pairs, non-positive entries or all x equal.
PowerFit fit_power_law(const std::vector<std::pair<double, double>>& pairs);
double fit_exponent(const std::vector<std::pair<double, double>>& pairs);

struct KnappOptions {
  int theta_points = 400;           // cap quadrature on [0, 8 delta] (each side for d = 2)
  double frequency_spacing = 1.0 / 256;  // resolution floor: delta >= 4 * frequency_spacing
  int radial_points = 300;     // d = 3: transverse radius; d = 2: first central axis
  int axial_points = 801;      // along the cap axis
  double radial_extent = 12;   // times 1 / delta
  double axial_extent = 40;    // times 1 / delta^2
  double scale = 1.0;          // multiplies h; the ratio is homogeneous of degree 0
};

struct KnappRow {
  double delta = 0.0;
  double ratio = 0.0;
};

struct KnappResult {
  int d = 3;
  double r = 2.0;
  std::vector<KnappRow> rows;
  double slope = 0.0;  // d log ratio / d log(1 / delta)
  bool blow_up = false;  // slope > tolerance
};

// Knapp example: h_delta with h_hat(xi) = exp(-|xi'|^2 / (2 delta^2) - (xi_d - 1)^2 / (2 delta^4))
// (a delta x delta^2 cap slab around the north pole), ratio ||R* R h||_{r'} / ||h||_r
// with R* R h(Z) = int_S h_hat(omega) e^{i omega . Z} d sigma(omega). d = 3 uses the
// zonal Bessel form, d = 2 a direct planar grid. Throws GridError when delta is
// below four frequency_spacing.
KnappResult knapp_experiment(int d, double r, const std::vector<double>& deltas, double tolerance = 0.1,
                             const KnappOptions& opts = {});

// Horizontal factor of the test input: the unit-mass delta (p = 1 extreme point) or a
// centred Gaussian exp(-b mu |V|^2); the central factor is the unit impulse (h_hat = 1).
enum class HorizontalProfile { delta, gaussian };

struct RestrictionOptions {
  HorizontalProfile profile = HorizontalProfile::delta;
  double gaussian_b = 0.5;
  int K = 256;
  int radial_nodes = 400;
  double radial_extent = 12.0;   // times mu^{-1/2} when dilated
  double central_window = 64.0;  // [0, T] for d = 1, [-T, T]^d otherwise; times 1 / mu when dilated
  double central_step = 0.1;
  int central_points = 33;       // per axis for d >= 2
  int sphere_points = 64;        // circle rule for d = 2
  // Dilate the grids with mu (homogeneous operators). The full Laplacian uses fixed grids.
  bool dilate = true;
  MultiplierKind multiplier = MultiplierKind::sublaplacian;  // d = 1 only
  // Fractional weights (2k+n)^{alpha - (n+1)} mu^{n - alpha} (d = 1, sublaplacian);
  // alpha = 0 is the plain projector.
  double alpha = 0.0;
};

struct RestrictionRow {
  double mu = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
};

struct RestrictionReport {
  std::string structure;
  int d = 1;
  int n = 1;
  ExponentSpec exps;
  std::vector<RestrictionRow> rows;
  double measured_slope = 0.0;
  double predicted_slope = 0.0;  // d (2/r - 1) + n (1/p - 1/q) - 1
  double conditional_exponent = 0.0;  // d (1/r - 1/r') + n (1/p - 1/q) - 1
  double series_partial_sum = 0.0;    // S_0 up to K
  bool series_converges = false;
  bool out_of_range = false;
};

// Throws RangeError unless 1 <= r <= p_*(d) and 1 <= p <= 2 <= q (or probe is set).
void check_restriction_range(int d, const ExponentSpec& exps, bool probe);

// Single ratio ||P_mu f||_{L^{r'}(z) L^q(v)} / ||f||_{L^r(z) L^p(v)} for r = 1; the
// central sup is taken over sampled points.
RestrictionRow restriction_ratio(const MetivierStructure& st, const ExponentSpec& exps, double mu,
                                 const RestrictionOptions& opts);

// Ratios over mus, fitted slope and predicted exponents. Only r = 1 is measured (the
// impulse central profile); other r in range are rejected with std::invalid_argument.
RestrictionReport restriction_experiment(const MetivierStructure& st, const ExponentSpec& exps,
                                         const std::vector<double>& mus, const RestrictionOptions& opts = {},
                                         bool probe = false);

}  // namespace hlab
