#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hlab/fields.hpp"
#include "hlab/heisenberg.hpp"
#include "hlab/metivier.hpp"
#include "hlab/norms.hpp"

namespace hlab {

// Fixed-format number for tables and reports (%.12g; "inf" for infinities).
std::string format_number(double v);

// Plot-ready result table. Cells are formatted on insertion so output is stable.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
  void write_csv(std::ostream& os) const;
};

// One tolerance check: pass iff value <= bound.
struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
};

Check make_check(std::string name, double value, double bound, std::string detail = {});

struct ExperimentResult {
  std::string kind;
  Table table;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> metrics;

  bool passed() const;
  // Appends other's checks and metrics; other's table rows are prefixed by its kind
  // when the column sets differ.
  void merge(const ExperimentResult& other);
};

// ---- projection algebra on the plane --------------------------------------------

struct AlgebraConfig {
  int points = 128;
  double half_extent = 12.0;
  int kmax = 8;
  int samples = 20;
  std::uint64_t seed = 1;
  double idempotence_tol = 1e-4;   // times ||g||_2
  double orthogonality_tol = 1e-4; // times ||g||_2
  double adjoint_tol = 1e-6;       // relative to ||g|| ||h||
  double runtime_budget = 120.0;   // seconds
};

// Sum of three seeded Gaussian bumps with random centres, widths and modulations.
SampledField random_gaussian_envelope(const Grid& grid, std::uint64_t seed);

// Idempotence, cross-orthogonality and self-adjointness of Lambda_k^1 (k, j <= kmax).
ExperimentResult check_projection_algebra(const AlgebraConfig& cfg);

// ---- eigen-relations --------------------------------------------------------------

struct EigenConfig {
  int points = 128;
  double half_extent = 12.0;
  int kmax = 6;
  std::uint64_t seed = 1;
  double twisted_tol = 1e-2;
  // Heisenberg group (n = 1): P_mu f on a horizontal x central grid.
  double mu = 3.0;
  int K = 20;
  int central_points = 32;
  double central_half_extent = 2.0;
  double group_tol = 1e-2;
  // Complex Heisenberg: pointwise stencils at seeded interior points.
  double metivier_mu = 4.0;
  int metivier_K = 12;
  int metivier_points = 24;
  double metivier_step = 0.02;
  double metivier_tol = 2e-2;
};

// -L = sum (X^2 + Y^2) with X = d_x - (y/2) d_t, Y = d_y + (x/2) d_t by fourth-order
// centred differences (zero extension; the outer two nodes per axis are unreliable).
CylinderField heisenberg_sublaplacian_fd(const CylinderField& f);

// L u at (v, z) for u given pointwise, with V_j = d_{v_j} - (1/2) sum_a (J^a v)_j d_{z_a}
// by fourth-order centred differences of step h in every variable.
cd metivier_sublaplacian_fd(const MetivierStructure& st, const std::function<cd(std::span<const double>, std::span<const double>)>& u,
                            std::span<const double> v, std::span<const double> z, double h);

ExperimentResult check_eigenrelations(const EigenConfig& cfg);

// ---- reconstruction and Plancherel --------------------------------------------------

struct ReconstructionConfig {
  // Heisenberg: Gaussian (x) Gaussian on 64^2 x 64 grids.
  int horizontal_points = 64;
  double horizontal_half_extent = 8.0;
  int central_points = 64;
  double central_half_extent = 8.0;
  int K = 60;
  double lambda_max = 10.0;
  int lambda_nodes = 200;
  // Complex Heisenberg: closed-form Gaussian data at seeded points.
  int metivier_K = 40;
  double rho_max = 6.0;
  int rho_nodes = 24;
  int sphere_points = 16;
  int metivier_points = 12;
  int central_samples = 5;
  std::uint64_t seed = 1;
  double tol = 5e-2;
  // Plancherel.
  int plancherel_K = 40;
  int plancherel_lambda_nodes = 64;
  double plancherel_lambda_max = 8.0;
  double plancherel_tol = 1e-2;
};

ExperimentResult check_reconstruction(const ReconstructionConfig& cfg);
ExperimentResult check_plancherel(const ReconstructionConfig& cfg);

// ---- symplectic layer and d = 1 equivalence ----------------------------------------

struct SymplecticConfig {
  int matrices = 1000;
  int max_n = 3;
  std::uint64_t seed = 1;
  double residual_tol = 1e-10;
  double max_condition_inverse = 1e-3;  // skip B with sigma_min < this * sigma_max
  int kmax = 4;
  int points = 16;
  double independence_tol = 1e-4;
};

ExperimentResult check_symplectic(const SymplecticConfig& cfg);

struct EquivalenceConfig {
  int points = 64;
  double half_extent = 12.0;
  int central_points = 64;
  double central_half_extent = 16.0;
  double mu = 3.0;
  int K = 6;
  double tol = 1e-8;
};

ExperimentResult check_d1_equivalence(const EquivalenceConfig& cfg);

// ---- slope experiments ---------------------------------------------------------------

struct SlopeConfig {
  std::vector<double> mus = {1, 2, 4, 8, 16};
  // (p, q) pairs; p = 1 uses the delta input, otherwise a centred Gaussian.
  std::vector<std::pair<double, double>> pairs = {{1, 2}, {1, kInf}, {2, kInf}};
  RestrictionOptions options;
  double tol = 0.15;
};

// ||P_mu f||_{L^inf_t L^q_z} / ||f||_{L^1_t L^p_z} against mu^{n (1/p - 1/q)}.
ExperimentResult run_heisenberg_slopes(const SlopeConfig& cfg);

// Full Laplacian at (p, q) = (1, 2) against n (1/p - 1/2) - 1/4 on fixed grids.
SlopeConfig full_laplacian_defaults();
ExperimentResult run_full_laplacian_slopes(const SlopeConfig& cfg);

// Fractional weights: L^inf_t L^q_z against mu^{n (1/p - 1/q) - alpha}.
struct FractionalConfig {
  std::vector<double> mus = {1, 2, 4, 8};
  double alpha = 0.5;
  double p = 1.0;
  double q = 2.0;
  RestrictionOptions options;
  double tol = 0.1;
};
ExperimentResult run_fractional(const FractionalConfig& cfg);

struct MetivierRestrictionCase {
  std::string structure = "heisenberg_1";
  ExponentSpec exps;
  std::vector<double> mus = {1, 2, 4, 8, 16};
  RestrictionOptions options;
};

struct MetivierRestrictionConfig {
  std::vector<MetivierRestrictionCase> cases;
  bool probe_out_of_range = false;
  double tol = 0.2;
  // Default cases: Heisenberg (r, p, q) = (1, 1, 2) and complex Heisenberg (1, 2, 2).
  static MetivierRestrictionConfig defaults();
};

// Structure lookup: built-in name or a JSON structure file path.
MetivierStructure resolve_structure(const std::string& name_or_path);

// Throws RangeError (before any work) when a case is outside 1 <= r <= p_*(d) and
// probe_out_of_range is off.
ExperimentResult run_metivier_restriction(const MetivierRestrictionConfig& cfg);

struct OpnormConfig {
  int points = 128;
  double half_extent = 12.0;
  std::vector<int> ks = {1, 2, 4, 8, 16};
  std::vector<double> ps = {1.0, 1.2, 1.5, 2.0};
  int starts = 3;
  std::uint64_t seed = 1;
  double tol = 0.15;
  // Closed form at n = 2.
  std::vector<int> closed_ks = {0, 1, 2, 4, 8, 16, 32};
  double closed_tol = 0.05;
};

ExperimentResult run_opnorm_gamma(const OpnormConfig& cfg);

struct KnappConfig {
  int d = 3;
  std::vector<double> deltas = {0.4, 0.2, 0.1, 0.05};
  double r_blowup = 2.0;
  double r_critical = 4.0 / 3.0;
  double tol = 0.1;
  KnappOptions options;
};

// Ratios for an exponent above p_*(d) (strict increase as delta shrinks) and at the
// critical exponent (slope in 1/delta within tol of 0).
ExperimentResult run_knapp(const KnappConfig& cfg);

struct SeriesConfig {
  int samples = 50;
  std::uint64_t seed = 1;
  int n = 1;
  double margin = 0.05;  // points closer than this to the alpha threshold are not scored
  int levels = 20;
};

// Critical alpha of the convergence lemma: S_alpha converges iff alpha < threshold.
double series_threshold(double p, double q, int n);

ExperimentResult run_series_table(const SeriesConfig& cfg);

}  // namespace hlab
