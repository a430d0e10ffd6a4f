#include "hlab/eigenbasis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hlab/special_fn.hpp"

namespace hlab {

namespace {

// Samples e^{i m theta} r^{|m|} L_j^{|m|}(r^2/2) e^{-r^2/4}; returns the fraction of
// the sampled energy lying outside the box of 90% half extent.
double sample_polar(const Grid& grid, int m, int j, Eigen::Ref<Eigen::VectorXcd> col) {
  const int am = std::abs(m);
  double inside = 0.0;
  double outside = 0.0;
  double z[2];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.coords(i, z);
    const double r2 = z[0] * z[0] + z[1] * z[1];
    double radial = laguerre_poly(j, am, 0.5 * r2);
    if (am > 0) {
      radial = r2 > 0.0 ? radial * std::exp(0.5 * am * std::log(r2) - 0.25 * r2) : 0.0;
    } else {
      radial *= std::exp(-0.25 * r2);
    }
    const double th = std::atan2(z[1], z[0]);
    col[static_cast<Eigen::Index>(i)] = std::polar(radial, m * th);
    const double e = radial * radial;
    const bool in = std::abs(z[0]) <= 0.9 * grid.half_extent[0] && std::abs(z[1]) <= 0.9 * grid.half_extent[1];
    (in ? inside : outside) += e;
  }
  const double total = inside + outside;
  return total > 0.0 ? outside / total : 1.0;
}

}  // namespace

EigenspaceProjector::EigenspaceProjector(const Grid& grid, int k, double tail_tol) : grid_(grid), k_(k) {
  if (grid.dim() != 2) throw GridError("EigenspaceProjector needs an n = 1 grid");
  if (k < 0) throw std::invalid_argument("EigenspaceProjector: k must be >= 0");
  const auto rows = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::VectorXcd> cols;
  Eigen::VectorXcd col(rows);
  for (int m = k; m >= 0; --m) {
    sample_polar(grid, m, k - m, col);
    cols.push_back(col);
  }
  for (int m = -1;; --m) {
    const double tail = sample_polar(grid, m, k, col);
    if (tail > tail_tol) break;
    cols.push_back(col);
  }
  Eigen::MatrixXcd a(rows, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) a.col(static_cast<Eigen::Index>(c)) = cols[c];
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  q_ = qr.householderQ() * Eigen::MatrixXcd::Identity(rows, a.cols());
}

SampledField EigenspaceProjector::apply(const SampledField& g) const {
  if (!(g.grid == grid_)) throw GridError("EigenspaceProjector::apply: grid mismatch");
  Eigen::Map<const Eigen::VectorXcd> v(g.values.data(), static_cast<Eigen::Index>(g.size()));
  Eigen::VectorXcd c = q_.adjoint() * v;
  Eigen::VectorXcd r = q_ * c;
  return SampledField(grid_, std::vector<cd>(r.data(), r.data() + r.size()));
}

}  // namespace hlab
