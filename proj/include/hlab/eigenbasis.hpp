#pragma once

#include <Eigen/Dense>

#include "hlab/fields.hpp"

namespace hlab {

// Orthogonal projector onto the sampled k-th eigenspace of Delta^(1) on an n = 1
// grid. The space is spanned by the polar Laguerre functions
//   e^{i m theta} r^{|m|} L_j^{|m|}(r^2 / 2) e^{-r^2 / 4},  k = j + max(m, 0),
// with m <= k; negative m is included while the function stays inside the grid
// (sampled energy outside 90% of the half extent below tail_tol). The sampled
// columns are orthonormalised, so apply() is an exact projector on the grid.
class EigenspaceProjector {
 public:
  EigenspaceProjector(const Grid& grid, int k, double tail_tol = 1e-12);

  SampledField apply(const SampledField& g) const;
  int rank() const { return static_cast<int>(q_.cols()); }
  int k() const { return k_; }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  int k_;
  Eigen::MatrixXcd q_;  // orthonormal in the plain Euclidean inner product
};

}  // namespace hlab
