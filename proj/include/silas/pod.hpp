#pragma once

#include "silas/basis.hpp"

namespace silas {

/// Two stacked PDE fields sampled on a shared spatial grid, one column per
/// snapshot time.
struct SnapshotMatrix {
  Vec grid;   // spatial coordinates, strictly increasing
  Vec times;  // snapshot times
  Mat r;      // grid.size() x times.size()
  Mat s;      // grid.size() x times.size()

  int grid_size() const { return static_cast<int>(grid.size()); }
  int count() const { return static_cast<int>(times.size()); }
};

struct PodResult {
  Vec r_mean, s_mean;
  Mat modes_r, modes_s;   // grid x n_modes, orthonormal in the weighted inner product
  Mat coefficients;       // count x n_modes, x_i(t_j)
  Vec energy_fraction;    // n_modes entries
  Vec singular_values;    // all singular values of the weighted fluctuation matrix
  Vec quad_weights;       // trapezoidal weights on the grid
};

/// Proper orthogonal decomposition of the mean-subtracted stacked (r; s)
/// snapshots under trapezoidal quadrature weighting.
PodResult pod_project(const SnapshotMatrix& snaps, int n_modes);

/// Reconstruction mean + modes * coefficients' for the first k modes.
std::pair<Mat, Mat> pod_reconstruct(const PodResult& pod, int k);

}  // namespace silas
