#include "silas/pod.hpp"

#include <stdexcept>

namespace silas {

namespace {
Vec trapezoid_weights(const Vec& grid) {
  const int n = static_cast<int>(grid.size());
  if (n < 2) throw std::invalid_argument("pod: need at least two grid points");
  Vec w = Vec::Zero(n);
  for (int i = 0; i + 1 < n; ++i) {
    const double h = grid(i + 1) - grid(i);
    if (h <= 0) throw std::invalid_argument("pod: grid must be increasing");
    w(i) += 0.5 * h;
    w(i + 1) += 0.5 * h;
  }
  return w;
}
}  // namespace

PodResult pod_project(const SnapshotMatrix& snaps, int n_modes) {
  const int ng = snaps.grid_size();
  const int m = snaps.count();
  if (snaps.r.rows() != ng || snaps.s.rows() != ng || snaps.r.cols() != m ||
      snaps.s.cols() != m)
    throw std::invalid_argument("pod: inconsistent snapshot shapes");
  PodResult out;
  out.quad_weights = trapezoid_weights(snaps.grid);
  out.r_mean = snaps.r.rowwise().mean();
  out.s_mean = snaps.s.rowwise().mean();

  Mat fluct(2 * ng, m);
  fluct.topRows(ng) = snaps.r.colwise() - out.r_mean;
  fluct.bottomRows(ng) = snaps.s.colwise() - out.s_mean;

  Vec sqw(2 * ng);
  sqw.head(ng) = out.quad_weights.cwiseSqrt();
  sqw.tail(ng) = out.quad_weights.cwiseSqrt();
  const Mat weighted = sqw.asDiagonal() * fluct;

  Eigen::BDCSVD<Mat> svd(weighted, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * sv(0)) ++rank;
  if (n_modes < 1 || n_modes > rank)
    throw std::invalid_argument("pod: n_modes exceeds the snapshot rank");

  out.singular_values = sv;
  const Mat u = svd.matrixU().leftCols(n_modes);
  const Mat modes = sqw.cwiseInverse().asDiagonal() * u;
  out.modes_r = modes.topRows(ng);
  out.modes_s = modes.bottomRows(ng);
  out.coefficients = svd.matrixV().leftCols(n_modes) *
                     sv.head(n_modes).asDiagonal();
  const double total = sv.squaredNorm();
  out.energy_fraction = sv.head(n_modes).array().square() / total;
  return out;
}

std::pair<Mat, Mat> pod_reconstruct(const PodResult& pod, int k) {
  if (k < 1 || k > pod.modes_r.cols())
    throw std::invalid_argument("pod_reconstruct: bad mode count");
  const Mat cr = pod.modes_r.leftCols(k) * pod.coefficients.leftCols(k).transpose();
  const Mat cs = pod.modes_s.leftCols(k) * pod.coefficients.leftCols(k).transpose();
  return {cr.colwise() + pod.r_mean, cs.colwise() + pod.s_mean};
}

}  // namespace silas
