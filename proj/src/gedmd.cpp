#include "silas/gedmd.hpp"

#include <cmath>
#include <stdexcept>

namespace silas {

namespace {
void check_finite(const Mat& m, const char* what) {
  if (!m.allFinite())
    throw std::invalid_argument(std::string("Dataset: non-finite ") + what);
}
}  // namespace

Dataset::Dataset(Mat x_in, Mat y_in, Vec w_in)
    : x(std::move(x_in)), y(std::move(y_in)), w(std::move(w_in)) {
  if (x.rows() == 0) throw std::invalid_argument("Dataset: empty");
  if (y.rows() != x.rows() || y.cols() != x.cols())
    throw std::invalid_argument("Dataset: x/y shape mismatch");
  if (w.size() != x.rows())
    throw std::invalid_argument("Dataset: weight length mismatch");
  check_finite(x, "state");
  check_finite(y, "rate");
  if (!w.allFinite() || w.minCoeff() <= 0.0)
    throw std::invalid_argument("Dataset: weights must be positive and finite");
}

Dataset::Dataset(Mat x_in, Mat y_in) {
  const long m = std::max<long>(x_in.rows(), 1);
  *this = Dataset(std::move(x_in), std::move(y_in),
                  Vec::Constant(m, 1.0 / static_cast<double>(m)));
}

RegressionMatrices build_regression(const Dataset& d, const PolyBasis& phi,
                                    const PolyBasis& theta) {
  if (phi.n() != d.dim() || theta.n() != d.dim())
    throw std::invalid_argument("build_regression: dimension mismatch");
  if (!phi.same_family(theta))
    throw std::invalid_argument("build_regression: phi/theta families differ");
  const int m = d.size();
  RegressionMatrices r;
  r.a.resize(phi.size(), m);
  r.b.resize(theta.size(), m);
  r.w = d.w;
  for (int i = 0; i < m; ++i) {
    const Vec xi = d.x.row(i).transpose();
    r.a.col(i) = phi.jacobian_all(xi) * d.y.row(i).transpose();
    r.b.col(i) = theta.eval_all(xi);
  }
  return r;
}

GeneratorMatrix fit_generator(const Dataset& d, const PolyBasis& phi,
                              const PolyBasis& theta, double pinv_tol) {
  const RegressionMatrices r = build_regression(d, phi, theta);
  const Mat bw = r.b * r.w.asDiagonal();
  const Mat bwb = bw * r.b.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(bwb);
  const Vec ev = es.eigenvalues();
  const double cut = pinv_tol * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  Vec inv = Vec::Zero(ev.size());
  int rank = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) {
      inv(i) = 1.0 / ev(i);
      ++rank;
    }
  const Mat pinv =
      es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  GeneratorMatrix g;
  g.g = (r.a * r.w.asDiagonal() * r.b.transpose()) * pinv;
  g.phi_basis = phi;
  g.theta_basis = theta;
  g.rank_used = rank;
  g.pinv_tol = pinv_tol;
  return g;
}

Poly generator_apply(const GeneratorMatrix& g, const Vec& u) {
  if (u.size() != g.g.rows())
    throw std::invalid_argument("generator_apply: u length != p");
  return Poly(g.theta_basis, g.g.transpose() * u);
}

}  // namespace silas
