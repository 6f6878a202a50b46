#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "silas/gedmd.hpp"
#include "test_util.hpp"

using namespace silas;

namespace {

Dataset exact_dataset(const VectorField& f, const Mat& points) {
  Mat y(points.rows(), points.cols());
  for (int i = 0; i < points.rows(); ++i)
    y.row(i) = f.eval(points.row(i).transpose()).transpose();
  return Dataset(points, y);
}

Mat random_points(int m, int n, std::mt19937_64& rng, double radius = 1.5) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Mat p(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) p(i, j) = u(rng);
  return p;
}

}  // namespace

TEST_CASE("regression matrices match the displayed formulas") {
  PolyBasis phi = PolyBasis::monomial(1, 1);
  PolyBasis theta = PolyBasis::monomial(1, 2);
  Mat x(1, 1), y(1, 1);
  x << 2.0;
  y << 3.0;
  auto r = build_regression(Dataset(x, y), phi, theta);
  CHECK(r.a(0, 0) == 0.0);  // grad of the constant
  CHECK(r.a(1, 0) == doctest::Approx(3.0));
  CHECK(r.b(0, 0) == doctest::Approx(1.0));
  CHECK(r.b(1, 0) == doctest::Approx(2.0));
  CHECK(r.b(2, 0) == doctest::Approx(4.0));
}

TEST_CASE("zero rates give a zero generator") {
  std::mt19937_64 rng(1);
  Mat x = random_points(10, 2, rng);
  Dataset d(x, Mat::Zero(10, 2));
  auto g = fit_generator(d, PolyBasis::monomial(2, 2), PolyBasis::monomial(2, 3));
  CHECK(g.g.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("1d linear field recovered exactly") {
  // f(x) = -x, phi = (1, x, x^2): the row for x^2 must be -2 x^2.
  PolyBasis fb = PolyBasis::monomial(1, 1);
  Mat fc(1, 2);
  fc << 0.0, -1.0;
  VectorField f(fb, fc);
  Mat pts(4, 1);
  pts << -1.0, 0.0, 1.0, 2.0;
  auto g = fit_generator(exact_dataset(f, pts), PolyBasis::monomial(1, 2),
                         PolyBasis::monomial(1, 2));
  CHECK(g.g(2, 2) == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(std::abs(g.g(2, 0)) <= 1e-10);
  CHECK(std::abs(g.g(2, 1)) <= 1e-10);
  // generator_apply on u = e_2 reproduces the symbolic Lie derivative.
  Vec u = Vec::Zero(3);
  u(2) = 1.0;
  Poly got = generator_apply(g, u);
  Poly want = lie_derivative(f, Poly::basis_function(PolyBasis::monomial(1, 2), 2));
  CHECK((got.coeffs() - change_basis(want, got.basis()).coeffs())
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
}

TEST_CASE("exactness on random polynomial fields against the symbolic oracle") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss;
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const int df = 1 + static_cast<int>(rng() % 3);
    const int dv = 2;
    PolyBasis fb = PolyBasis::monomial(n, df);
    Mat fc(n, fb.size());
    for (int i = 0; i < fc.rows(); ++i)
      for (int j = 0; j < fc.cols(); ++j) fc(i, j) = gauss(rng);
    VectorField f(fb, fc);
    PolyBasis phi = PolyBasis::monomial(n, dv);
    PolyBasis theta = PolyBasis::monomial(n, dv + df - 1);
    const int m = 2 * theta.size() + 5;
    auto g = fit_generator(exact_dataset(f, random_points(m, n, rng)), phi, theta);
    CHECK(g.rank_used == theta.size());
    for (int t = 0; t < 10; ++t) {
      Vec u(phi.size());
      for (int i = 0; i < u.size(); ++i) u(i) = gauss(rng);
      const Poly got = generator_apply(g, u);
      const Poly want =
          change_basis(lie_derivative(f, Poly(phi, u)), g.theta_basis);
      const double rel = (got.coeffs() - want.coeffs()).cwiseAbs().maxCoeff() /
                         (1.0 + want.max_abs_coeff());
      CHECK(rel <= 1e-8);
    }
  }
}

TEST_CASE("weight scaling leaves G unchanged") {
  std::mt19937_64 rng(7);
  PolyBasis fb = PolyBasis::monomial(2, 2);
  VectorField f(fb, Mat::Random(2, fb.size()));
  Mat pts = random_points(30, 2, rng);
  Dataset d = exact_dataset(f, pts);
  Dataset d5(d.x, d.y, d.w * 5.0);
  auto g1 = fit_generator(d, PolyBasis::monomial(2, 2), PolyBasis::monomial(2, 3));
  auto g2 = fit_generator(d5, PolyBasis::monomial(2, 2), PolyBasis::monomial(2, 3));
  const double rel = (g1.g - g2.g).cwiseAbs().maxCoeff() /
                     (1.0 + g1.g.cwiseAbs().maxCoeff());
  CHECK(rel <= 1e-10);
}

TEST_CASE("sample order does not matter") {
  std::mt19937_64 rng(8);
  PolyBasis fb = PolyBasis::monomial(2, 2);
  VectorField f(fb, Mat::Random(2, fb.size()));
  Mat pts = random_points(25, 2, rng);
  Dataset d = exact_dataset(f, pts);
  std::vector<int> perm(d.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Mat xs(d.size(), 2), ys(d.size(), 2);
  for (int i = 0; i < d.size(); ++i) {
    xs.row(i) = d.x.row(perm[i]);
    ys.row(i) = d.y.row(perm[i]);
  }
  auto g1 = fit_generator(d, PolyBasis::monomial(2, 2), PolyBasis::monomial(2, 3));
  auto g2 = fit_generator(Dataset(xs, ys), PolyBasis::monomial(2, 2),
                          PolyBasis::monomial(2, 3));
  CHECK((g1.g - g2.g).cwiseAbs().maxCoeff() <= 1e-12 * (1 + g1.g.cwiseAbs().maxCoeff()));
}

TEST_CASE("underdetermined fit returns the minimum-norm solution") {
  std::mt19937_64 rng(9);
  PolyBasis fb = PolyBasis::monomial(2, 2);
  VectorField f(fb, Mat::Random(2, fb.size()));
  PolyBasis phi = PolyBasis::monomial(2, 2);
  PolyBasis theta = PolyBasis::monomial(2, 3);
  const int m = theta.size() - 3;  // fewer samples than dictionary functions
  Dataset d = exact_dataset(f, random_points(m, 2, rng));
  auto g = fit_generator(d, phi, theta);
  CHECK(g.rank_used == m);
  // Minimum-norm solutions live in the range of B W B': the component of
  // each row of G orthogonal to that range must vanish.
  auto r = build_regression(d, phi, theta);
  const Mat bwb = r.b * r.w.asDiagonal() * r.b.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(bwb);
  const Vec ev = es.eigenvalues();
  Mat null_basis(theta.size(), theta.size() - m);
  int c = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) <= 1e-10 * ev.cwiseAbs().maxCoeff())
      null_basis.col(c++) = es.eigenvectors().col(i);
  REQUIRE(c == theta.size() - m);
  CHECK((g.g * null_basis).cwiseAbs().maxCoeff() <= 1e-9);
  // Perturbing along the null space grows the Frobenius norm without
  // changing the fit: the returned G is norm-minimal.
  Mat gp = g.g + 1e-3 * Mat::Random(phi.size(), theta.size() - m) *
                     null_basis.transpose();
  const Mat fit0 = g.g * r.b - r.a;
  const Mat fitp = gp * r.b - r.a;
  CHECK(std::abs(fit0.norm() - fitp.norm()) <= 1e-8 * (1 + fit0.norm()));
  CHECK(gp.norm() > g.g.norm());
}

TEST_CASE("dataset validation") {
  Mat x(1, 1), y(1, 1);
  x << 1.0;
  y << 2.0;
  CHECK_THROWS_AS(Dataset(x, Mat::Zero(2, 1)), std::invalid_argument);
  Vec wbad = Vec::Zero(1);
  CHECK_THROWS_AS(Dataset(x, y, wbad), std::invalid_argument);
  Mat ynan = y;
  ynan(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Dataset(x, ynan), std::invalid_argument);
}
