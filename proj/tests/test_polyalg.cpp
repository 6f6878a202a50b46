#include <cmath>
#include <random>

#include "test_util.hpp"

using namespace silas;
using testutil::make_poly;
using testutil::random_point;
using testutil::random_poly;

TEST_CASE("basis enumeration has the binomial cardinality") {
  CHECK(PolyBasis::monomial(2, 4).size() == 15);
  CHECK(PolyBasis::monomial(2, 2).size() == 6);
  CHECK(PolyBasis::monomial(3, 7).size() == 120);
}

TEST_CASE("graded order is degree-ascending and deterministic") {
  PolyBasis b = PolyBasis::monomial(2, 2);
  CHECK(b.exponents(0) == MultiIndex{0, 0});
  CHECK(b.exponents(1) == MultiIndex{1, 0});
  CHECK(b.exponents(2) == MultiIndex{0, 1});
  CHECK(b.exponents(3) == MultiIndex{2, 0});
  CHECK(b.exponents(4) == MultiIndex{1, 1});
  CHECK(b.exponents(5) == MultiIndex{0, 2});
  int prev = 0;
  for (int i = 0; i < b.size(); ++i) {
    const int d = total_degree(b.exponents(i));
    CHECK(d >= prev);
    prev = d;
  }
}

TEST_CASE("singular scale matrix is rejected") {
  Mat s = Mat::Zero(2, 2);
  s(0, 0) = 1.0;  // rank 1
  CHECK_THROWS_AS(PolyBasis(2, 2, BasisKind::Monomial, s, Vec::Zero(2)),
                  std::invalid_argument);
}

TEST_CASE("monomial product x*x = x^2") {
  Poly x = make_poly(1, 1, {{{1}, 1.0}});
  Poly p = poly_mul(x, x);
  CHECK(p.basis().degree() == 2);
  CHECK(p.coeffs()(p.basis().index_of({2})) == doctest::Approx(1.0));
  CHECK(p.coeffs()(0) == 0.0);
}

TEST_CASE("chebyshev product T1*T1 = T0/2 + T2/2") {
  PolyBasis cb = PolyBasis::chebyshev(1, 1, Mat::Identity(1, 1), Vec::Zero(1));
  Poly t1 = Poly::basis_function(cb, 1);
  Poly p = poly_mul(t1, t1);
  CHECK(p.coeffs()(0) == doctest::Approx(0.5));
  CHECK(p.coeffs()(1) == doctest::Approx(0.0));
  CHECK(p.coeffs()(2) == doctest::Approx(0.5));
  // Cross-check against the cos-form Chebyshev values at sample points.
  std::mt19937_64 rng(7);
  for (int k = 0; k < 5; ++k) {
    const double z = std::uniform_real_distribution<double>(-1, 1)(rng);
    const double lhs = z * z;  // T1(z)^2
    const double rhs = 0.5 * std::cos(0.0) * 0.0 + 0.5 + 0.5 * std::cos(2 * std::acos(z));
    CHECK(p.eval(Vec::Constant(1, z)) == doctest::Approx(lhs).epsilon(1e-12));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("zero times anything is zero") {
  Poly z = Poly::zero(PolyBasis::monomial(2, 2));
  Poly q = make_poly(2, 2, {{{1, 1}, 3.0}});
  CHECK(poly_mul(z, q).max_abs_coeff() == 0.0);
}

TEST_CASE("product evaluation matches pointwise for random polynomials") {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 3; ++n) {
    for (auto kind : {BasisKind::Monomial, BasisKind::Chebyshev}) {
      Mat s = Mat::Identity(n, n) * 0.7;
      Vec t = Vec::Constant(n, 0.1);
      PolyBasis b(n, 4, kind, s, t);
      Poly a = random_poly(b, rng), c = random_poly(b, rng);
      Poly p = poly_mul(a, c);
      for (int k = 0; k < 20; ++k) {
        Vec x = random_point(n, rng);
        const double want = a.eval(x) * c.eval(x);
        CHECK(p.eval(x) == doctest::Approx(want).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("mismatched scaling in poly_mul is an error") {
  PolyBasis b1 = PolyBasis::monomial(2, 2);
  PolyBasis b2(2, 2, BasisKind::Monomial, Mat::Identity(2, 2) * 2.0, Vec::Zero(2));
  CHECK_THROWS_AS(poly_mul(Poly::zero(b1), Poly::zero(b2)), std::invalid_argument);
}

TEST_CASE("gradient of x1^2 x2 and of constants") {
  Poly p = make_poly(2, 3, {{{2, 1}, 1.0}});
  auto g = poly_grad(p);
  CHECK(g[0].coeffs()(g[0].basis().index_of({1, 1})) == doctest::Approx(2.0));
  CHECK(g[1].coeffs()(g[1].basis().index_of({2, 0})) == doctest::Approx(1.0));
  Poly c = Poly::constant(PolyBasis::monomial(2, 2), 4.0);
  for (const auto& gc : poly_grad(c)) CHECK(gc.max_abs_coeff() == 0.0);
}

TEST_CASE("chebyshev derivative dT2/dz = 4 T1") {
  PolyBasis cb = PolyBasis::chebyshev(1, 2, Mat::Identity(1, 1), Vec::Zero(1));
  Poly t2 = Poly::basis_function(cb, 2);
  auto g = poly_grad(t2);
  CHECK(g[0].coeffs()(1) == doctest::Approx(4.0));
  CHECK(g[0].coeffs()(0) == doctest::Approx(0.0));
  // Pointwise finite-difference cross-check.
  const double h = 1e-6;
  for (double z : {-0.8, -0.2, 0.3, 0.9}) {
    const double fd =
        (t2.eval(Vec::Constant(1, z + h)) - t2.eval(Vec::Constant(1, z - h))) / (2 * h);
    CHECK(g[0].eval(Vec::Constant(1, z)) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("gradient matches centered finite differences") {
  std::mt19937_64 rng(23);
  const double h = 1e-5;
  for (auto kind : {BasisKind::Monomial, BasisKind::Chebyshev}) {
    const int n = 3;
    Mat s = Mat::Identity(n, n);
    s(0, 1) = 0.25;  // non-diagonal scaling exercises the chain rule
    PolyBasis b(n, 4, kind, s, Vec::Constant(n, -0.05));
    Poly p = random_poly(b, rng);
    auto g = poly_grad(p);
    for (int rep = 0; rep < 10; ++rep) {
      Vec x = random_point(n, rng, 0.8);
      for (int j = 0; j < n; ++j) {
        Vec xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        const double fd = (p.eval(xp) - p.eval(xm)) / (2 * h);
        const double got = g[j].eval(x);
        CHECK(std::abs(got - fd) <= 1e-6 * (1.0 + std::abs(got)));
      }
    }
  }
}

TEST_CASE("lie derivative basics") {
  // f = (-x1), v = x1^2  ->  -2 x1^2
  PolyBasis b1 = PolyBasis::monomial(1, 1);
  Mat f = Mat::Zero(1, b1.size());
  f(0, b1.index_of({1})) = -1.0;
  VectorField vf(b1, f);
  Poly v = make_poly(1, 2, {{{2}, 1.0}});
  Poly lie = lie_derivative(vf, v);
  CHECK(lie.coeffs()(lie.basis().index_of({2})) == doctest::Approx(-2.0));

  // f = 0 -> 0
  Poly z = lie_derivative(VectorField::zero(b1), v);
  CHECK(z.max_abs_coeff() == 0.0);
}

TEST_CASE("lie derivative is bilinear at the coefficient level") {
  std::mt19937_64 rng(5);
  PolyBasis vb = PolyBasis::monomial(2, 3);
  PolyBasis fb = PolyBasis::monomial(2, 2);
  Poly v = random_poly(vb, rng), w = random_poly(vb, rng);
  Mat fc = Mat::Random(2, fb.size());
  VectorField f(fb, fc);
  const double a = 1.7, b = -0.4;
  Poly lhs = lie_derivative(f, v * a + w * b);
  Poly rhs = lie_derivative(f, v) * a + lie_derivative(f, w) * b;
  CHECK((lhs.coeffs() - rhs.coeffs()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("cubic benchmark: leading part of b - v - <f, grad v>") {
  // The degree-6 part must be (x1^6 + x1^5 x2 + x1^4 x2^2 + x1^2 x2^4
  // - x1 x2^5 + x2^6) / 3.
  VectorField f = testutil::cubic_field();
  Poly v = testutil::quartic_lyapunov();
  Poly q = Poly::constant(PolyBasis::monomial(2, 6), 15.0) - v.embedded(6) -
           lie_derivative(f, v);
  Poly lead = leading_homogeneous(q, 6);
  Poly want = make_poly(2, 6,
                        {{{6, 0}, 1.0 / 3},
                         {{5, 1}, 1.0 / 3},
                         {{4, 2}, 1.0 / 3},
                         {{2, 4}, 1.0 / 3},
                         {{1, 5}, -1.0 / 3},
                         {{0, 6}, 1.0 / 3}});
  CHECK((lead.coeffs() - want.coeffs()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("leading_homogeneous selects exactly one degree") {
  Poly p = make_poly(1, 2, {{{2}, 1.0}, {{1}, 1.0}, {{0}, 1.0}});
  Poly l2 = leading_homogeneous(p, 2);
  CHECK(l2.coeffs()(l2.basis().index_of({2})) == doctest::Approx(1.0));
  CHECK(l2.eval(Vec::Constant(1, 2.0)) == doctest::Approx(4.0));
  CHECK(leading_homogeneous(p, 3).max_abs_coeff() == 0.0);

  Poly v4 = leading_homogeneous(testutil::quartic_lyapunov(), 4);
  Poly want = make_poly(2, 4,
                        {{{4, 0}, 1.0 / 3},
                         {{3, 1}, 1.0 / 3},
                         {{1, 3}, -1.0 / 3},
                         {{0, 4}, 1.0 / 3}});
  CHECK((v4.coeffs() - want.coeffs()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("change_basis: x^2 = T0/2 + T2/2 under unit scaling") {
  Poly x2 = make_poly(1, 2, {{{2}, 1.0}});
  PolyBasis cb = PolyBasis::chebyshev(1, 2, Mat::Identity(1, 1), Vec::Zero(1));
  Poly q = change_basis(x2, cb);
  CHECK(q.coeffs()(0) == doctest::Approx(0.5));
  CHECK(q.coeffs()(1) == doctest::Approx(0.0));
  CHECK(q.coeffs()(2) == doctest::Approx(0.5));
  for (double z : {-0.9, 0.1, 0.7})
    CHECK(q.eval(Vec::Constant(1, z)) == doctest::Approx(z * z).epsilon(1e-14));
}

TEST_CASE("change_basis identity and zero") {
  PolyBasis b = PolyBasis::monomial(2, 3);
  std::mt19937_64 rng(3);
  Poly p = random_poly(b, rng);
  Poly same = change_basis(p, b);
  CHECK((same.coeffs() - p.coeffs()).cwiseAbs().maxCoeff() == 0.0);
  Poly z = change_basis(Poly::zero(b), PolyBasis::chebyshev(2, 3, Mat::Identity(2, 2), Vec::Zero(2)));
  CHECK(z.max_abs_coeff() == 0.0);
}

TEST_CASE("change_basis round trip is the identity to 1e-12 relative") {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 3; ++n) {
    PolyBasis mono = PolyBasis::monomial(n, 4);
    Mat s = Mat::Identity(n, n) * 0.4;
    if (n > 1) s(0, n - 1) = 0.2;
    Vec t = Vec::Constant(n, 0.3);
    PolyBasis cheb = PolyBasis::chebyshev(n, 4, s, t);
    Poly p = random_poly(mono, rng);
    Poly back = change_basis(change_basis(p, cheb), mono);
    const double rel = (back.coeffs() - p.coeffs()).cwiseAbs().maxCoeff() /
                       (1.0 + p.max_abs_coeff());
    CHECK(rel <= 1e-12);
  }
}

TEST_CASE("change_basis refuses a target that cannot hold the polynomial") {
  Poly p = make_poly(1, 3, {{{3}, 1.0}});
  CHECK_THROWS_AS(change_basis(p, PolyBasis::monomial(1, 2)), std::invalid_argument);
}

TEST_CASE("squared_affine_norm evaluates to ||Sx+t||^2") {
  std::mt19937_64 rng(29);
  Mat s(2, 2);
  s << 0.5, 0.1, -0.2, 0.8;
  Vec t(2);
  t << 0.3, -0.7;
  Poly q = squared_affine_norm(PolyBasis::monomial(2, 4), s, t);
  for (int k = 0; k < 10; ++k) {
    Vec x = random_point(2, rng, 2.0);
    CHECK(q.eval(x) == doctest::Approx((s * x + t).squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("basis jacobian matches gradient polynomials") {
  std::mt19937_64 rng(31);
  Mat s = Mat::Identity(2, 2) * 0.6;
  PolyBasis b(2, 3, BasisKind::Chebyshev, s, Vec::Constant(2, 0.05));
  Vec x = random_point(2, rng);
  Mat jac = b.jacobian_all(x);
  for (int k = 0; k < b.size(); ++k) {
    auto g = poly_grad(Poly::basis_function(b, k));
    for (int j = 0; j < 2; ++j)
      CHECK(jac(k, j) == doctest::Approx(g[j].eval(x)).epsilon(1e-11));
  }
}
