#pragma once

#include "silas/basis.hpp"

namespace silas {

/// Polynomial as a dense coefficient vector over a PolyBasis. Immutable
/// value type; all operations return new objects.
class Poly {
 public:
  Poly() = default;
  Poly(PolyBasis basis, Vec coeffs);

  static Poly zero(const PolyBasis& basis);
  static Poly constant(const PolyBasis& basis, double value);
  /// The k-th basis function as a polynomial.
  static Poly basis_function(const PolyBasis& basis, int k);

  const PolyBasis& basis() const { return basis_; }
  const Vec& coeffs() const { return coeffs_; }

  double eval(const Vec& x) const;
  /// Largest total degree carried by a coefficient with |c| > tol.
  int degree(double tol = 0.0) const;
  double max_abs_coeff() const;

  /// Same polynomial over the same-family basis of degree d >= degree().
  Poly embedded(int d) const;

  Poly operator+(const Poly& other) const;
  Poly operator-(const Poly& other) const;
  Poly operator*(double s) const;
  friend Poly operator*(double s, const Poly& p) { return p * s; }

  bool valid() const { return basis_.valid(); }

 private:
  PolyBasis basis_;
  Vec coeffs_;
};

/// Polynomial map f(x) = F * zeta(x), one row of F per state component.
class VectorField {
 public:
  VectorField() = default;
  VectorField(PolyBasis basis, Mat coeffs);

  static VectorField zero(const PolyBasis& basis);

  const PolyBasis& basis() const { return basis_; }
  const Mat& coeffs() const { return coeffs_; }
  int n() const { return static_cast<int>(coeffs_.rows()); }

  Vec eval(const Vec& x) const;
  Poly component(int i) const;

  bool valid() const { return basis_.valid(); }

 private:
  PolyBasis basis_;
  Mat coeffs_;
};

/// Exact product. Operands must share basis family; the result lives in
/// the family basis of degree deg(a)+deg(b). Chebyshev products linearize
/// per variable via T_i T_j = (T_{i+j} + T_{|i-j|}) / 2.
Poly poly_mul(const Poly& a, const Poly& b);

/// Exact partial derivatives d/dx_j, chain-ruled through the basis scaling,
/// in the family basis of degree max(deg-1, 0).
std::vector<Poly> poly_grad(const Poly& p);

/// <f(x), grad v(x)> in the family basis of degree deg(f)+deg(v)-1.
Poly lie_derivative(const VectorField& f, const Poly& v);

/// Homogeneous component of the requested total degree in the raw state,
/// returned over the identity-scaled monomial basis.
Poly leading_homogeneous(const Poly& p, int degree);

/// Re-express p over the target basis (kind change and/or affine
/// rescaling); throws when the target degree cannot hold p.
Poly change_basis(const Poly& p, const PolyBasis& target);
VectorField change_basis_field(const VectorField& f, const PolyBasis& target);

/// ||scale*x + shift||^2 over the given basis (degree >= 2 required).
Poly squared_affine_norm(const PolyBasis& basis, const Mat& scale,
                         const Vec& shift);

}  // namespace silas
