#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace silas {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Exponent tuple of one n-variate basis function.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& mi);

/// All multi-indices with |alpha| <= d in graded order: total degree
/// ascending, lexicographically descending within a degree (x1^d first).
/// This ordering is fixed globally; serialized coefficient vectors use it.
std::vector<MultiIndex> enumerate_multi_indices(int n, int d);

enum class BasisKind { Monomial, Chebyshev };

std::string to_string(BasisKind k);
BasisKind basis_kind_from_string(const std::string& s);

/// Indexed basis of the n-variate polynomials of degree <= d. Entry k is
/// phi_k(scale*x + shift) where phi_k is the monomial or tensor-Chebyshev
/// function with the k-th multi-index. Immutable; cheap to copy.
class PolyBasis {
 public:
  PolyBasis() = default;
  PolyBasis(int n, int d, BasisKind kind, Mat scale, Vec shift);

  /// Monomial basis in the raw state (identity scaling).
  static PolyBasis monomial(int n, int d);
  static PolyBasis chebyshev(int n, int d, const Mat& scale, const Vec& shift);

  int n() const;
  int degree() const;
  BasisKind kind() const;
  const Mat& scale() const;
  const Vec& shift() const;
  int size() const;

  const MultiIndex& exponents(int idx) const;
  /// Position of a multi-index, or -1 when |alpha| > degree.
  int index_of(const MultiIndex& mi) const;

  /// Same n, kind, scale and shift (degrees may differ). Polynomials over
  /// same-family bases combine without conversion.
  bool same_family(const PolyBasis& other) const;
  bool operator==(const PolyBasis& other) const;

  /// Same family at another degree.
  PolyBasis with_degree(int d) const;

  /// Values of all basis functions at a state-space point.
  Vec eval_all(const Vec& x) const;
  /// Jacobian d(basis)/dx, size() x n, chain rule through the scaling.
  Mat jacobian_all(const Vec& x) const;

  bool valid() const { return impl_ != nullptr; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Univariate kind-change matrices, cached per degree.
/// Column j of cheb_to_mono(d) holds the monomial coefficients of T_j;
/// column k of mono_to_cheb(d) holds the Chebyshev coefficients of z^k.
const Mat& cheb_to_mono_matrix(int d);
const Mat& mono_to_cheb_matrix(int d);

}  // namespace silas
