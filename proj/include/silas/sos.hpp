#pragma once

#include <string>
#include <vector>

#include "silas/conic.hpp"
#include "silas/poly.hpp"

namespace silas {

/// Polynomial expression that is affine in program decision variables:
/// constant + sum_j var_coeffs(:,j) * value(var_ids[j]), all over `basis`.
struct AffinePoly {
  PolyBasis basis;
  Vec constant;
  std::vector<int> var_ids;
  Mat var_coeffs;  // basis.size() x var_ids.size()

  static AffinePoly fixed(const Poly& p);
  /// Numeric polynomial for a full program primal vector.
  Poly value_at(const Vec& primal) const;
};

/// Membership of an affine polynomial expression in Sigma[x]_d; the Gram
/// basis must have degree floor(d/2). Coefficients of the target at odd top
/// degree have no Gram counterpart and the compiled equalities pin them to
/// zero.
struct SosConstraint {
  AffinePoly target;
  PolyBasis gram_basis;
  std::string label;
};

SosConstraint make_sos_constraint(std::string label, AffinePoly target);

/// Coercivity constraint <u, phi> - ||Lambda x + mu||^2 in Sigma[x]_{d_v}.
SosConstraint coercivity_constraint(const std::vector<int>& u_vars,
                                    const PolyBasis& phi, const Mat& lambda,
                                    const Vec& mu, std::string label = "coercive");

struct SosHandle {
  int gram_var_first = -1;
  int gram_side = 0;
  int eq_row_first = -1;
  int eq_row_count = 0;
  std::string label;
};

/// Expansion matrix E with E(k, l) = coefficient of target-basis entry k in
/// w_l z_a z_b, where l runs over svec positions of the Gram matrix and w_l
/// restores the svec off-diagonal scaling. zz':Q in coefficients is then
/// E * svec(Q).
Mat gram_expansion_matrix(const PolyBasis& gram_basis, const PolyBasis& target_basis);

/// Adds the PSD Gram block and one coefficient-matching equality per target
/// basis entry to the builder.
SosHandle compile_sos(const SosConstraint& c, ProgramBuilder& builder);

struct GramCertificate {
  std::string label;
  Mat gram;               // side x side symmetric
  double match_residual = 0.0;
  double min_eig = 0.0;
  bool verified = false;
};

struct VerifyOptions {
  double eig_tol = 1e-7;
  double match_tol = 1e-6;
};

/// Recomputes the zz' expansion with exact polynomial arithmetic and
/// compares it coefficient-wise against the numeric target; thresholds are
/// scaled by 1 + max |target coefficient|.
GramCertificate verify_certificate(const Poly& target, const PolyBasis& gram_basis,
                                   const Mat& gram, const VerifyOptions& opts = {},
                                   std::string label = "");

GramCertificate verify_certificate(const SosConstraint& c, const Mat& gram,
                                   const Vec& primal, const VerifyOptions& opts = {});

/// Gram matrix extracted from a solved program.
Mat extract_gram(const SosHandle& h, const Vec& primal);

}  // namespace silas
