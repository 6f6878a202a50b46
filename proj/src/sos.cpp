#include "silas/sos.hpp"

#include <cmath>
#include <stdexcept>

namespace silas {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

AffinePoly AffinePoly::fixed(const Poly& p) {
  AffinePoly a;
  a.basis = p.basis();
  a.constant = p.coeffs();
  a.var_coeffs = Mat::Zero(a.basis.size(), 0);
  return a;
}

Poly AffinePoly::value_at(const Vec& primal) const {
  Vec c = constant;
  for (size_t j = 0; j < var_ids.size(); ++j)
    c += var_coeffs.col(static_cast<long>(j)) * primal(var_ids[j]);
  return Poly(basis, c);
}

SosConstraint make_sos_constraint(std::string label, AffinePoly target) {
  SosConstraint c;
  c.gram_basis = target.basis.with_degree(target.basis.degree() / 2);
  c.target = std::move(target);
  c.label = std::move(label);
  return c;
}

SosConstraint coercivity_constraint(const std::vector<int>& u_vars,
                                    const PolyBasis& phi, const Mat& lambda,
                                    const Vec& mu, std::string label) {
  if (phi.degree() < 2 || phi.degree() % 2 != 0)
    throw std::invalid_argument(
        "coercivity_constraint: Lyapunov degree must be even and >= 2");
  if (static_cast<int>(u_vars.size()) != phi.size())
    throw std::invalid_argument("coercivity_constraint: u length != basis size");
  AffinePoly t;
  t.basis = phi;
  t.constant = -squared_affine_norm(phi, lambda, mu).coeffs();
  t.var_ids = u_vars;
  t.var_coeffs = Mat::Identity(phi.size(), phi.size());
  return make_sos_constraint(std::move(label), std::move(t));
}

Mat gram_expansion_matrix(const PolyBasis& gram_basis,
                          const PolyBasis& target_basis) {
  const int ng = gram_basis.size();
  Mat e = Mat::Zero(target_basis.size(), svec_dim(ng));
  int l = 0;
  for (int a = 0; a < ng; ++a) {
    for (int b = a; b < ng; ++b) {
      // svec order is column-major lower triangular: column a, rows b >= a.
      const int pos = l++;
      const Poly prod =
          poly_mul(Poly::basis_function(gram_basis, a), Poly::basis_function(gram_basis, b));
      const double w = (a == b) ? 1.0 : kSqrt2;
      for (int k = 0; k < prod.coeffs().size(); ++k) {
        const double v = prod.coeffs()(k);
        if (v == 0.0) continue;
        const int idx = target_basis.index_of(prod.basis().exponents(k));
        if (idx < 0)
          throw std::invalid_argument(
              "gram_expansion_matrix: Gram products exceed the target degree");
        e(idx, pos) += w * v;
      }
    }
  }
  return e;
}

SosHandle compile_sos(const SosConstraint& c, ProgramBuilder& builder) {
  if (!c.target.basis.same_family(c.gram_basis))
    throw std::invalid_argument("compile_sos: target and Gram basis family differ");
  if (c.gram_basis.degree() != c.target.basis.degree() / 2)
    throw std::invalid_argument("compile_sos: Gram degree must be floor(target/2)");
  SosHandle h;
  h.label = c.label;
  h.gram_side = c.gram_basis.size();
  h.gram_var_first = builder.add_psd_vars(h.gram_side);
  const Mat e = gram_expansion_matrix(c.gram_basis, c.target.basis);
  h.eq_row_first = builder.num_eq_rows();
  h.eq_row_count = c.target.basis.size();
  for (int k = 0; k < c.target.basis.size(); ++k) {
    std::vector<std::pair<int, double>> row;
    for (int l = 0; l < e.cols(); ++l)
      if (e(k, l) != 0.0) row.emplace_back(h.gram_var_first + l, e(k, l));
    for (size_t j = 0; j < c.target.var_ids.size(); ++j) {
      const double v = c.target.var_coeffs(k, static_cast<long>(j));
      if (v != 0.0) row.emplace_back(c.target.var_ids[j], -v);
    }
    builder.add_equality(row, c.target.constant(k));
  }
  return h;
}

Mat extract_gram(const SosHandle& h, const Vec& primal) {
  return smat(primal.segment(h.gram_var_first, svec_dim(h.gram_side)), h.gram_side);
}

GramCertificate verify_certificate(const Poly& target, const PolyBasis& gram_basis,
                                   const Mat& gram, const VerifyOptions& opts,
                                   std::string label) {
  GramCertificate cert;
  cert.label = std::move(label);
  cert.gram = gram;
  const int ng = gram_basis.size();
  if (gram.rows() != ng || gram.cols() != ng)
    throw std::invalid_argument("verify_certificate: Gram size mismatch");
  Poly expansion = Poly::zero(target.basis());
  for (int a = 0; a < ng; ++a) {
    for (int b = a; b < ng; ++b) {
      const double q = (a == b) ? gram(a, a) : gram(a, b) + gram(b, a);
      if (q == 0.0) continue;
      const Poly prod = poly_mul(Poly::basis_function(gram_basis, a),
                                 Poly::basis_function(gram_basis, b));
      expansion = expansion + change_basis(prod, target.basis()) * q;
    }
  }
  cert.match_residual =
      (expansion.coeffs() - target.coeffs()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (gram + gram.transpose()),
                                        Eigen::EigenvaluesOnly);
  cert.min_eig = es.eigenvalues().minCoeff();
  const double scale = 1.0 + target.max_abs_coeff();
  cert.verified = cert.min_eig >= -opts.eig_tol * scale &&
                  cert.match_residual <= opts.match_tol * scale;
  return cert;
}

GramCertificate verify_certificate(const SosConstraint& c, const Mat& gram,
                                   const Vec& primal, const VerifyOptions& opts) {
  return verify_certificate(c.target.value_at(primal), c.gram_basis, gram, opts,
                            c.label);
}

}  // namespace silas
