#include "silas/poly.hpp"

#include <cmath>
#include <stdexcept>

namespace silas {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Re-express coefficients through a univariate transform along one axis.
// Column e of M holds the expansion of source function e in target
// functions; both transforms used here are degree-nonincreasing, so the
// result stays within the same enumeration.
Vec apply_axis_transform(const Vec& c, const PolyBasis& geom, int axis,
                         const Mat& m) {
  Vec out = Vec::Zero(c.size());
  MultiIndex scratch;
  for (int idx = 0; idx < geom.size(); ++idx) {
    const double v = c(idx);
    if (v == 0.0) continue;
    const MultiIndex& mi = geom.exponents(idx);
    const int e = mi[axis];
    scratch = mi;
    for (int e2 = 0; e2 <= e; ++e2) {
      const double f = m(e2, e);
      if (f == 0.0) continue;
      scratch[axis] = e2;
      out(geom.index_of(scratch)) += v * f;
    }
  }
  return out;
}

Vec kind_to_monomial(const Vec& c, const PolyBasis& geom) {
  if (geom.kind() == BasisKind::Monomial) return c;
  const Mat& m = cheb_to_mono_matrix(geom.degree());
  Vec out = c;
  for (int axis = 0; axis < geom.n(); ++axis)
    out = apply_axis_transform(out, geom, axis, m);
  return out;
}

Vec monomial_to_kind(const Vec& c, const PolyBasis& geom, BasisKind kind) {
  if (kind == BasisKind::Monomial) return c;
  const Mat& m = mono_to_cheb_matrix(geom.degree());
  Vec out = c;
  for (int axis = 0; axis < geom.n(); ++axis)
    out = apply_axis_transform(out, geom, axis, m);
  return out;
}

// Substitute z_src = M z_tgt + w into a monomial coefficient vector.
// Power products z_src^alpha are built incrementally in graded order.
Vec substitute_affine_monomial(const Vec& c, const PolyBasis& geom,
                               const Mat& m, const Vec& w) {
  const int n = geom.n();
  const int sz = geom.size();
  std::vector<Vec> pp(sz);
  pp[0] = Vec::Zero(sz);
  pp[0](0) = 1.0;
  Vec out = Vec::Zero(sz);
  out(0) = c(0);
  MultiIndex parent;
  for (int idx = 1; idx < sz; ++idx) {
    const MultiIndex& mi = geom.exponents(idx);
    int axis = 0;
    while (mi[axis] == 0) ++axis;
    parent = mi;
    parent[axis] -= 1;
    const Vec& base = pp[geom.index_of(parent)];
    // Multiply by the affine factor z_src[axis] = sum_l M(axis,l) z_tgt_l + w(axis).
    Vec cur = Vec::Zero(sz);
    MultiIndex scratch;
    for (int k = 0; k < sz; ++k) {
      const double v = base(k);
      if (v == 0.0) continue;
      const MultiIndex& beta = geom.exponents(k);
      if (w(axis) != 0.0) cur(k) += v * w(axis);
      for (int l = 0; l < n; ++l) {
        const double f = m(axis, l);
        if (f == 0.0) continue;
        scratch = beta;
        scratch[l] += 1;
        cur(geom.index_of(scratch)) += v * f;
      }
    }
    pp[idx] = std::move(cur);
    if (c(idx) != 0.0) out += c(idx) * pp[idx];
  }
  return out;
}

}  // namespace

Poly::Poly(PolyBasis basis, Vec coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  require(coeffs_.size() == basis_.size(),
          "Poly: coefficient length must equal basis size");
}

Poly Poly::zero(const PolyBasis& basis) {
  return Poly(basis, Vec::Zero(basis.size()));
}

Poly Poly::constant(const PolyBasis& basis, double value) {
  Vec c = Vec::Zero(basis.size());
  c(0) = value;
  return Poly(basis, std::move(c));
}

Poly Poly::basis_function(const PolyBasis& basis, int k) {
  Vec c = Vec::Zero(basis.size());
  c(k) = 1.0;
  return Poly(basis, std::move(c));
}

double Poly::eval(const Vec& x) const { return basis_.eval_all(x).dot(coeffs_); }

int Poly::degree(double tol) const {
  int d = 0;
  for (int i = 0; i < coeffs_.size(); ++i)
    if (std::abs(coeffs_(i)) > tol) d = std::max(d, total_degree(basis_.exponents(i)));
  return d;
}

double Poly::max_abs_coeff() const {
  return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0;
}

Poly Poly::embedded(int d) const {
  if (d == basis_.degree()) return *this;
  require(d >= degree(), "embedded: target degree below actual degree");
  PolyBasis tgt = basis_.with_degree(d);
  Vec c = Vec::Zero(tgt.size());
  const int keep = std::min<int>(coeffs_.size(), tgt.size());
  c.head(keep) = coeffs_.head(keep);
  return Poly(std::move(tgt), std::move(c));
}

Poly Poly::operator+(const Poly& other) const {
  require(basis_.same_family(other.basis_), "Poly+: mismatched basis family");
  const int d = std::max(basis_.degree(), other.basis_.degree());
  Poly a = embedded(d), b = other.embedded(d);
  return Poly(a.basis_, a.coeffs_ + b.coeffs_);
}

Poly Poly::operator-(const Poly& other) const { return *this + other * -1.0; }

Poly Poly::operator*(double s) const { return Poly(basis_, coeffs_ * s); }

VectorField::VectorField(PolyBasis basis, Mat coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  require(coeffs_.cols() == basis_.size(),
          "VectorField: coefficient columns must equal basis size");
  require(coeffs_.rows() == basis_.n(),
          "VectorField: one row per state dimension required");
}

VectorField VectorField::zero(const PolyBasis& basis) {
  return VectorField(basis, Mat::Zero(basis.n(), basis.size()));
}

Vec VectorField::eval(const Vec& x) const { return coeffs_ * basis_.eval_all(x); }

Poly VectorField::component(int i) const {
  return Poly(basis_, coeffs_.row(i).transpose());
}

Poly poly_mul(const Poly& a, const Poly& b) {
  require(a.basis().same_family(b.basis()), "poly_mul: mismatched basis family");
  const PolyBasis& ba = a.basis();
  const int n = ba.n();
  PolyBasis tgt = ba.with_degree(ba.degree() + b.basis().degree());
  Vec out = Vec::Zero(tgt.size());
  if (ba.kind() == BasisKind::Monomial) {
    MultiIndex sum(n);
    for (int i = 0; i < a.coeffs().size(); ++i) {
      const double ca = a.coeffs()(i);
      if (ca == 0.0) continue;
      const MultiIndex& mi = ba.exponents(i);
      for (int j = 0; j < b.coeffs().size(); ++j) {
        const double cb = b.coeffs()(j);
        if (cb == 0.0) continue;
        const MultiIndex& mj = b.basis().exponents(j);
        for (int k = 0; k < n; ++k) sum[k] = mi[k] + mj[k];
        out(tgt.index_of(sum)) += ca * cb;
      }
    }
  } else {
    // T_i T_j = (T_{i+j} + T_{|i-j|}) / 2 in every variable; expand the
    // 2^n sign choices per coefficient pair.
    MultiIndex gamma(n);
    for (int i = 0; i < a.coeffs().size(); ++i) {
      const double ca = a.coeffs()(i);
      if (ca == 0.0) continue;
      const MultiIndex& mi = ba.exponents(i);
      for (int j = 0; j < b.coeffs().size(); ++j) {
        const double cb = b.coeffs()(j);
        if (cb == 0.0) continue;
        const MultiIndex& mj = b.basis().exponents(j);
        const double cab = ca * cb;
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
          double factor = cab;
          bool skip = false;
          for (int k = 0; k < n; ++k) {
            if (mi[k] == 0 || mj[k] == 0) {
              // Single term; only the "+" branch contributes.
              if (mask & (1u << k)) { skip = true; break; }
              gamma[k] = mi[k] + mj[k];
            } else {
              factor *= 0.5;
              gamma[k] = (mask & (1u << k)) ? std::abs(mi[k] - mj[k])
                                            : mi[k] + mj[k];
            }
          }
          if (!skip) out(tgt.index_of(gamma)) += factor;
        }
      }
    }
  }
  return Poly(std::move(tgt), std::move(out));
}

std::vector<Poly> poly_grad(const Poly& p) {
  const PolyBasis& b = p.basis();
  const int n = b.n();
  const int dd = std::max(b.degree() - 1, 0);
  PolyBasis tgt = b.with_degree(dd);
  // Derivatives along the scaled coordinates z first.
  std::vector<Vec> dz(n, Vec::Zero(tgt.size()));
  MultiIndex scratch;
  for (int idx = 0; idx < p.coeffs().size(); ++idx) {
    const double c = p.coeffs()(idx);
    if (c == 0.0) continue;
    const MultiIndex& mi = b.exponents(idx);
    for (int l = 0; l < n; ++l) {
      const int e = mi[l];
      if (e == 0) continue;
      scratch = mi;
      if (b.kind() == BasisKind::Monomial) {
        scratch[l] = e - 1;
        dz[l](tgt.index_of(scratch)) += c * e;
      } else {
        // dT_e/dz = 2e (T_{e-1} + T_{e-3} + ...), T_0 halved.
        for (int k = e - 1; k >= 0; k -= 2) {
          scratch[l] = k;
          dz[l](tgt.index_of(scratch)) += c * (k == 0 ? e : 2.0 * e);
        }
      }
    }
  }
  // Chain rule: d/dx_j = sum_l scale(l,j) d/dz_l.
  const Mat& s = b.scale();
  std::vector<Poly> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    Vec cj = Vec::Zero(tgt.size());
    for (int l = 0; l < n; ++l)
      if (s(l, j) != 0.0) cj += s(l, j) * dz[l];
    out.emplace_back(tgt, std::move(cj));
  }
  return out;
}

Poly lie_derivative(const VectorField& f, const Poly& v) {
  require(f.basis().same_family(v.basis()),
          "lie_derivative: field and polynomial must share basis family");
  const auto grads = poly_grad(v);
  const int dd = std::max(f.basis().degree() + v.basis().degree() - 1, 0);
  Poly acc = Poly::zero(f.basis().with_degree(dd));
  for (int i = 0; i < f.n(); ++i)
    acc = acc + poly_mul(f.component(i), grads[i]);
  return acc;
}

Poly change_basis(const Poly& p, const PolyBasis& target) {
  require(p.basis().n() == target.n(), "change_basis: dimension mismatch");
  const PolyBasis& src = p.basis();
  if (src == target) return p;
  if (src.same_family(target)) {
    if (target.degree() >= src.degree()) return p.embedded(target.degree());
  }
  // Route through the monomial representation of the source coordinates.
  Vec mono = kind_to_monomial(p.coeffs(), src);
  // Affine substitution z_src = M z_tgt + w.
  const bool same_map =
      src.scale() == target.scale() && src.shift() == target.shift();
  if (!same_map) {
    const Mat m = src.scale() * target.scale().inverse();
    const Vec w = src.shift() - m * target.shift();
    mono = substitute_affine_monomial(mono, src.with_degree(src.degree()), m, w);
  }
  // Convert kind in the target coordinates, then fit into the target size.
  PolyBasis geom = src;  // same degree enumeration, target coordinates
  Vec tgt_kind = monomial_to_kind(mono, geom, target.kind());
  Vec out = Vec::Zero(target.size());
  double dropped = 0.0;
  for (int i = 0; i < geom.size(); ++i) {
    if (tgt_kind(i) == 0.0) continue;
    const int j = target.index_of(geom.exponents(i));
    if (j < 0)
      dropped = std::max(dropped, std::abs(tgt_kind(i)));
    else
      out(j) = tgt_kind(i);
  }
  const double scale = 1.0 + p.max_abs_coeff();
  if (dropped > 1e-9 * scale)
    throw std::invalid_argument(
        "change_basis: target degree too low for this polynomial");
  return Poly(target, std::move(out));
}

VectorField change_basis_field(const VectorField& f, const PolyBasis& target) {
  Mat coeffs(f.n(), target.size());
  for (int i = 0; i < f.n(); ++i)
    coeffs.row(i) = change_basis(f.component(i), target).coeffs().transpose();
  return VectorField(target, coeffs);
}

Poly leading_homogeneous(const Poly& p, int degree) {
  const int n = p.basis().n();
  const int d = std::max({p.basis().degree(), degree, 0});
  Poly mono = change_basis(p, PolyBasis::monomial(n, d));
  PolyBasis tgt = PolyBasis::monomial(n, degree);
  Vec out = Vec::Zero(tgt.size());
  for (int i = 0; i < mono.coeffs().size(); ++i) {
    const MultiIndex& mi = mono.basis().exponents(i);
    if (total_degree(mi) == degree) out(tgt.index_of(mi)) = mono.coeffs()(i);
  }
  return Poly(std::move(tgt), std::move(out));
}

Poly squared_affine_norm(const PolyBasis& basis, const Mat& scale,
                         const Vec& shift) {
  const int n = basis.n();
  require(scale.rows() == n && scale.cols() == n && shift.size() == n,
          "squared_affine_norm: dimension mismatch");
  require(basis.degree() >= 2, "squared_affine_norm: basis degree must be >= 2");
  PolyBasis mono = PolyBasis::monomial(n, 2);
  Vec c = Vec::Zero(mono.size());
  // ||Sx + t||^2 = x'S'Sx + 2 t'Sx + t't
  const Mat q = scale.transpose() * scale;
  const Vec lin = 2.0 * scale.transpose() * shift;
  c(0) = shift.squaredNorm();
  for (int i = 0; i < n; ++i) {
    MultiIndex mi(n, 0);
    mi[i] = 1;
    c(mono.index_of(mi)) += lin(i);
    for (int j = 0; j < n; ++j) {
      MultiIndex mij(n, 0);
      mij[i] += 1;
      mij[j] += 1;
      c(mono.index_of(mij)) += q(i, j);
    }
  }
  return change_basis(Poly(mono, c), basis);
}

}  // namespace silas
