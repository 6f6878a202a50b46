#include "silas/basis.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace silas {

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

struct MiHash {
  size_t operator()(const MultiIndex& mi) const {
    size_t h = 1469598103934665603ull;
    for (int e : mi) {
      h ^= static_cast<size_t>(e);
      h *= 1099511628211ull;
    }
    return h;
  }
};

void enumerate_degree(int n, int deg, int pos, MultiIndex& cur,
                      std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[pos] = deg;
    out.push_back(cur);
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[pos] = e;
    enumerate_degree(n, deg - e, pos + 1, cur, out);
  }
}

}  // namespace

int total_degree(const MultiIndex& mi) {
  int d = 0;
  for (int e : mi) d += e;
  return d;
}

std::vector<MultiIndex> enumerate_multi_indices(int n, int d) {
  std::vector<MultiIndex> out;
  out.reserve(static_cast<size_t>(binomial(n + d, n)));
  MultiIndex cur(n, 0);
  for (int deg = 0; deg <= d; ++deg) enumerate_degree(n, deg, 0, cur, out);
  return out;
}

std::string to_string(BasisKind k) {
  return k == BasisKind::Monomial ? "monomial" : "chebyshev";
}

BasisKind basis_kind_from_string(const std::string& s) {
  if (s == "monomial") return BasisKind::Monomial;
  if (s == "chebyshev") return BasisKind::Chebyshev;
  throw std::invalid_argument("unknown basis kind: " + s);
}

struct PolyBasis::Impl {
  int n = 0;
  int d = 0;
  BasisKind kind = BasisKind::Monomial;
  Mat scale;
  Vec shift;
  std::vector<MultiIndex> indices;
  std::unordered_map<MultiIndex, int, MiHash> lookup;
};

PolyBasis::PolyBasis(int n, int d, BasisKind kind, Mat scale, Vec shift) {
  if (n < 1) throw std::invalid_argument("PolyBasis: n must be >= 1");
  if (d < 0) throw std::invalid_argument("PolyBasis: degree must be >= 0");
  if (scale.rows() != n || scale.cols() != n || shift.size() != n)
    throw std::invalid_argument("PolyBasis: scale/shift dimension mismatch");
  Eigen::FullPivLU<Mat> lu(scale);
  if (!lu.isInvertible())
    throw std::invalid_argument("PolyBasis: scale matrix is singular");
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->d = d;
  impl->kind = kind;
  impl->scale = std::move(scale);
  impl->shift = std::move(shift);
  impl->indices = enumerate_multi_indices(n, d);
  impl->lookup.reserve(impl->indices.size());
  for (int i = 0; i < static_cast<int>(impl->indices.size()); ++i)
    impl->lookup.emplace(impl->indices[i], i);
  impl_ = std::move(impl);
}

PolyBasis PolyBasis::monomial(int n, int d) {
  return PolyBasis(n, d, BasisKind::Monomial, Mat::Identity(n, n),
                   Vec::Zero(n));
}

PolyBasis PolyBasis::chebyshev(int n, int d, const Mat& scale,
                               const Vec& shift) {
  return PolyBasis(n, d, BasisKind::Chebyshev, scale, shift);
}

int PolyBasis::n() const { return impl_->n; }
int PolyBasis::degree() const { return impl_->d; }
BasisKind PolyBasis::kind() const { return impl_->kind; }
const Mat& PolyBasis::scale() const { return impl_->scale; }
const Vec& PolyBasis::shift() const { return impl_->shift; }
int PolyBasis::size() const { return static_cast<int>(impl_->indices.size()); }

const MultiIndex& PolyBasis::exponents(int idx) const {
  return impl_->indices.at(idx);
}

int PolyBasis::index_of(const MultiIndex& mi) const {
  auto it = impl_->lookup.find(mi);
  return it == impl_->lookup.end() ? -1 : it->second;
}

bool PolyBasis::same_family(const PolyBasis& other) const {
  return impl_->n == other.impl_->n && impl_->kind == other.impl_->kind &&
         impl_->scale == other.impl_->scale &&
         impl_->shift == other.impl_->shift;
}

bool PolyBasis::operator==(const PolyBasis& other) const {
  return same_family(other) && impl_->d == other.impl_->d;
}

PolyBasis PolyBasis::with_degree(int d) const {
  return PolyBasis(impl_->n, d, impl_->kind, impl_->scale, impl_->shift);
}

Vec PolyBasis::eval_all(const Vec& x) const {
  const auto& im = *impl_;
  if (x.size() != im.n) throw std::invalid_argument("eval_all: bad point dim");
  const Vec z = im.scale * x + im.shift;
  // Per-variable tables of the univariate functions up to degree d.
  Mat tab(im.n, im.d + 1);
  for (int i = 0; i < im.n; ++i) {
    tab(i, 0) = 1.0;
    if (im.d >= 1) tab(i, 1) = z(i);
    for (int k = 2; k <= im.d; ++k)
      tab(i, k) = im.kind == BasisKind::Monomial
                      ? tab(i, k - 1) * z(i)
                      : 2.0 * z(i) * tab(i, k - 1) - tab(i, k - 2);
  }
  Vec out(size());
  for (int idx = 0; idx < size(); ++idx) {
    double v = 1.0;
    const auto& mi = im.indices[idx];
    for (int i = 0; i < im.n; ++i) v *= tab(i, mi[i]);
    out(idx) = v;
  }
  return out;
}

Mat PolyBasis::jacobian_all(const Vec& x) const {
  const auto& im = *impl_;
  if (x.size() != im.n)
    throw std::invalid_argument("jacobian_all: bad point dim");
  const Vec z = im.scale * x + im.shift;
  Mat tab(im.n, im.d + 1), dtab(im.n, im.d + 1);
  for (int i = 0; i < im.n; ++i) {
    tab(i, 0) = 1.0;
    dtab(i, 0) = 0.0;
    if (im.d >= 1) {
      tab(i, 1) = z(i);
      dtab(i, 1) = 1.0;
    }
    if (im.kind == BasisKind::Monomial) {
      for (int k = 2; k <= im.d; ++k) {
        tab(i, k) = tab(i, k - 1) * z(i);
        dtab(i, k) = k * tab(i, k - 1);
      }
    } else {
      // T_k' = k U_{k-1}; track U alongside T.
      double um1 = 1.0, u = 2.0 * z(i);  // U_0, U_1
      for (int k = 2; k <= im.d; ++k) {
        tab(i, k) = 2.0 * z(i) * tab(i, k - 1) - tab(i, k - 2);
        dtab(i, k) = k * u;
        const double unext = 2.0 * z(i) * u - um1;
        um1 = u;
        u = unext;
      }
    }
  }
  // d/dz first, then chain rule through z = scale*x + shift.
  Mat dz(size(), im.n);
  for (int idx = 0; idx < size(); ++idx) {
    const auto& mi = im.indices[idx];
    for (int l = 0; l < im.n; ++l) {
      double v = dtab(l, mi[l]);
      if (v != 0.0)
        for (int i = 0; i < im.n; ++i)
          if (i != l) v *= tab(i, mi[i]);
      dz(idx, l) = v;
    }
  }
  return dz * im.scale;
}

namespace {

std::mutex g_kind_mutex;
std::map<int, Mat> g_cheb_to_mono, g_mono_to_cheb;

Mat build_cheb_to_mono(int d) {
  Mat m = Mat::Zero(d + 1, d + 1);
  m(0, 0) = 1.0;
  if (d >= 1) m(1, 1) = 1.0;
  for (int j = 2; j <= d; ++j) {
    // T_j = 2 z T_{j-1} - T_{j-2}
    for (int i = 0; i < j; ++i) m(i + 1, j) += 2.0 * m(i, j - 1);
    for (int i = 0; i <= j - 2; ++i) m(i, j) -= m(i, j - 2);
  }
  return m;
}

Mat build_mono_to_cheb(int d) {
  Mat m = Mat::Zero(d + 1, d + 1);
  m(0, 0) = 1.0;
  for (int k = 1; k <= d; ++k) {
    // z^k = z * z^{k-1}; z T_j = (T_{j+1} + T_{|j-1|}) / 2
    for (int j = 0; j < k; ++j) {
      const double c = m(j, k - 1);
      if (c == 0.0) continue;
      if (j == 0) {
        m(1, k) += c;
      } else {
        m(j + 1, k) += 0.5 * c;
        m(j - 1, k) += 0.5 * c;
      }
    }
  }
  return m;
}

}  // namespace

const Mat& cheb_to_mono_matrix(int d) {
  std::lock_guard<std::mutex> lock(g_kind_mutex);
  auto it = g_cheb_to_mono.find(d);
  if (it == g_cheb_to_mono.end())
    it = g_cheb_to_mono.emplace(d, build_cheb_to_mono(d)).first;
  return it->second;
}

const Mat& mono_to_cheb_matrix(int d) {
  std::lock_guard<std::mutex> lock(g_kind_mutex);
  auto it = g_mono_to_cheb.find(d);
  if (it == g_mono_to_cheb.end())
    it = g_mono_to_cheb.emplace(d, build_mono_to_cheb(d)).first;
  return it->second;
}

}  // namespace silas
