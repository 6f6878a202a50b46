#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "silas/conic.hpp"

// Homogeneous self-dual embedding with Nesterov-Todd scaling, following the
// conelp algorithm (Vandenberghe, "The CVXOPT linear and quadratic cone
// program solvers"). Everything is dense: the programs compiled by this
// project stay small (KKT systems well under ~2000 rows), so dense LU with
// iterative refinement is simpler and more robust than a sparse
// factorization here.

namespace silas {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Block {
  ConeKind kind;
  int start;
  int dim;
  int side;  // PSD only
};

struct Scaling {
  std::vector<MatrixXd> w;     // W; lambda = W z = W^{-T} s (not symmetric for PSD)
  std::vector<MatrixXd> wtw;   // W'W
  std::vector<MatrixXd> winv;  // W^{-1}
  VectorXd lambda;
};

class ConeOps {
 public:
  ConeOps(std::vector<Block> blocks, int dim)
      : blocks_(std::move(blocks)), dim_(dim) {}

  int dim() const { return dim_; }

  double degree() const {
    double d = 0;
    for (const auto& b : blocks_)
      d += b.kind == ConeKind::Nonnegative   ? b.dim
           : b.kind == ConeKind::SecondOrder ? 1
                                             : b.side;
    return d;
  }

  VectorXd identity() const {
    VectorXd e = VectorXd::Zero(dim_);
    for (const auto& b : blocks_) {
      switch (b.kind) {
        case ConeKind::Nonnegative:
          e.segment(b.start, b.dim).setOnes();
          break;
        case ConeKind::SecondOrder:
          e(b.start) = 1.0;
          break;
        case ConeKind::Psd:
          e.segment(b.start, b.dim) = svec(MatrixXd::Identity(b.side, b.side));
          break;
      }
    }
    return e;
  }

  double min_eig(const VectorXd& v) const {
    double m = kInf;
    for (const auto& b : blocks_) {
      const auto seg = v.segment(b.start, b.dim);
      switch (b.kind) {
        case ConeKind::Nonnegative:
          m = std::min(m, seg.minCoeff());
          break;
        case ConeKind::SecondOrder:
          m = std::min(m, seg(0) - seg.tail(b.dim - 1).norm());
          break;
        case ConeKind::Psd: {
          Eigen::SelfAdjointEigenSolver<MatrixXd> es(smat(seg, b.side),
                                                     Eigen::EigenvaluesOnly);
          m = std::min(m, es.eigenvalues().minCoeff());
          break;
        }
      }
    }
    return m;
  }

  // Largest t with u + t*d still in the cone (u strictly interior).
  double max_step(const VectorXd& u, const VectorXd& d) const {
    double t = kInf;
    for (const auto& b : blocks_) {
      const auto us = u.segment(b.start, b.dim);
      const auto ds = d.segment(b.start, b.dim);
      switch (b.kind) {
        case ConeKind::Nonnegative:
          for (int i = 0; i < b.dim; ++i)
            if (ds(i) < 0.0) t = std::min(t, -us(i) / ds(i));
          break;
        case ConeKind::SecondOrder: {
          const auto ut = us.tail(b.dim - 1);
          const auto dt = ds.tail(b.dim - 1);
          const double a = ds(0) * ds(0) - dt.squaredNorm();
          const double bb = 2.0 * (us(0) * ds(0) - ut.dot(dt));
          const double c = us(0) * us(0) - ut.squaredNorm();
          // Smallest positive root of a t^2 + bb t + c (c > 0 inside).
          if (std::abs(a) < 1e-300) {
            if (bb < 0.0) t = std::min(t, -c / bb);
          } else {
            const double disc = bb * bb - 4.0 * a * c;
            if (disc >= 0.0) {
              const double sq = std::sqrt(disc);
              for (double root : {(-bb - sq) / (2 * a), (-bb + sq) / (2 * a)})
                if (root > 0.0) t = std::min(t, root);
            }
          }
          if (ds(0) < 0.0) t = std::min(t, -us(0) / ds(0));
          break;
        }
        case ConeKind::Psd: {
          const MatrixXd um = smat(us, b.side);
          const MatrixXd dm = smat(ds, b.side);
          Eigen::LLT<MatrixXd> llt(um);
          if (llt.info() != Eigen::Success) return 0.0;
          const MatrixXd l = llt.matrixL();
          MatrixXd tmp = l.triangularView<Eigen::Lower>().solve(dm);
          tmp = l.triangularView<Eigen::Lower>().solve(tmp.transpose().eval());
          Eigen::SelfAdjointEigenSolver<MatrixXd> es(tmp, Eigen::EigenvaluesOnly);
          const double lmin = es.eigenvalues().minCoeff();
          if (lmin < 0.0) t = std::min(t, -1.0 / lmin);
          break;
        }
      }
    }
    return t;
  }

  VectorXd jprod(const VectorXd& u, const VectorXd& v) const {
    VectorXd out(dim_);
    for (const auto& b : blocks_) {
      const auto us = u.segment(b.start, b.dim);
      const auto vs = v.segment(b.start, b.dim);
      switch (b.kind) {
        case ConeKind::Nonnegative:
          out.segment(b.start, b.dim) = us.cwiseProduct(vs);
          break;
        case ConeKind::SecondOrder:
          out(b.start) = us.dot(vs);
          out.segment(b.start + 1, b.dim - 1) =
              us(0) * vs.tail(b.dim - 1) + vs(0) * us.tail(b.dim - 1);
          break;
        case ConeKind::Psd: {
          const MatrixXd um = smat(us, b.side);
          const MatrixXd vm = smat(vs, b.side);
          out.segment(b.start, b.dim) = svec(0.5 * (um * vm + vm * um));
          break;
        }
      }
    }
    return out;
  }

  // Solve u o x = v for x.
  VectorXd jsolve(const VectorXd& u, const VectorXd& v) const {
    VectorXd out(dim_);
    for (const auto& b : blocks_) {
      const auto us = u.segment(b.start, b.dim);
      const auto vs = v.segment(b.start, b.dim);
      switch (b.kind) {
        case ConeKind::Nonnegative:
          out.segment(b.start, b.dim) = vs.cwiseQuotient(us);
          break;
        case ConeKind::SecondOrder: {
          const double u0 = us(0);
          const auto ut = us.tail(b.dim - 1);
          const auto vt = vs.tail(b.dim - 1);
          const double det = u0 * u0 - ut.squaredNorm();
          const double x0 = (u0 * vs(0) - ut.dot(vt)) / det;
          out(b.start) = x0;
          out.segment(b.start + 1, b.dim - 1) = (vt - x0 * ut) / u0;
          break;
        }
        case ConeKind::Psd: {
          const MatrixXd um = smat(us, b.side);
          const MatrixXd vm = smat(vs, b.side);
          Eigen::SelfAdjointEigenSolver<MatrixXd> es(um);
          const MatrixXd q = es.eigenvectors();
          const VectorXd ev = es.eigenvalues();
          MatrixXd tm = q.transpose() * vm * q;
          for (int i = 0; i < b.side; ++i)
            for (int j = 0; j < b.side; ++j) tm(i, j) *= 2.0 / (ev(i) + ev(j));
          out.segment(b.start, b.dim) = svec(q * tm * q.transpose());
          break;
        }
      }
    }
    return out;
  }

  bool compute_scaling(const VectorXd& s, const VectorXd& z, Scaling& sc) const {
    sc.w.assign(blocks_.size(), {});
    sc.wtw.assign(blocks_.size(), {});
    sc.winv.assign(blocks_.size(), {});
    sc.lambda.resize(dim_);
    for (size_t bi = 0; bi < blocks_.size(); ++bi) {
      const auto& b = blocks_[bi];
      const auto ss = s.segment(b.start, b.dim);
      const auto zs = z.segment(b.start, b.dim);
      switch (b.kind) {
        case ConeKind::Nonnegative: {
          if (ss.minCoeff() <= 0.0 || zs.minCoeff() <= 0.0) return false;
          const VectorXd w = ss.cwiseQuotient(zs).cwiseSqrt();
          sc.w[bi] = MatrixXd(w.asDiagonal());
          sc.wtw[bi] = MatrixXd(w.cwiseProduct(w).asDiagonal());
          sc.winv[bi] = MatrixXd(w.cwiseInverse().asDiagonal());
          sc.lambda.segment(b.start, b.dim) = ss.cwiseProduct(zs).cwiseSqrt();
          break;
        }
        case ConeKind::SecondOrder: {
          const int m = b.dim;
          const double sres = ss(0) * ss(0) - ss.tail(m - 1).squaredNorm();
          const double zres = zs(0) * zs(0) - zs.tail(m - 1).squaredNorm();
          if (sres <= 0.0 || zres <= 0.0 || ss(0) <= 0.0 || zs(0) <= 0.0)
            return false;
          const VectorXd sn = ss / std::sqrt(sres);
          const VectorXd zn = zs / std::sqrt(zres);
          const double gamma = std::sqrt((1.0 + sn.dot(zn)) / 2.0);
          VectorXd wbar(m);
          wbar(0) = (sn(0) + zn(0)) / (2.0 * gamma);
          wbar.tail(m - 1) = (sn.tail(m - 1) - zn.tail(m - 1)) / (2.0 * gamma);
          const double eta = std::pow(sres / zres, 0.25);
          MatrixXd wb(m, m);
          wb(0, 0) = wbar(0);
          wb.block(0, 1, 1, m - 1) = wbar.tail(m - 1).transpose();
          wb.block(1, 0, m - 1, 1) = wbar.tail(m - 1);
          wb.block(1, 1, m - 1, m - 1) =
              MatrixXd::Identity(m - 1, m - 1) +
              wbar.tail(m - 1) * wbar.tail(m - 1).transpose() / (1.0 + wbar(0));
          sc.w[bi] = eta * wb;
          sc.wtw[bi] = sc.w[bi] * sc.w[bi];
          // wb J wb = J under wbar'J wbar = 1, so wb^{-1} = J wb J.
          MatrixXd jm = -MatrixXd::Identity(m, m);
          jm(0, 0) = 1.0;
          sc.winv[bi] = (jm * wb * jm) / eta;
          sc.lambda.segment(b.start, b.dim) = sc.w[bi] * zs;
          break;
        }
        case ConeKind::Psd: {
          const MatrixXd sm = smat(ss, b.side);
          const MatrixXd zm = smat(zs, b.side);
          Eigen::LLT<MatrixXd> ls(sm), lz(zm);
          if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
            return false;
          const MatrixXd lsl = ls.matrixL();
          const MatrixXd lzl = lz.matrixL();
          Eigen::JacobiSVD<MatrixXd> svd(
              lzl.transpose() * lsl, Eigen::ComputeFullU | Eigen::ComputeFullV);
          const VectorXd sig = svd.singularValues();
          if (sig.minCoeff() <= 0.0) return false;
          const VectorXd si = sig.cwiseSqrt().cwiseInverse();
          const MatrixXd r = lsl * svd.matrixV() * si.asDiagonal();
          // R^{-1} = Sigma^{-1/2} U' Lz' since Ls (Lz'Ls)^{-1} Lz' = I.
          const MatrixXd rinv =
              si.asDiagonal() * svd.matrixU().transpose() * lzl.transpose();
          const int d = b.dim;
          MatrixXd w(d, d), winv(d, d), wtw(d, d);
          const MatrixXd rrt = r * r.transpose();
          VectorXd unit = VectorXd::Zero(d);
          for (int k = 0; k < d; ++k) {
            unit(k) = 1.0;
            const MatrixXd ek = smat(unit, b.side);
            w.col(k) = svec(r.transpose() * ek * r);
            winv.col(k) = svec(rinv.transpose() * ek * rinv);
            wtw.col(k) = svec(rrt * ek * rrt);
            unit(k) = 0.0;
          }
          sc.w[bi] = std::move(w);
          sc.winv[bi] = std::move(winv);
          sc.wtw[bi] = std::move(wtw);
          sc.lambda.segment(b.start, b.dim) = svec(MatrixXd(sig.asDiagonal()));
          break;
        }
      }
    }
    return true;
  }

  enum class Op { W, WT, Winv, WinvT };

  VectorXd apply(const Scaling& sc, Op op, const VectorXd& v) const {
    VectorXd out(dim_);
    for (size_t bi = 0; bi < blocks_.size(); ++bi) {
      const auto& b = blocks_[bi];
      const auto seg = v.segment(b.start, b.dim);
      switch (op) {
        case Op::W: out.segment(b.start, b.dim) = sc.w[bi] * seg; break;
        case Op::WT:
          out.segment(b.start, b.dim) = sc.w[bi].transpose() * seg;
          break;
        case Op::Winv: out.segment(b.start, b.dim) = sc.winv[bi] * seg; break;
        case Op::WinvT:
          out.segment(b.start, b.dim) = sc.winv[bi].transpose() * seg;
          break;
      }
    }
    return out;
  }

  const std::vector<Block>& blocks() const { return blocks_; }

 private:
  std::vector<Block> blocks_;
  int dim_;
};

struct StandardForm {
  MatrixXd a;
  VectorXd b;
  MatrixXd g;  // G x + s = h, s in K
  VectorXd h;
  VectorXd c;
  std::vector<Block> blocks;
  std::vector<int> kept_rows;  // original equality row of each kept row
  int orig_eq_rows = 0;
  bool trivially_infeasible = false;
  int bad_row = -1;
};

StandardForm to_standard_form(const ConicProgram& p) {
  StandardForm sf;
  sf.c = p.objective;
  sf.orig_eq_rows = static_cast<int>(p.eq_rhs.size());
  const MatrixXd a_dense = MatrixXd(p.eq_lhs);
  for (int i = 0; i < a_dense.rows(); ++i) {
    const double mx =
        a_dense.cols() ? a_dense.row(i).cwiseAbs().maxCoeff() : 0.0;
    if (mx == 0.0) {
      if (std::abs(p.eq_rhs(i)) > 0.0 && !sf.trivially_infeasible) {
        sf.trivially_infeasible = true;
        sf.bad_row = i;
      }
    } else {
      sf.kept_rows.push_back(i);
    }
  }
  sf.a.resize(static_cast<int>(sf.kept_rows.size()), p.num_free);
  sf.b.resize(static_cast<int>(sf.kept_rows.size()));
  for (size_t k = 0; k < sf.kept_rows.size(); ++k) {
    sf.a.row(static_cast<int>(k)) = a_dense.row(sf.kept_rows[k]);
    sf.b(static_cast<int>(k)) = p.eq_rhs(sf.kept_rows[k]);
  }
  int total = 0;
  for (const auto& cb : p.cones) total += cb.dim;
  sf.g.resize(total, p.num_free);
  sf.h.resize(total);
  int at = 0;
  for (const auto& cb : p.cones) {
    sf.g.middleRows(at, cb.dim) = -MatrixXd(cb.map);
    sf.h.segment(at, cb.dim) = cb.offset;
    sf.blocks.push_back({cb.kind, at, cb.dim, cb.side});
    at += cb.dim;
  }
  return sf;
}

class Kkt {
 public:
  explicit Kkt(const StandardForm& sf) {
    nx_ = static_cast<int>(sf.c.size());
    ny_ = static_cast<int>(sf.b.size());
    nz_ = static_cast<int>(sf.h.size());
    const int n = nx_ + ny_ + nz_;
    base_ = MatrixXd::Zero(n, n);
    base_.block(0, nx_, nx_, ny_) = sf.a.transpose();
    base_.block(0, nx_ + ny_, nx_, nz_) = sf.g.transpose();
    base_.block(nx_, 0, ny_, nx_) = sf.a;
    base_.block(nx_ + ny_, 0, nz_, nx_) = sf.g;
    reg_ = 1e-12 * (1.0 + base_.cwiseAbs().maxCoeff());
  }

  void factor(const ConeOps& ops, const Scaling& sc) {
    mat_ = base_;
    for (size_t bi = 0; bi < ops.blocks().size(); ++bi) {
      const auto& b = ops.blocks()[bi];
      mat_.block(nx_ + ny_ + b.start, nx_ + ny_ + b.start, b.dim, b.dim) =
          -sc.wtw[bi];
    }
    // Static regularization keeps the factorization alive through redundant
    // equality rows; refinement below solves against the exact matrix. The
    // magnitude is fixed from the scaling-independent blocks: tying it to
    // W'W would blow up near convergence and corrupt the factorization.
    MatrixXd regd = mat_;
    regd.diagonal().head(nx_).array() += reg_;
    regd.diagonal().tail(ny_ + nz_).array() -= reg_;
    lu_.compute(regd);
  }

  VectorXd solve(const VectorXd& rhs) const {
    VectorXd x = lu_.solve(rhs);
    for (int it = 0; it < 2; ++it) {
      const VectorXd res = rhs - mat_ * x;
      x += lu_.solve(res);
    }
    return x;
  }

 private:
  int nx_, ny_, nz_;
  double reg_ = 1e-12;
  MatrixXd base_, mat_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

Scaling identity_scaling(const std::vector<Block>& blocks, int dim) {
  Scaling id;
  id.w.assign(blocks.size(), {});
  id.wtw.assign(blocks.size(), {});
  id.winv.assign(blocks.size(), {});
  id.lambda = VectorXd::Zero(dim);
  for (size_t bi = 0; bi < blocks.size(); ++bi) {
    const int d = blocks[bi].dim;
    id.w[bi] = MatrixXd::Identity(d, d);
    id.wtw[bi] = MatrixXd::Identity(d, d);
    id.winv[bi] = MatrixXd::Identity(d, d);
  }
  return id;
}

}  // namespace

ConicSolution IpmBackend::solve(const ConicProgram& p,
                                const SolveOptions& opts) const {
  {
    std::vector<std::string> hard;
    for (const auto& d : validate(p))
      if (d.find("unbounded direction") == std::string::npos &&
          d.find("is empty") == std::string::npos)
        hard.push_back(d);
    if (!hard.empty()) throw std::invalid_argument("ipm: " + hard.front());
  }
  ConicSolution sol;
  StandardForm sf = to_standard_form(p);
  const int nx = static_cast<int>(sf.c.size());
  const int ny = static_cast<int>(sf.b.size());
  const int nz = static_cast<int>(sf.h.size());

  if (sf.trivially_infeasible) {
    sol.status = SolveStatus::Infeasible;
    sol.primal = VectorXd::Zero(nx);
    VectorXd cert = VectorXd::Zero(sf.orig_eq_rows + nz);
    cert(sf.bad_row) = p.eq_rhs(sf.bad_row) > 0 ? -1.0 : 1.0;
    sol.dual_certificate = cert;
    sol.message = "equality row with zero coefficients and nonzero rhs";
    return sol;
  }

  ConeOps ops(sf.blocks, nz);
  const double deg = ops.degree() + 1.0;
  const double normb = std::max(1.0, sf.b.norm());
  const double normh = std::max(1.0, sf.h.norm());
  const double normc = std::max(1.0, sf.c.norm());

  Kkt kkt(sf);

  VectorXd x = VectorXd::Zero(nx), y = VectorXd::Zero(ny);
  VectorXd s = VectorXd::Zero(nz), z = VectorXd::Zero(nz);
  double tau = 1.0, kappa = 1.0;

  // Initial point: two solves with identity scaling, shifted into the cone.
  kkt.factor(ops, identity_scaling(sf.blocks, nz));
  if (nz > 0) {
    VectorXd rhs = VectorXd::Zero(nx + ny + nz);
    rhs.segment(nx, ny) = sf.b;
    rhs.tail(nz) = sf.h;
    const VectorXd s1 = kkt.solve(rhs);
    x = s1.head(nx);
    y = s1.segment(nx, ny);
    s = -s1.tail(nz);
    const double me_s = ops.min_eig(s);
    if (me_s < 1e-8) s += (1.0 - me_s) * ops.identity();

    VectorXd rhs2 = VectorXd::Zero(nx + ny + nz);
    rhs2.head(nx) = -sf.c;
    const VectorXd s2 = kkt.solve(rhs2);
    z = s2.tail(nz);
    const double me_z = ops.min_eig(z);
    if (me_z < 1e-8) z += (1.0 - me_z) * ops.identity();
  }

  // Certificates are reported in original equality-row coordinates.
  auto expand_cert = [&](const VectorXd& yy, const VectorXd& zz) {
    VectorXd cert = VectorXd::Zero(sf.orig_eq_rows + nz);
    for (size_t k = 0; k < sf.kept_rows.size(); ++k)
      cert(sf.kept_rows[k]) = yy(static_cast<int>(k));
    cert.tail(nz) = zz;
    return cert;
  };

  Scaling sc;
  double best_res = kInf;
  int stall_ = 0;
  VectorXd best_x = VectorXd::Zero(nx);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    sol.iterations = iter;
    const VectorXd rx = sf.a.transpose() * y + sf.g.transpose() * z + sf.c * tau;
    const VectorXd ry = sf.a * x - sf.b * tau;
    const VectorXd rz = sf.g * x + s - sf.h * tau;
    const double rt = sf.c.dot(x) + sf.b.dot(y) + sf.h.dot(z) + kappa;

    const double pcost = sf.c.dot(x) / tau;
    const double dcost = -(sf.b.dot(y) + sf.h.dot(z)) / tau;
    const double gap = nz ? s.dot(z) / (tau * tau) : 0.0;
    const double relgap = gap / std::max(1.0, std::abs(pcost));
    const double pres =
        std::max(ry.norm() / (tau * normb), nz ? rz.norm() / (tau * normh) : 0.0);
    const double dres = rx.norm() / (tau * normc);

    if (std::getenv("SILAS_IPM_TRACE"))
      std::fprintf(stderr, "it=%3d pres=%9.2e dres=%9.2e gap=%9.2e relgap=%9.2e tau=%9.2e kappa=%9.2e\n",
                   iter, pres, dres, gap, relgap, tau, kappa);
    const double track = std::max({pres, dres, relgap});
    if (track < best_res * (1.0 - 1e-3)) {
      best_res = track;
      best_x = x / tau;
      stall_ = 0;
    } else if (++stall_ > 10) {
      sol.status = SolveStatus::NumericalFailure;
      sol.primal = best_x;
      sol.message = "no progress over 10 iterations";
      return sol;
    }

    if (pres <= opts.feas_tol && dres <= opts.feas_tol &&
        (gap <= opts.gap_tol || relgap <= opts.gap_tol)) {
      sol.status = SolveStatus::Optimal;
      sol.primal = x / tau;
      sol.objective_value = pcost + p.objective_constant;
      sol.residuals.duality_gap = std::abs(pcost - dcost);
      sol.dual_certificate = expand_cert(y / tau, z / tau);
      return sol;
    }

    const double by_hz = sf.b.dot(y) + sf.h.dot(z);
    if (by_hz < 0.0) {
      const double pinf =
          (sf.a.transpose() * y + sf.g.transpose() * z).norm() / normc / (-by_hz);
      if (pinf <= opts.feas_tol) {
        sol.status = SolveStatus::Infeasible;
        sol.primal = VectorXd::Zero(nx);
        sol.dual_certificate = expand_cert(y / (-by_hz), z / (-by_hz));
        sol.message = "dual improving ray found";
        return sol;
      }
    }
    const double cx = sf.c.dot(x);
    if (cx < 0.0) {
      const double dinf =
          std::max((sf.a * x).norm() / normb,
                   nz ? (sf.g * x + s).norm() / normh : 0.0) /
          (-cx);
      if (dinf <= opts.feas_tol) {
        sol.status = SolveStatus::Unbounded;
        sol.primal = x / (-cx);
        sol.dual_certificate = sol.primal;
        sol.message = "primal improving ray found";
        return sol;
      }
    }

    if (!ops.compute_scaling(s, z, sc)) {
      sol.status = SolveStatus::NumericalFailure;
      sol.primal = best_x;
      sol.message = "iterate left the cone interior";
      return sol;
    }
    const double mu = (s.dot(z) + tau * kappa) / deg;
    kkt.factor(ops, sc);

    VectorXd rhs1(nx + ny + nz);
    rhs1 << -sf.c, sf.b, sf.h;
    const VectorXd sol1 = kkt.solve(rhs1);
    const double den = sf.c.dot(sol1.head(nx)) +
                       sf.b.dot(sol1.segment(nx, ny)) + sf.h.dot(sol1.tail(nz)) -
                       kappa / tau;

    auto direction = [&](double f, const VectorXd& dcompl, double dtk,
                         VectorXd& dx, VectorXd& dy, VectorXd& dz, VectorXd& ds,
                         double& dtau, double& dkappa) {
      VectorXd rhs(nx + ny + nz);
      rhs.head(nx) = -f * rx;
      rhs.segment(nx, ny) = -f * ry;
      rhs.tail(nz) =
          -f * rz - ops.apply(sc, ConeOps::Op::WT, ops.jsolve(sc.lambda, dcompl));
      const VectorXd s2 = kkt.solve(rhs);
      const double num =
          -f * rt - dtk / tau -
          (sf.c.dot(s2.head(nx)) + sf.b.dot(s2.segment(nx, ny)) +
           sf.h.dot(s2.tail(nz)));
      dtau = num / den;
      dx = s2.head(nx) + dtau * sol1.head(nx);
      dy = s2.segment(nx, ny) + dtau * sol1.segment(nx, ny);
      dz = s2.tail(nz) + dtau * sol1.tail(nz);
      ds = -f * rz - sf.g * dx + sf.h * dtau;
      dkappa = (dtk - kappa * dtau) / tau;
    };

    VectorXd dx, dy, dz, ds;
    double dtau, dkappa;
    const VectorXd ll = ops.jprod(sc.lambda, sc.lambda);
    direction(1.0, -ll, -tau * kappa, dx, dy, dz, ds, dtau, dkappa);

    const VectorXd dz_a = ops.apply(sc, ConeOps::Op::W, dz);
    const VectorXd ds_a = ops.apply(sc, ConeOps::Op::WinvT, ds);
    double t = std::min(ops.max_step(sc.lambda, dz_a),
                        ops.max_step(sc.lambda, ds_a));
    if (dtau < 0.0) t = std::min(t, -tau / dtau);
    if (dkappa < 0.0) t = std::min(t, -kappa / dkappa);
    const double step_aff = std::min(1.0, t);
    const double sigma = std::pow(1.0 - step_aff, 3);

    const VectorXd dcompl =
        sigma * mu * ops.identity() - ll - ops.jprod(ds_a, dz_a);
    const double dtk = sigma * mu - tau * kappa - dtau * dkappa;
    direction(1.0 - sigma, dcompl, dtk, dx, dy, dz, ds, dtau, dkappa);

    const VectorXd dz_c = ops.apply(sc, ConeOps::Op::W, dz);
    const VectorXd ds_c = ops.apply(sc, ConeOps::Op::WinvT, ds);
    t = std::min(ops.max_step(sc.lambda, dz_c), ops.max_step(sc.lambda, ds_c));
    if (dtau < 0.0) t = std::min(t, -tau / dtau);
    if (dkappa < 0.0) t = std::min(t, -kappa / dkappa);
    const double alpha = std::min(1.0, 0.99 * t);
    if (!std::isfinite(alpha) || alpha < 1e-13) {
      sol.status = SolveStatus::NumericalFailure;
      sol.primal = best_x;
      sol.message = "step length collapsed";
      return sol;
    }

    x += alpha * dx;
    y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
  }

  sol.status = SolveStatus::NumericalFailure;
  sol.primal = best_x;
  sol.message = "iteration limit reached";
  return sol;
}

}  // namespace silas
