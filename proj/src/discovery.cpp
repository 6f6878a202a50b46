#include "silas/discovery.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace silas {

namespace {

std::vector<int> var_range(int first, int count) {
  std::vector<int> ids(count);
  for (int i = 0; i < count; ++i) ids[i] = first + i;
  return ids;
}

// Coefficients of a lower-degree same-family polynomial inside a larger
// graded basis (the smaller basis is a prefix of the larger one).
Vec embed_coeffs(const Vec& c, const PolyBasis& target) {
  Vec out = Vec::Zero(target.size());
  out.head(c.size()) = c;
  return out;
}

ConicSolution solve_or_throw(const ConicProgram& p, const SolveOptions& opts,
                             const char* what) {
  ConicSolution sol = solve(p, opts);
  if (sol.status != SolveStatus::Optimal)
    throw SolverFailure(std::string(what) + ": solver returned " +
                            to_string(sol.status) +
                            (sol.message.empty() ? "" : " (" + sol.message + ")"),
                        sol, dump_program_json(p));
  return sol;
}

double fit_norm(const Dataset& d, const PolyBasis& zeta, const Mat& f) {
  double acc = 0.0;
  for (int i = 0; i < d.size(); ++i)
    acc += (f * zeta.eval_all(d.x.row(i).transpose()) - d.y.row(i).transpose())
               .squaredNorm();
  return std::sqrt(acc);
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

void Hyperparams::validate(int n) const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("Hyperparams: ") + name +
                                  " must be positive");
  };
  positive(alpha, "alpha");
  positive(beta, "beta");
  positive(kappa, "kappa");
  positive(eps1, "eps1");
  positive(eps2, "eps2");
  positive(eps3, "eps3");
  positive(eps4, "eps4");
  positive(conv_tol, "conv_tol");
  if (d_f < 1) throw std::invalid_argument("Hyperparams: d_f must be >= 1");
  if (d_v < 2 || d_v % 2 != 0)
    throw std::invalid_argument("Hyperparams: d_v must be even and >= 2");
  if (max_rounds < 1) throw std::invalid_argument("Hyperparams: K must be >= 1");
  if (lambda.size() > 0) {
    if (lambda.rows() != n || lambda.cols() != n || mu.size() != n)
      throw std::invalid_argument("Hyperparams: Lambda/mu dimension mismatch");
    Eigen::FullPivLU<Mat> lu(lambda);
    if (!lu.isInvertible())
      throw std::invalid_argument("Hyperparams: Lambda must be invertible");
  }
}

Hyperparams Hyperparams::profile(const std::string& name) {
  Hyperparams h;
  if (name == "cubic") {
    h.alpha = 1.0;
    h.beta = 100.0;
    h.kappa = 0.1;
    h.eps1 = 0.1;
    h.eps2 = 0.01;
    h.eps3 = 0.01;
    h.eps4 = 1e-6;
    h.lambda = 0.4 * Mat::Identity(2, 2);
    h.mu = Vec::Zero(2);
    h.d_f = 3;
    h.d_v = 4;
    h.max_rounds = 5;
  } else if (name == "sweep") {
    h.alpha = 0.1;
    h.beta = 1e6;
    h.kappa = 0.1;
    h.eps1 = h.eps2 = h.eps3 = 0.01;
    h.eps4 = 1e-6;
    h.d_f = 2;
    h.d_v = 2;
    h.max_rounds = 1;
  } else if (name == "rom") {
    h.alpha = 1.0;
    h.beta = 1e6;
    h.kappa = 10.0;
    h.eps1 = h.eps2 = h.eps3 = 0.01;
    h.eps4 = 1e-6;
    h.d_f = 3;
    h.d_v = 2;
    h.max_rounds = 1;
  } else {
    throw std::invalid_argument("unknown hyperparameter profile: " + name);
  }
  return h;
}

SilasBases make_bases(int n, const Hyperparams& h, BasisKind kind,
                      const Mat& scale0, const Vec& shift0) {
  SilasBases b;
  b.zeta = PolyBasis(n, h.d_f, kind, scale0, shift0);
  b.phi = PolyBasis(n, h.d_v, kind, scale0, shift0);
  b.theta = PolyBasis(n, h.d_v + h.d_f - 1, kind, scale0, shift0);
  return b;
}

LyapunovInit discover_lyapunov(const GeneratorMatrix& g, const Hyperparams& h,
                               const SolveOptions& opts) {
  const PolyBasis& phi = g.phi_basis;
  const PolyBasis& theta = g.theta_basis;
  const int n = phi.n();
  h.validate(n);
  if (phi.degree() != h.d_v || theta.degree() != h.d_v + h.d_f - 1)
    throw std::invalid_argument("discover_lyapunov: generator bases do not match degrees");
  const int p = phi.size();
  const int q = theta.size();

  // Shared pieces of both formulations.
  auto lyap_target = [&](const std::vector<int>& u_ids, int b_var) {
    AffinePoly t;
    t.basis = theta;
    t.constant = Vec::Zero(q);
    t.var_ids = u_ids;
    t.var_ids.push_back(b_var);
    t.var_coeffs = Mat::Zero(q, p + 1);
    for (int j = 0; j < p; ++j) {
      Vec col = -h.alpha * g.g.row(j).transpose();
      col(j) -= 1.0;
      t.var_coeffs.col(j) = col;
    }
    t.var_coeffs(0, p) = 1.0;  // + b on the constant entry
    return t;
  };

  {
    ProgramBuilder pb;
    const int u0 = pb.add_vars(p);
    const int bvar = pb.add_vars(1);
    const int tvar = pb.add_vars(1);
    const auto u_ids = var_range(u0, p);
    pb.add_objective_term(tvar, 1.0);
    pb.add_nonneg({{{{tvar, 1.0}, {bvar, -1.0}}, 0.0},
                   {{{tvar, 1.0}, {bvar, 1.0}}, 0.0}});
    auto coer = coercivity_constraint(u_ids, phi, h.lambda, h.mu);
    auto hc = compile_sos(coer, pb);
    auto lyap = make_sos_constraint("lyapunov-data", lyap_target(u_ids, bvar));
    auto hl = compile_sos(lyap, pb);
    auto prog = pb.build();
    ConicSolution sol = solve(prog, opts);
    if (sol.status == SolveStatus::Optimal) {
      LyapunovInit out;
      out.u = sol.primal.segment(u0, p);
      out.b = sol.primal(bvar);
      out.mode = LyapInitMode::Exact;
      out.gram_coercive = verify_certificate(coer, extract_gram(hc, sol.primal), sol.primal);
      out.gram_lyap = verify_certificate(lyap, extract_gram(hl, sol.primal), sol.primal);
      return out;
    }
    if (sol.status != SolveStatus::Infeasible)
      throw SolverFailure("discover_lyapunov: solver returned " +
                              to_string(sol.status) +
                              (sol.message.empty() ? "" : " (" + sol.message + ")"),
                          sol, dump_program_json(prog));
  }

  // Penalized fallback: minimize |b| + kappa * || b - <u, phi + alpha G
  // theta> - sigma || with sigma a free SOS polynomial; always feasible.
  ProgramBuilder pb;
  const int u0 = pb.add_vars(p);
  const int bvar = pb.add_vars(1);
  const int tb = pb.add_vars(1);
  const int tr = pb.add_vars(1);
  const auto u_ids = var_range(u0, p);
  pb.add_objective_term(tb, 1.0);
  pb.add_objective_term(tr, h.kappa);
  pb.add_nonneg({{{{tb, 1.0}, {bvar, -1.0}}, 0.0},
                 {{{tb, 1.0}, {bvar, 1.0}}, 0.0}});
  auto coer = coercivity_constraint(u_ids, phi, h.lambda, h.mu);
  auto hc = compile_sos(coer, pb);
  const PolyBasis sigma_gram = theta.with_degree(theta.degree() / 2);
  const int s0 = pb.add_psd_vars(sigma_gram.size());
  const Mat e = gram_expansion_matrix(sigma_gram, theta);
  // Residual rows: b e0 - sum_j u_j (e_j + alpha G_j) - E svec(sigma).
  std::vector<ProgramBuilder::AffineRow> soc;
  soc.push_back({{{tr, 1.0}}, 0.0});
  for (int k = 0; k < q; ++k) {
    ProgramBuilder::AffineRow row;
    if (k == 0) row.terms.emplace_back(bvar, 1.0);
    for (int j = 0; j < p; ++j) {
      double coef = -h.alpha * g.g(j, k);
      if (j == k) coef -= 1.0;
      if (coef != 0.0) row.terms.emplace_back(u0 + j, coef);
    }
    for (int l = 0; l < e.cols(); ++l)
      if (e(k, l) != 0.0) row.terms.emplace_back(s0 + l, -e(k, l));
    soc.push_back(std::move(row));
  }
  pb.add_second_order(std::move(soc));
  auto prog = pb.build();
  ConicSolution sol = solve_or_throw(prog, opts, "discover_lyapunov(penalized)");
  LyapunovInit out;
  out.u = sol.primal.segment(u0, p);
  out.b = sol.primal(bvar);
  out.mode = LyapInitMode::Penalized;
  out.gram_coercive = verify_certificate(coer, extract_gram(hc, sol.primal), sol.primal);
  return out;
}

namespace {

// Compressed least-squares data: ||F L - N||_F^2 + delta equals the stacked
// squared fit residual for every F.
struct FitCompression {
  Mat l;       // r x rank
  Mat n;       // n x rank
  double delta = 0.0;
};

FitCompression compress_fit(const Dataset& d, const PolyBasis& zeta) {
  const int r = zeta.size();
  Mat c = Mat::Zero(r, r);
  Mat m = Mat::Zero(d.dim(), r);
  double e = 0.0;
  for (int i = 0; i < d.size(); ++i) {
    const Vec z = zeta.eval_all(d.x.row(i).transpose());
    c.selfadjointView<Eigen::Lower>().rankUpdate(z);
    m += d.y.row(i).transpose() * z.transpose();
    e += d.y.row(i).squaredNorm();
  }
  c = c.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Mat> es(c);
  const Vec ev = es.eigenvalues();
  const double cut = 1e-13 * std::max(ev.maxCoeff(), 1e-300);
  int rank = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) ++rank;
  FitCompression out;
  out.l.resize(r, rank);
  out.n.resize(d.dim(), rank);
  int at = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) <= cut) continue;
    const double sq = std::sqrt(ev(i));
    out.l.col(at) = es.eigenvectors().col(i) * sq;
    out.n.col(at) = m * es.eigenvectors().col(i) / sq;
    ++at;
  }
  out.delta = std::max(0.0, e - out.n.squaredNorm());
  return out;
}

}  // namespace

FStepResult monster_F_step(const Dataset& d, const Vec& u, const Hyperparams& h,
                           const SilasBases& bases, const SolveOptions& opts) {
  const int n = d.dim();
  h.validate(n);
  const int r = bases.zeta.size();
  const int q = bases.theta.size();
  if (u.size() != bases.phi.size())
    throw std::invalid_argument("monster_F_step: u length != phi size");

  const Poly v(bases.phi, u);
  const auto grads = poly_grad(v);
  const Vec v_theta = embed_coeffs(u, bases.theta);

  // Columns of the Lyapunov target for each F entry: -alpha zeta_k dv/dx_i.
  Mat pcols(q, n * r);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < r; ++k) {
      const Poly prod = poly_mul(Poly::basis_function(bases.zeta, k), grads[i]);
      pcols.col(i * r + k) = embed_coeffs(prod.coeffs(), bases.theta);
    }

  ProgramBuilder pb;
  const int f0 = pb.add_vars(n * r);
  const int cvar = pb.add_vars(1);
  const int bvar = pb.add_vars(1);
  const int tfit = pb.add_vars(1);
  const int tc = pb.add_vars(1);
  const int tb = pb.add_vars(1);
  const int s0 = pb.add_vars(n * r);

  pb.add_objective_term(tfit, 1.0);
  pb.add_objective_term(tc, h.eps1);
  pb.add_objective_term(tb, h.eps3);
  for (int i = 0; i < n * r; ++i) pb.add_objective_term(s0 + i, h.eps2);
  pb.add_objective_constant(h.eps4 * u.cwiseAbs().sum());

  // Fit cone, compressed through the dictionary Gram matrix.
  const FitCompression fc = compress_fit(d, bases.zeta);
  {
    std::vector<ProgramBuilder::AffineRow> soc;
    soc.push_back({{{tfit, 1.0}}, 0.0});
    const int rank = static_cast<int>(fc.l.cols());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < rank; ++j) {
        ProgramBuilder::AffineRow row;
        for (int k = 0; k < r; ++k)
          if (fc.l(k, j) != 0.0) row.terms.emplace_back(f0 + i * r + k, fc.l(k, j));
        row.offset = -fc.n(i, j);
        soc.push_back(std::move(row));
      }
    soc.push_back({{}, std::sqrt(fc.delta)});
    pb.add_second_order(std::move(soc));
  }

  // Epigraphs, box and l1 splits. The beta rows are scaled by 1/beta so the
  // cone data stays O(1).
  std::vector<ProgramBuilder::AffineRow> nn;
  nn.push_back({{{tc, 1.0}, {cvar, -1.0}}, 1.0});   // tc - (c-1) >= 0
  nn.push_back({{{tc, 1.0}, {cvar, 1.0}}, -1.0});   // tc + (c-1) >= 0
  nn.push_back({{{tb, 1.0}, {bvar, -1.0}}, 0.0});
  nn.push_back({{{tb, 1.0}, {bvar, 1.0}}, 0.0});
  nn.push_back({{{cvar, 1.0}}, 0.0});
  nn.push_back({{{cvar, -1.0}}, 1.0});
  nn.push_back({{{cvar, 1.0}, {bvar, -1.0 / h.beta}}, 0.0});
  nn.push_back({{{cvar, 1.0}, {bvar, 1.0 / h.beta}}, 0.0});
  for (int i = 0; i < n * r; ++i) {
    nn.push_back({{{s0 + i, 1.0}, {f0 + i, -1.0}}, 0.0});
    nn.push_back({{{s0 + i, 1.0}, {f0 + i, 1.0}}, 0.0});
  }
  pb.add_nonneg(std::move(nn));

  AffinePoly target;
  target.basis = bases.theta;
  target.constant = Vec::Zero(q);
  target.var_ids = var_range(f0, n * r);
  target.var_ids.push_back(cvar);
  target.var_ids.push_back(bvar);
  target.var_coeffs = Mat::Zero(q, n * r + 2);
  target.var_coeffs.leftCols(n * r) = -h.alpha * pcols;
  target.var_coeffs.col(n * r) = -v_theta;
  target.var_coeffs(0, n * r + 1) = 1.0;
  auto lyap = make_sos_constraint("lyapunov", target);
  auto hl = compile_sos(lyap, pb);

  auto prog = pb.build();
  ConicSolution sol = solve_or_throw(prog, opts, "monster_F_step");
  FStepResult out;
  out.f_coeffs.resize(n, r);
  for (int i = 0; i < n; ++i)
    out.f_coeffs.row(i) = sol.primal.segment(f0 + i * r, r).transpose();
  out.c = sol.primal(cvar);
  out.b = sol.primal(bvar);
  out.objective = sol.objective_value;
  out.gram_lyap = verify_certificate(lyap, extract_gram(hl, sol.primal), sol.primal);
  return out;
}

UStepResult monster_u_step(const Dataset& d, const Mat& f_coeffs, double c,
                           const Hyperparams& h, const SilasBases& bases,
                           const SolveOptions& opts) {
  const int n = d.dim();
  h.validate(n);
  const int p = bases.phi.size();
  const int q = bases.theta.size();
  if (f_coeffs.rows() != n || f_coeffs.cols() != bases.zeta.size())
    throw std::invalid_argument("monster_u_step: F shape mismatch");

  const VectorField field(bases.zeta, f_coeffs);
  Mat lie_cols(q, p);
  for (int j = 0; j < p; ++j) {
    const Poly lie = lie_derivative(field, Poly::basis_function(bases.phi, j));
    lie_cols.col(j) = embed_coeffs(lie.coeffs(), bases.theta);
  }

  ProgramBuilder pb;
  const int u0 = pb.add_vars(p);
  const int bvar = pb.add_vars(1);
  const int tb = pb.add_vars(1);
  const int s0 = pb.add_vars(p);
  const auto u_ids = var_range(u0, p);

  pb.add_objective_term(tb, h.eps3);
  for (int i = 0; i < p; ++i) pb.add_objective_term(s0 + i, h.eps4);
  pb.add_objective_constant(fit_norm(d, bases.zeta, f_coeffs) +
                            h.eps1 * std::abs(c - 1.0) +
                            h.eps2 * f_coeffs.cwiseAbs().sum());

  std::vector<ProgramBuilder::AffineRow> nn;
  nn.push_back({{{tb, 1.0}, {bvar, -1.0}}, 0.0});
  nn.push_back({{{tb, 1.0}, {bvar, 1.0}}, 0.0});
  nn.push_back({{{bvar, -1.0 / h.beta}}, c});
  nn.push_back({{{bvar, 1.0 / h.beta}}, c});
  for (int i = 0; i < p; ++i) {
    nn.push_back({{{s0 + i, 1.0}, {u0 + i, -1.0}}, 0.0});
    nn.push_back({{{s0 + i, 1.0}, {u0 + i, 1.0}}, 0.0});
  }
  pb.add_nonneg(std::move(nn));

  auto coer = coercivity_constraint(u_ids, bases.phi, h.lambda, h.mu);
  auto hc = compile_sos(coer, pb);

  AffinePoly target;
  target.basis = bases.theta;
  target.constant = Vec::Zero(q);
  target.var_ids = u_ids;
  target.var_ids.push_back(bvar);
  target.var_coeffs = Mat::Zero(q, p + 1);
  for (int j = 0; j < p; ++j) {
    Vec col = -h.alpha * lie_cols.col(j);
    col(j) -= c;
    target.var_coeffs.col(j) = col;
  }
  target.var_coeffs(0, p) = 1.0;
  auto lyap = make_sos_constraint("lyapunov", target);
  auto hl = compile_sos(lyap, pb);

  auto prog = pb.build();
  ConicSolution sol = solve_or_throw(prog, opts, "monster_u_step");
  UStepResult out;
  out.u = sol.primal.segment(u0, p);
  out.b = sol.primal(bvar);
  out.objective = sol.objective_value;
  out.gram_lyap = verify_certificate(lyap, extract_gram(hl, sol.primal), sol.primal);
  out.gram_coercive = verify_certificate(coer, extract_gram(hc, sol.primal), sol.primal);
  return out;
}

LearnedModel run_silas(const Dataset& d, const Hyperparams& h_in,
                       const SilasOptions& opts) {
  const int n = d.dim();
  Hyperparams h = h_in;
  Mat scale0;
  Vec shift0;
  if (opts.basis_scaling) {
    scale0 = opts.basis_scaling->first;
    shift0 = opts.basis_scaling->second;
  } else {
    const DataScaling sc = scaling_from_data(d.x);
    scale0 = sc.lambda0;
    shift0 = sc.mu0;
    if (h.lambda.size() == 0) {
      h.lambda = sc.lambda;
      h.mu = sc.mu;
    }
  }
  if (h.lambda.size() == 0) {
    const DataScaling sc = scaling_from_data(d.x);
    h.lambda = sc.lambda;
    h.mu = sc.mu;
  }
  h.validate(n);
  const SilasBases bases = make_bases(n, h, opts.basis_kind, scale0, shift0);

  const GeneratorMatrix gen =
      fit_generator(d, bases.phi, bases.theta, opts.pinv_tol);
  const LyapunovInit init = discover_lyapunov(gen, h, opts.solver);

  LearnedModel model;
  model.hyper = h;
  model.created_at = timestamp_now();
  model.steps_verified = init.gram_coercive.verified;

  Vec u = init.u;
  Mat f_coeffs;
  double b = init.b, c = 0.0;
  GramCertificate gram_lyap, gram_coercive = init.gram_coercive;
  double prev_obj = std::numeric_limits<double>::infinity();
  int rounds = 0;

  for (int k = 1; k <= h.max_rounds; ++k) {
    FStepResult fs = monster_F_step(d, u, h, bases, opts.solver);
    model.steps_verified = model.steps_verified && fs.gram_lyap.verified;
    model.objective_trace.push_back(fs.objective);

    UStepResult us = monster_u_step(d, fs.f_coeffs, fs.c, h, bases, opts.solver);
    model.steps_verified = model.steps_verified && us.gram_lyap.verified &&
                           us.gram_coercive.verified;
    model.objective_trace.push_back(us.objective);

    u = us.u;
    b = us.b;
    c = fs.c;
    f_coeffs = fs.f_coeffs;
    gram_lyap = us.gram_lyap;
    gram_coercive = us.gram_coercive;
    rounds = k;

    if (k >= 2 &&
        std::abs(us.objective - prev_obj) < h.conv_tol * (1.0 + std::abs(prev_obj)))
      break;
    prev_obj = us.objective;
  }

  // Monotonicity of the shared objective along the trace.
  for (size_t i = 1; i < model.objective_trace.size(); ++i) {
    const double a = model.objective_trace[i - 1];
    const double bb = model.objective_trace[i];
    if (bb > a + 1e-7 * (1.0 + std::abs(a))) model.monotone_trace = false;
  }

  model.field = VectorField(bases.zeta, f_coeffs);
  model.fit_rmse = fit_norm(d, bases.zeta, f_coeffs) / std::sqrt(double(d.size()));
  model.iterations_run = rounds;

  BoundednessCertificate cert;
  cert.u = u;
  cert.b = b;
  cert.c = c;
  cert.alpha = h.alpha;
  cert.lambda = h.lambda;
  cert.mu = h.mu;
  cert.gram_lyap = gram_lyap;
  cert.gram_coercive = gram_coercive;
  cert.phi_basis = bases.phi;
  cert.theta_basis = bases.theta;
  cert.verified = gram_lyap.verified && gram_coercive.verified;
  model.certificate = cert;
  return model;
}

double Ellipsoid::bounding_radius() const {
  Eigen::JacobiSVD<Mat> svd(lambda);
  const double smin = svd.singularValues().minCoeff();
  return std::sqrt(std::max(level, 0.0)) / smin;
}

std::optional<Ellipsoid> absorbing_ellipsoid(const BoundednessCertificate& cert) {
  if (!(cert.c > 0.0)) return std::nullopt;
  Ellipsoid e;
  e.lambda = cert.lambda;
  e.mu = cert.mu;
  e.level = std::max(cert.b, 0.0) / cert.c;
  return e;
}

double lossless_residual(const VectorField& f, const Poly& v) {
  const int n = f.basis().n();
  const int df = f.basis().degree();
  const int dv = v.basis().degree();
  PolyBasis mono_f = PolyBasis::monomial(n, df);
  Mat hf = Mat::Zero(n, mono_f.size());
  for (int i = 0; i < n; ++i) {
    const Poly lead = leading_homogeneous(f.component(i), df);
    hf.row(i) = embed_coeffs(lead.coeffs(), mono_f).transpose();
  }
  const Poly hv = leading_homogeneous(v, dv).embedded(dv);
  const Poly top = lie_derivative(VectorField(mono_f, hf), hv);

  const Poly full = lie_derivative(
      change_basis_field(f, PolyBasis::monomial(n, df)),
      change_basis(v, PolyBasis::monomial(n, dv)));
  return top.max_abs_coeff() / (1.0 + full.max_abs_coeff());
}

GronwallReport gronwall_check(const LearnedModel& m, int num_ics,
                              double level_factor, std::uint64_t seed) {
  GronwallReport rep;
  const auto& cert = m.certificate;
  if (!(cert.c > 0.0)) return rep;
  const double b = std::max(cert.b, 0.0);
  const double c = cert.c;
  const double alpha = cert.alpha;
  const Poly v = cert.lyapunov();
  const int n = cert.phi_basis.n();
  const double tol = 1e-4 * (1.0 + b);
  const double vmax = level_factor * std::max(b, 1e-6) / c;

  const Mat lam_inv = cert.lambda.inverse();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const double t_end = std::min(20.0, 5.0 * alpha / c);
  const int steps = 250;
  int made = 0, guard = 0;
  while (made < num_ics && guard < 100000) {
    ++guard;
    Vec dir(n);
    for (int i = 0; i < n; ++i) dir(i) = gauss(rng);
    dir.normalize();
    const double rad = std::sqrt(vmax) * std::pow(unif(rng), 1.0 / n);
    const Vec x0 = lam_inv * (rad * dir - cert.mu);
    if (v.eval(x0) > vmax) continue;
    ++made;
    IntegrateOptions io;
    io.rel_tol = 1e-7;
    io.abs_tol = 1e-10;
    io.max_rhs_evals = 300000;  // distant starts can be stiff; a shorter
                                // horizon still checks the envelope pointwise
    Trajectory tr = integrate(m.field, x0, 0.0, t_end, t_end / steps, io);
    bool violated = tr.blown_up;
    double worst = tr.blown_up ? std::numeric_limits<double>::infinity() : 0.0;
    const double v0 = c * v.eval(x0);
    for (int i = 0; i < tr.size() && !tr.blown_up; ++i) {
      const double vt = c * v.eval(tr.states.row(i).transpose());
      const double envelope =
          b + (v0 - b) * std::exp(-tr.times(i) * c / alpha) + tol;
      if (vt > envelope) {
        violated = true;
        worst = std::max(worst, vt - envelope);
      }
    }
    ++rep.trajectories;
    if (violated) ++rep.violations;
    rep.max_violation = std::max(rep.max_violation, worst);
  }
  return rep;
}

}  // namespace silas
