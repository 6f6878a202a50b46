#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "silas/dynamics.hpp"
#include "silas/gedmd.hpp"
#include "silas/sos.hpp"

namespace silas {

struct Hyperparams {
  double alpha = 1.0;
  double beta = 100.0;
  double kappa = 0.1;
  double eps1 = 0.1;
  double eps2 = 0.01;
  double eps3 = 0.01;
  double eps4 = 1e-6;
  Mat lambda;  // n x n invertible; empty = derive from data (0.1 * Lambda0)
  Vec mu;
  int d_f = 3;
  int d_v = 2;
  int max_rounds = 5;  // K
  double conv_tol = 1e-6;

  void validate(int n) const;

  /// Named presets: "cubic" (dense low-dimensional runs, K=5),
  /// "sweep" (chaotic benchmark sweeps, K=1, data-derived scaling),
  /// "rom" (reduced-order models, K=1, kappa=10).
  static Hyperparams profile(const std::string& name);
};

/// Shared polynomial bases of one family: zeta (degree d_f), phi (d_v),
/// theta (d_v + d_f - 1).
struct SilasBases {
  PolyBasis zeta, phi, theta;
};

SilasBases make_bases(int n, const Hyperparams& h, BasisKind kind,
                      const Mat& scale0, const Vec& shift0);

struct BoundednessCertificate {
  Vec u;
  double b = 0.0;
  double c = 0.0;
  double alpha = 1.0;
  Mat lambda;
  Vec mu;
  GramCertificate gram_lyap;
  GramCertificate gram_coercive;
  bool verified = false;
  PolyBasis phi_basis;
  PolyBasis theta_basis;

  Poly lyapunov() const { return Poly(phi_basis, u); }
};

struct LearnedModel {
  VectorField field;
  BoundednessCertificate certificate;
  Hyperparams hyper;
  double fit_rmse = 0.0;
  int iterations_run = 0;
  std::vector<double> objective_trace;
  bool monotone_trace = true;
  bool steps_verified = true;
  std::string dataset_hash;
  std::string created_at;
};

/// Thrown when a conic solve that must succeed does not; carries the
/// program dump for diagnosis.
struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& what, ConicSolution sol, std::string dump)
      : std::runtime_error(what), solution(std::move(sol)),
        program_dump(std::move(dump)) {}
  ConicSolution solution;
  std::string program_dump;
};

enum class LyapInitMode { Exact, Penalized };

struct LyapunovInit {
  Vec u;
  double b = 0.0;
  LyapInitMode mode = LyapInitMode::Exact;
  GramCertificate gram_coercive;
  GramCertificate gram_lyap;  // data-driven constraint, Exact mode only
};

/// Data-driven Lyapunov discovery: minimize |b| subject to coercivity and
/// the generator-approximated Lyapunov SOS constraint; falls back to the
/// always-feasible penalized variant when infeasible.
LyapunovInit discover_lyapunov(const GeneratorMatrix& g, const Hyperparams& h,
                               const SolveOptions& opts = {});

struct FStepResult {
  Mat f_coeffs;  // n x zeta.size()
  double b = 0.0;
  double c = 0.0;
  double objective = 0.0;
  GramCertificate gram_lyap;
};

/// Convex step over (F, b, c) for fixed u: least-squares fit plus the
/// shared regularizers under the Lyapunov SOS and box constraints. The fit
/// norm is compressed through the Gram matrix of the dictionary, so the
/// cone dimension is independent of the sample count.
FStepResult monster_F_step(const Dataset& d, const Vec& u, const Hyperparams& h,
                           const SilasBases& bases, const SolveOptions& opts = {});

struct UStepResult {
  Vec u;
  double b = 0.0;
  double objective = 0.0;
  GramCertificate gram_lyap;
  GramCertificate gram_coercive;
};

/// Convex step over (u, b) for fixed (F, c).
UStepResult monster_u_step(const Dataset& d, const Mat& f_coeffs, double c,
                           const Hyperparams& h, const SilasBases& bases,
                           const SolveOptions& opts = {});

struct SilasOptions {
  BasisKind basis_kind = BasisKind::Chebyshev;
  std::optional<std::pair<Mat, Vec>> basis_scaling;  // Lambda0, mu0
  double pinv_tol = 1e-10;
  SolveOptions solver;
};

/// The full alternating scheme: generator regression, Lyapunov
/// initialization, then max_rounds of F-step / u-step with certificate
/// verification after every block step.
LearnedModel run_silas(const Dataset& d, const Hyperparams& h,
                       const SilasOptions& opts = {});

struct Ellipsoid {
  Mat lambda;
  Vec mu;
  double level = 0.0;  // {x : ||lambda x + mu||^2 <= level}

  bool contains(const Vec& x, double slack = 1e-12) const {
    return (lambda * x + mu).squaredNorm() <= level + slack;
  }
  /// Radius of the circumscribed ball around the center.
  double bounding_radius() const;
};

/// Ellipsoid enclosing the absorbing set {v <= b/c}; empty when c = 0
/// (monotone-decay regime, no absorbing set claimed).
std::optional<Ellipsoid> absorbing_ellipsoid(const BoundednessCertificate& cert);

/// Max absolute coefficient of <h_f, grad h_v> for the leading homogeneous
/// parts, scaled by 1 + the magnitude of <f, grad v>.
double lossless_residual(const VectorField& f, const Poly& v);

struct GronwallReport {
  int trajectories = 0;
  int violations = 0;
  double max_violation = 0.0;  // worst excess over the decay envelope
};

/// Integrates the learned field from random states with c*v(x0) up to
/// level_factor * b and checks c*v(x(t)) <= b + (c*v(x0) - b) e^{-tc/alpha}
/// pointwise with tolerance 1e-4 * (1 + b).
GronwallReport gronwall_check(const LearnedModel& m, int num_ics,
                              double level_factor, std::uint64_t seed);

}  // namespace silas
