#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace silas {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class ConeKind { Nonnegative, SecondOrder, Psd };

/// One cone block: map(x) + offset must lie in the cone. PSD blocks live in
/// scaled-lower-triangular vectorization (off-diagonals times sqrt(2)), so
/// the block dimension is side*(side+1)/2.
struct ConeBlock {
  ConeKind kind = ConeKind::Nonnegative;
  int dim = 0;   // rows of the block in cone space
  int side = 0;  // PSD only
  SpMat map;     // dim x num_free
  Eigen::VectorXd offset;
};

/// Solver-agnostic program: min objective . x  s.t.  eq_lhs x = eq_rhs and
/// every cone block constraint holds.
struct ConicProgram {
  int num_free = 0;
  Eigen::VectorXd objective;
  double objective_constant = 0.0;
  SpMat eq_lhs;  // rows x num_free
  Eigen::VectorXd eq_rhs;
  std::vector<ConeBlock> cones;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(SolveStatus s);

struct Residuals {
  double primal_eq = 0.0;      // max |eq_lhs x - eq_rhs|
  double cone_violation = 0.0; // max cone-membership violation of map(x)+offset
  double duality_gap = 0.0;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd primal;
  double objective_value = 0.0;
  /// Improving ray (y stacked with z) for Infeasible, ray x for Unbounded.
  std::optional<Eigen::VectorXd> dual_certificate;
  Residuals residuals;
  double feas_tol_used = 0.0;
  int iterations = 0;
  std::string message;
};

struct SolveOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iters = 200;
};

/// Backend contract. Implementations must be safe to call concurrently on
/// distinct program objects unless documented otherwise.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual ConicSolution solve(const ConicProgram& p, const SolveOptions& opts) const = 0;
  virtual std::string name() const = 0;
};

/// Dense Nesterov-Todd scaled homogeneous-self-dual interior-point backend
/// (nonnegative, second-order and PSD cones). Stateless and reentrant.
class IpmBackend final : public SolverBackend {
 public:
  ConicSolution solve(const ConicProgram& p, const SolveOptions& opts) const override;
  std::string name() const override { return "ipm"; }
};

/// Brute-force reference for tiny programs (num_free <= 3), used by tests
/// to cross-check the production backend. Refined grid search with exact
/// cone membership checks.
class ReferenceBackend final : public SolverBackend {
 public:
  explicit ReferenceBackend(double box_radius = 10.0) : radius_(box_radius) {}
  ConicSolution solve(const ConicProgram& p, const SolveOptions& opts) const override;
  std::string name() const override { return "reference"; }

 private:
  double radius_;
};

/// Structural diagnostics; an empty list means the program is well-formed.
std::vector<std::string> validate(const ConicProgram& p);

/// Solve with independent post-hoc residual measurement: an Optimal status
/// from the backend is downgraded to NumericalFailure when the re-measured
/// residuals exceed the (scale-adjusted) feasibility tolerance.
ConicSolution solve(const ConicProgram& p, const SolveOptions& opts = {},
                    const SolverBackend& backend = IpmBackend{});

/// Residuals of a candidate primal point, measured from scratch.
Residuals measure_residuals(const ConicProgram& p, const Eigen::VectorXd& x);

/// Debug dump in a documented sparse-triplet JSON format.
std::string dump_program_json(const ConicProgram& p);

/// Incrementally assembles a ConicProgram. Variables are indexed from 0.
class ProgramBuilder {
 public:
  int add_vars(int count);
  int num_vars() const { return num_vars_; }

  void add_objective_term(int var, double coeff);
  void add_objective_constant(double c);

  /// lhs . x = rhs, lhs given as (var, coeff) pairs; returns the row index.
  int add_equality(const std::vector<std::pair<int, double>>& lhs, double rhs);
  int num_eq_rows() const { return static_cast<int>(eq_rhs_.size()); }

  /// Affine rows entering a cone. Each row is offset + sum coeff*var.
  struct AffineRow {
    std::vector<std::pair<int, double>> terms;
    double offset = 0.0;
  };
  void add_nonneg(std::vector<AffineRow> rows);
  void add_second_order(std::vector<AffineRow> rows);
  /// New svec variables forming a PSD block of the given side; returns the
  /// index of the first variable.
  int add_psd_vars(int side);

  ConicProgram build() const;

 private:
  int num_vars_ = 0;
  std::vector<std::pair<int, double>> objective_;
  double obj_const_ = 0.0;
  std::vector<Triplet> eq_triplets_;
  std::vector<double> eq_rhs_;
  struct PendingCone {
    ConeKind kind;
    int side;
    std::vector<AffineRow> rows;
    int var_offset;  // PSD identity blocks
  };
  std::vector<PendingCone> cones_;
};

/// svec/smat helpers for the scaled-lower-triangular PSD vectorization.
int svec_dim(int side);
Eigen::VectorXd svec(const Eigen::MatrixXd& m);
Eigen::MatrixXd smat(const Eigen::VectorXd& v, int side);

}  // namespace silas
