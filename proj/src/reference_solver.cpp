#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "silas/conic.hpp"

// Refined grid search for programs with at most three variables. Only a
// test oracle: cone membership is checked exactly (eigenvalues for PSD
// blocks) and infeasibility is penalized with a large exact-penalty weight,
// so the search converges to the constrained minimum as the grid refines.

namespace silas {

ConicSolution ReferenceBackend::solve(const ConicProgram& p,
                                      const SolveOptions& opts) const {
  if (p.num_free > 3)
    throw std::invalid_argument("reference backend handles at most 3 variables");
  const int n = p.num_free;
  const double penalty = 1e6;
  const int pts = 21;

  Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
  double radius = radius_;
  Eigen::VectorXd best = center;
  double best_score = std::numeric_limits<double>::infinity();

  auto score_of = [&](const Eigen::VectorXd& x) {
    const Residuals r = measure_residuals(p, x);
    return p.objective.dot(x) + penalty * (r.primal_eq + r.cone_violation);
  };

  for (int round = 0; round < 14; ++round) {
    const double step = 2.0 * radius / (pts - 1);
    Eigen::VectorXd x(n);
    std::vector<int> idx(n, 0);
    bool done = false;
    while (!done) {
      for (int i = 0; i < n; ++i) x(i) = center(i) - radius + idx[i] * step;
      const double sc = score_of(x);
      if (sc < best_score) {
        best_score = sc;
        best = x;
      }
      int k = 0;
      while (k < n && ++idx[k] == pts) idx[k++] = 0;
      done = k == n;
    }
    center = best;
    radius = 2.5 * step;
  }

  ConicSolution sol;
  const Residuals r = measure_residuals(p, best);
  if (r.primal_eq + r.cone_violation > 1e-4) {
    sol.status = SolveStatus::Infeasible;
    sol.primal = best;
    sol.message = "no feasible point found by grid refinement";
    return sol;
  }
  sol.status = SolveStatus::Optimal;
  sol.primal = best;
  sol.objective_value = p.objective.dot(best) + p.objective_constant;
  sol.residuals = r;
  sol.feas_tol_used = opts.feas_tol;
  return sol;
}

}  // namespace silas
