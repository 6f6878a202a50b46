#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "silas/gedmd.hpp"
#include "silas/poly.hpp"

namespace silas {

/// Right-hand side of an autonomous ODE.
using OdeRhs = std::function<Vec(const Vec&)>;

/// Catalog entry. The closed-form evaluator and the coefficient matrix are
/// defined independently so tests can cross-check them.
struct BenchmarkSystem {
  std::string name;
  int n = 0;
  VectorField field;
  OdeRhs evaluator;
  Vec default_x0;
  double characteristic_time = 1.0;
  double settle_time = 0.0;  // transient to discard before sampling
  int recommended_degree = 2;
};

const std::vector<BenchmarkSystem>& benchmark_catalog();
const BenchmarkSystem& find_system(const std::string& name);

struct Trajectory {
  Vec times;   // strictly increasing, uniform when produced by the sampler
  Mat states;  // m x n
  bool blown_up = false;
  bool truncated = false;  // stopped early by the evaluation budget

  int size() const { return static_cast<int>(times.size()); }
  int dim() const { return static_cast<int>(states.cols()); }
};

struct IntegrateOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double blowup_norm = 1e8;
  long max_rhs_evals = 400000000L;  // budget; exceeding it truncates
};

/// Adaptive Dormand-Prince 4(5) sampled on the uniform grid t0, t0+dt, ...,
/// t0 + steps*dt (the integrator lands on each output time exactly).
Trajectory integrate(const OdeRhs& rhs, const Vec& x0, double t0, double t1,
                     double dt, const IntegrateOptions& opts = {});
Trajectory integrate(const VectorField& f, const Vec& x0, double t0, double t1,
                     double dt, const IntegrateOptions& opts = {});

/// Gaussian state noise with E||delta|| = level * ||x|| per sample,
/// deterministic under the seed.
Trajectory add_noise(const Trajectory& t, double level, std::uint64_t seed);

/// Order-8 central-difference stencil coefficients a_{-4..4} for the first
/// derivative (multiply by 1/h); solved from the moment system at startup.
const Eigen::Matrix<double, 9, 1>& fd8_stencil();

/// Rate-of-change estimation with the order-8 stencil; the four samples at
/// each end are dropped and uniform weights 1/m attached.
Dataset fd8_derivatives(const Trajectory& t);

struct DataScaling {
  Mat lambda0;  // diagonal
  Vec mu0;
  Mat lambda;   // shrink * lambda0
  Vec mu;       // shrink * mu0
  std::vector<int> floored_dims;  // zero-extent dimensions that were guarded
};

/// Box scaling from training data: z -> Lambda0^{-1}(z - mu0) maps the
/// hypercube [-1,1]^n to a box bounding the data with a buffer.
DataScaling scaling_from_data(const Mat& states, double shrink = 0.1);

struct ErrorStats {
  double mean = 0.0;
  double max = 0.0;
  int skipped = 0;  // test points with ||f*|| below tolerance
  Vec per_point;    // relative errors at the retained points
};

/// Relative vector-field error ||f*(x) - f(x)|| / ||f*(x)|| over test points.
ErrorStats evaluate_error(const OdeRhs& model, const OdeRhs& truth,
                          const Mat& test_points, double zero_tol = 1e-12);

/// Uniform grid over a box, one row per point.
Mat grid_points(const Vec& lo, const Vec& hi, int per_axis);

}  // namespace silas
