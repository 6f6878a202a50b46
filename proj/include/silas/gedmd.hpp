#pragma once

#include "silas/poly.hpp"

namespace silas {

/// Weighted state / rate-of-change samples. Rows of x and y are paired;
/// weights are positive and finite (validated on construction).
struct Dataset {
  Mat x;  // m x n
  Mat y;  // m x n
  Vec w;  // m

  Dataset() = default;
  Dataset(Mat x_in, Mat y_in, Vec w_in);
  /// Uniform weights 1/m.
  Dataset(Mat x_in, Mat y_in);

  int size() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

struct GeneratorMatrix {
  Mat g;  // p x q
  PolyBasis phi_basis;
  PolyBasis theta_basis;
  int rank_used = 0;
  double pinv_tol = 0.0;
};

struct RegressionMatrices {
  Mat a;  // p x m, entries <y_i, grad phi_j(x_i)>
  Mat b;  // q x m, entries theta_k(x_i)
  Vec w;  // m
};

RegressionMatrices build_regression(const Dataset& d, const PolyBasis& phi,
                                    const PolyBasis& theta);

/// Weighted least-squares estimate of the generator action on the phi
/// dictionary: G = (A W B') (B W B')^+, pseudoinverse by eigenvalue
/// truncation at pinv_tol relative to the largest eigenvalue.
GeneratorMatrix fit_generator(const Dataset& d, const PolyBasis& phi,
                              const PolyBasis& theta, double pinv_tol = 1e-10);

/// u' G as a polynomial over the theta basis: the data-driven estimate of
/// <f, grad <u, phi>>.
Poly generator_apply(const GeneratorMatrix& g, const Vec& u);

}  // namespace silas
