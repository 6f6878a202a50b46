#pragma once

#include <doctest.h>

#include <random>
#include <utility>
#include <vector>

#include "silas/poly.hpp"

namespace testutil {

using silas::Mat;
using silas::MultiIndex;
using silas::Poly;
using silas::PolyBasis;
using silas::Vec;
using silas::VectorField;

inline Poly make_poly(int n, int d,
                      const std::vector<std::pair<MultiIndex, double>>& terms) {
  PolyBasis b = PolyBasis::monomial(n, d);
  Vec c = Vec::Zero(b.size());
  for (const auto& [mi, v] : terms) c(b.index_of(mi)) += v;
  return Poly(b, c);
}

// f* of the planar cubic benchmark, identity-scaled monomial basis.
inline VectorField cubic_field() {
  PolyBasis b = PolyBasis::monomial(2, 3);
  Mat f = Mat::Zero(2, b.size());
  auto set = [&](int row, MultiIndex mi, double v) { f(row, b.index_of(mi)) = v; };
  set(0, {1, 0}, 1.0);
  set(0, {0, 1}, -1.0);
  set(0, {1, 2}, -1.0);
  set(0, {0, 3}, 1.0);
  set(1, {1, 0}, 1.0);
  set(1, {0, 1}, 1.0);
  set(1, {2, 1}, -1.0);
  set(1, {3, 0}, -1.0);
  return VectorField(b, f);
}

// Quartic Lyapunov function certifying the cubic benchmark.
inline Poly quartic_lyapunov() {
  return make_poly(2, 4,
                   {{{2, 0}, 1.0},
                    {{0, 2}, 1.0},
                    {{4, 0}, 1.0 / 3.0},
                    {{3, 1}, 1.0 / 3.0},
                    {{1, 3}, -1.0 / 3.0},
                    {{0, 4}, 1.0 / 3.0}});
}

inline Poly random_poly(const PolyBasis& b, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec c(b.size());
  for (int i = 0; i < c.size(); ++i) c(i) = g(rng);
  return Poly(b, c);
}

inline Vec random_point(int n, std::mt19937_64& rng, double radius = 1.0) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Vec x(n);
  for (int i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

}  // namespace testutil
