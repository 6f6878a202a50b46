#include "silas/dynamics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace silas {

namespace {

VectorField field_from_terms(
    int n, int d,
    const std::vector<std::tuple<int, MultiIndex, double>>& terms) {
  PolyBasis b = PolyBasis::monomial(n, d);
  Mat f = Mat::Zero(n, b.size());
  for (const auto& [row, mi, c] : terms) f(row, b.index_of(mi)) += c;
  return VectorField(b, f);
}

std::vector<BenchmarkSystem> build_catalog() {
  std::vector<BenchmarkSystem> out;

  {
    BenchmarkSystem s;
    s.name = "cubic";
    s.n = 2;
    s.field = field_from_terms(2, 3,
                               {{0, {1, 0}, 1.0},
                                {0, {0, 1}, -1.0},
                                {0, {1, 2}, -1.0},
                                {0, {0, 3}, 1.0},
                                {1, {1, 0}, 1.0},
                                {1, {0, 1}, 1.0},
                                {1, {2, 1}, -1.0},
                                {1, {3, 0}, -1.0}});
    s.evaluator = [](const Vec& x) {
      Vec f(2);
      f(0) = x(0) - x(1) - x(0) * x(1) * x(1) + x(1) * x(1) * x(1);
      f(1) = x(0) + x(1) - x(0) * x(0) * x(1) - x(0) * x(0) * x(0);
      return f;
    };
    s.default_x0 = (Vec(2) << 2.0, 0.0).finished();
    s.characteristic_time = 6.3;
    s.settle_time = 25.0;
    s.recommended_degree = 3;
    out.push_back(std::move(s));
  }
  {
    BenchmarkSystem s;
    s.name = "lorenz";
    s.n = 3;
    const double sig = 10.0, rho = 28.0, beta = 8.0 / 3.0;
    s.field = field_from_terms(3, 2,
                               {{0, {1, 0, 0}, -sig},
                                {0, {0, 1, 0}, sig},
                                {1, {1, 0, 0}, rho},
                                {1, {0, 1, 0}, -1.0},
                                {1, {1, 0, 1}, -1.0},
                                {2, {1, 1, 0}, 1.0},
                                {2, {0, 0, 1}, -beta}});
    s.evaluator = [=](const Vec& x) {
      Vec f(3);
      f(0) = sig * (x(1) - x(0));
      f(1) = x(0) * (rho - x(2)) - x(1);
      f(2) = x(0) * x(1) - beta * x(2);
      return f;
    };
    s.default_x0 = (Vec(3) << -8.0, 7.0, 27.0).finished();
    s.characteristic_time = 1.5;
    s.settle_time = 10.0;
    s.recommended_degree = 2;
    out.push_back(std::move(s));
  }
  {
    BenchmarkSystem s;
    s.name = "rossler";
    s.n = 3;
    const double a = 0.2, b = 0.2, c = 5.7;
    s.field = field_from_terms(3, 2,
                               {{0, {0, 1, 0}, -1.0},
                                {0, {0, 0, 1}, -1.0},
                                {1, {1, 0, 0}, 1.0},
                                {1, {0, 1, 0}, a},
                                {2, {0, 0, 0}, b},
                                {2, {0, 0, 1}, -c},
                                {2, {1, 0, 1}, 1.0}});
    s.evaluator = [=](const Vec& x) {
      Vec f(3);
      f(0) = -x(1) - x(2);
      f(1) = x(0) + a * x(1);
      f(2) = b + x(2) * (x(0) - c);
      return f;
    };
    s.default_x0 = (Vec(3) << -5.0, 0.0, 0.0).finished();
    s.characteristic_time = 6.0;
    s.settle_time = 80.0;
    s.recommended_degree = 2;
    out.push_back(std::move(s));
  }
  {
    BenchmarkSystem s;
    s.name = "chen";
    s.n = 3;
    const double a = 35.0, b = 3.0, c = 28.0;
    s.field = field_from_terms(3, 2,
                               {{0, {1, 0, 0}, -a},
                                {0, {0, 1, 0}, a},
                                {1, {1, 0, 0}, c - a},
                                {1, {1, 0, 1}, -1.0},
                                {1, {0, 1, 0}, c},
                                {2, {1, 1, 0}, 1.0},
                                {2, {0, 0, 1}, -b}});
    s.evaluator = [=](const Vec& x) {
      Vec f(3);
      f(0) = a * (x(1) - x(0));
      f(1) = (c - a) * x(0) - x(0) * x(2) + c * x(1);
      f(2) = x(0) * x(1) - b * x(2);
      return f;
    };
    s.default_x0 = (Vec(3) << -3.0, 2.0, 20.0).finished();
    s.characteristic_time = 0.6;
    s.settle_time = 10.0;
    s.recommended_degree = 2;
    out.push_back(std::move(s));
  }
  {
    BenchmarkSystem s;
    s.name = "halvorsen";
    s.n = 3;
    const double a = 1.4;
    s.field = field_from_terms(3, 2,
                               {{0, {1, 0, 0}, -a},
                                {0, {0, 1, 0}, -4.0},
                                {0, {0, 0, 1}, -4.0},
                                {0, {0, 2, 0}, -1.0},
                                {1, {0, 1, 0}, -a},
                                {1, {0, 0, 1}, -4.0},
                                {1, {1, 0, 0}, -4.0},
                                {1, {0, 0, 2}, -1.0},
                                {2, {0, 0, 1}, -a},
                                {2, {1, 0, 0}, -4.0},
                                {2, {0, 1, 0}, -4.0},
                                {2, {2, 0, 0}, -1.0}});
    s.evaluator = [=](const Vec& x) {
      Vec f(3);
      f(0) = -a * x(0) - 4.0 * x(1) - 4.0 * x(2) - x(1) * x(1);
      f(1) = -a * x(1) - 4.0 * x(2) - 4.0 * x(0) - x(2) * x(2);
      f(2) = -a * x(2) - 4.0 * x(0) - 4.0 * x(1) - x(0) * x(0);
      return f;
    };
    s.default_x0 = (Vec(3) << -5.0, 0.0, 0.0).finished();
    s.characteristic_time = 1.6;
    s.settle_time = 20.0;
    s.recommended_degree = 2;
    out.push_back(std::move(s));
  }
  {
    BenchmarkSystem s;
    s.name = "rucklidge";
    s.n = 3;
    const double kappa = 2.0, lam = 6.7;
    s.field = field_from_terms(3, 2,
                               {{0, {1, 0, 0}, -kappa},
                                {0, {0, 1, 0}, lam},
                                {0, {0, 1, 1}, -1.0},
                                {1, {1, 0, 0}, 1.0},
                                {2, {0, 0, 1}, -1.0},
                                {2, {0, 2, 0}, 1.0}});
    s.evaluator = [=](const Vec& x) {
      Vec f(3);
      f(0) = -kappa * x(0) + lam * x(1) - x(1) * x(2);
      f(1) = x(0);
      f(2) = -x(2) + x(1) * x(1);
      return f;
    };
    s.default_x0 = (Vec(3) << 1.0, 0.0, 4.5).finished();
    s.characteristic_time = 3.0;
    s.settle_time = 30.0;
    s.recommended_degree = 2;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

const std::vector<BenchmarkSystem>& benchmark_catalog() {
  static const std::vector<BenchmarkSystem> catalog = build_catalog();
  return catalog;
}

const BenchmarkSystem& find_system(const std::string& name) {
  for (const auto& s : benchmark_catalog())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown benchmark system: " + name);
}

namespace {

// Dormand-Prince 4(5) coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 35.0 / 384 - 5179.0 / 57600,
                 kE3 = 500.0 / 1113 - 7571.0 / 16695,
                 kE4 = 125.0 / 192 - 393.0 / 640,
                 kE5 = -2187.0 / 6784 + 92097.0 / 339200,
                 kE6 = 11.0 / 84 - 187.0 / 2100, kE7 = -1.0 / 40;

// One adaptive segment from t to t_end; x is updated in place. Returns
// +1 on success, 0 on blow-up, -1 when the evaluation budget ran out.
int advance(const OdeRhs& rhs, Vec& x, double t, double t_end,
            const IntegrateOptions& o, double& h, long& evals) {
  const int n = static_cast<int>(x.size());
  Vec k1 = rhs(x), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  evals += 1;
  while (t < t_end) {
    if (evals > o.max_rhs_evals) return -1;
    evals += 6;
    if (!std::isfinite(h) || h <= 0) h = (t_end - t) * 0.1;
    h = std::min(h, t_end - t);
    const Vec x2 = x + h * kA21 * k1;
    k2 = rhs(x2);
    const Vec x3 = x + h * (kA31 * k1 + kA32 * k2);
    k3 = rhs(x3);
    const Vec x4 = x + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
    k4 = rhs(x4);
    const Vec x5 = x + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
    k5 = rhs(x5);
    const Vec x6 =
        x + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
    k6 = rhs(x6);
    const Vec xnew =
        x + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    k7 = rhs(xnew);
    const Vec err =
        h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
    double enorm = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc =
          o.abs_tol + o.rel_tol * std::max(std::abs(x(i)), std::abs(xnew(i)));
      enorm += (err(i) / sc) * (err(i) / sc);
    }
    enorm = std::sqrt(enorm / n);
    if (enorm <= 1.0 || h <= 1e-14 * std::max(1.0, std::abs(t))) {
      t += h;
      x = xnew;
      k1 = k7;  // first-same-as-last
      if (!x.allFinite() || x.norm() > o.blowup_norm) return 0;
    }
    const double fac =
        std::clamp(0.9 * std::pow(std::max(enorm, 1e-12), -0.2), 0.2, 5.0);
    h *= fac;
  }
  return 1;
}

}  // namespace

Trajectory integrate(const OdeRhs& rhs, const Vec& x0, double t0, double t1,
                     double dt, const IntegrateOptions& opts) {
  if (dt <= 0.0 || !std::isfinite(t1 - t0) || t1 < t0)
    throw std::invalid_argument("integrate: bad time span or step");
  const int steps = static_cast<int>(std::round((t1 - t0) / dt));
  Trajectory tr;
  tr.times.resize(steps + 1);
  tr.states.resize(steps + 1, x0.size());
  Vec x = x0;
  double h = dt * 0.1;
  long evals = 0;
  tr.times(0) = t0;
  tr.states.row(0) = x.transpose();
  for (int i = 1; i <= steps; ++i) {
    const double ta = t0 + (i - 1) * dt, tb = t0 + i * dt;
    const int rc = advance(rhs, x, ta, tb, opts, h, evals);
    if (rc != 1) {
      tr.times.conservativeResize(i);
      tr.states.conservativeResize(i, x0.size());
      tr.blown_up = rc == 0;
      tr.truncated = rc == -1;
      return tr;
    }
    tr.times(i) = tb;
    tr.states.row(i) = x.transpose();
  }
  return tr;
}

Trajectory integrate(const VectorField& f, const Vec& x0, double t0, double t1,
                     double dt, const IntegrateOptions& opts) {
  return integrate([&f](const Vec& x) { return f.eval(x); }, x0, t0, t1, dt,
                   opts);
}

Trajectory add_noise(const Trajectory& t, double level, std::uint64_t seed) {
  if (level < 0.0) throw std::invalid_argument("add_noise: negative level");
  Trajectory out = t;
  if (level == 0.0) return out;
  const int n = t.dim();
  // E||delta|| for delta ~ N(0, I_n) is sqrt(2) Gamma((n+1)/2) / Gamma(n/2).
  const double chi_mean = std::sqrt(2.0) *
                          std::exp(std::lgamma((n + 1) / 2.0) - std::lgamma(n / 2.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < t.size(); ++i) {
    const double sigma = level * t.states.row(i).norm() / chi_mean;
    for (int j = 0; j < n; ++j) out.states(i, j) += sigma * gauss(rng);
  }
  return out;
}

const Eigen::Matrix<double, 9, 1>& fd8_stencil() {
  static const Eigen::Matrix<double, 9, 1> weights = [] {
    Eigen::Matrix<double, 9, 9> moments;
    for (int j = 0; j < 9; ++j)
      for (int k = -4; k <= 4; ++k)
        moments(j, k + 4) = std::pow(static_cast<double>(k), j);
    Eigen::Matrix<double, 9, 1> rhs = Eigen::Matrix<double, 9, 1>::Zero();
    rhs(1) = 1.0;
    return Eigen::Matrix<double, 9, 1>(moments.fullPivLu().solve(rhs));
  }();
  return weights;
}

Dataset fd8_derivatives(const Trajectory& t) {
  const int m = t.size();
  if (m < 9) throw std::invalid_argument("fd8_derivatives: need at least 9 samples");
  const double h = t.times(1) - t.times(0);
  for (int i = 1; i < m; ++i)
    if (std::abs(t.times(i) - t.times(i - 1) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::invalid_argument("fd8_derivatives: non-uniform sampling");
  const auto& w = fd8_stencil();
  const int kept = m - 8;
  Mat x(kept, t.dim()), y(kept, t.dim());
  for (int i = 4; i < m - 4; ++i) {
    x.row(i - 4) = t.states.row(i);
    Vec dy = Vec::Zero(t.dim());
    for (int k = -4; k <= 4; ++k)
      dy += w(k + 4) * t.states.row(i + k).transpose();
    y.row(i - 4) = (dy / h).transpose();
  }
  return Dataset(std::move(x), std::move(y));
}

DataScaling scaling_from_data(const Mat& states, double shrink) {
  if (states.rows() == 0) throw std::invalid_argument("scaling_from_data: empty data");
  const int n = static_cast<int>(states.cols());
  DataScaling out;
  out.lambda0 = Mat::Zero(n, n);
  out.mu0 = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    double lo = states.col(k).minCoeff();
    double hi = states.col(k).maxCoeff();
    if (hi - lo <= 1e-9) {
      out.floored_dims.push_back(k);
      const double mid = 0.5 * (hi + lo);
      lo = mid - 0.5e-9;
      hi = mid + 0.5e-9;
    }
    const double den = 4.0 * (hi - lo) + std::abs(hi) + std::abs(lo);
    out.lambda0(k, k) = 8.0 / den;
    out.mu0(k) = -(4.0 * (hi + lo) + std::abs(hi) - std::abs(lo)) / den;
  }
  out.lambda = shrink * out.lambda0;
  out.mu = shrink * out.mu0;
  return out;
}

ErrorStats evaluate_error(const OdeRhs& model, const OdeRhs& truth,
                          const Mat& test_points, double zero_tol) {
  ErrorStats st;
  std::vector<double> errs;
  errs.reserve(test_points.rows());
  for (int i = 0; i < test_points.rows(); ++i) {
    const Vec x = test_points.row(i).transpose();
    const Vec ft = truth(x);
    const double nt = ft.norm();
    if (nt <= zero_tol) {
      ++st.skipped;
      continue;
    }
    errs.push_back((model(x) - ft).norm() / nt);
  }
  st.per_point = Eigen::Map<Vec>(errs.data(), static_cast<long>(errs.size()));
  if (!errs.empty()) {
    st.mean = st.per_point.mean();
    st.max = st.per_point.maxCoeff();
  }
  return st;
}

Mat grid_points(const Vec& lo, const Vec& hi, int per_axis) {
  const int n = static_cast<int>(lo.size());
  long total = 1;
  for (int i = 0; i < n; ++i) total *= per_axis;
  Mat out(total, n);
  std::vector<int> idx(n, 0);
  for (long r = 0; r < total; ++r) {
    for (int i = 0; i < n; ++i)
      out(r, i) =
          lo(i) + (hi(i) - lo(i)) * (per_axis == 1 ? 0.5 : idx[i] / double(per_axis - 1));
    int k = 0;
    while (k < n && ++idx[k] == per_axis) idx[k++] = 0;
  }
  return out;
}

}  // namespace silas
