#include "silas/conic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace silas {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    default: return "numerical_failure";
  }
}

int svec_dim(int side) { return side * (side + 1) / 2; }

Eigen::VectorXd svec(const Eigen::MatrixXd& m) {
  const int p = static_cast<int>(m.rows());
  Eigen::VectorXd v(svec_dim(p));
  int k = 0;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i)
      v(k++) = (i == j) ? m(i, j) : kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v, int side) {
  Eigen::MatrixXd m(side, side);
  int k = 0;
  for (int j = 0; j < side; ++j)
    for (int i = j; i < side; ++i) {
      const double val = (i == j) ? v(k) : v(k) / kSqrt2;
      m(i, j) = val;
      m(j, i) = val;
      ++k;
    }
  return m;
}

std::vector<std::string> validate(const ConicProgram& p) {
  std::vector<std::string> out;
  auto note = [&](const std::string& s) { out.push_back(s); };
  if (p.num_free <= 0) note("program has no variables");
  if (p.objective.size() != p.num_free)
    note("objective length does not match num_free");
  if (p.eq_lhs.rows() != p.eq_rhs.size())
    note("equality right-hand side length does not match row count");
  if (p.eq_lhs.rows() > 0 && p.eq_lhs.cols() != p.num_free)
    note("equality matrix column count does not match num_free");
  int bi = 0;
  for (const auto& c : p.cones) {
    const std::string tag = "cone block " + std::to_string(bi++);
    if (c.dim <= 0) note(tag + " is empty");
    if (c.map.cols() != p.num_free) note(tag + " maps from the wrong variable count");
    const int want = c.kind == ConeKind::Psd ? svec_dim(c.side) : c.dim;
    if (c.map.rows() != c.dim || c.offset.size() != c.dim || c.dim != want)
      note(tag + " has inconsistent dimensions");
  }
  // Variables appearing nowhere but carrying objective weight are
  // syntactically unbounded directions.
  std::vector<bool> touched(std::max(p.num_free, 0), false);
  for (int k = 0; k < p.eq_lhs.outerSize(); ++k)
    for (SpMat::InnerIterator it(p.eq_lhs, k); it; ++it)
      if (it.value() != 0.0) touched[static_cast<size_t>(it.col())] = true;
  for (const auto& c : p.cones)
    for (int k = 0; k < c.map.outerSize(); ++k)
      for (SpMat::InnerIterator it(c.map, k); it; ++it)
        if (it.value() != 0.0) touched[static_cast<size_t>(it.col())] = true;
  if (p.objective.size() == p.num_free)
    for (int i = 0; i < p.num_free; ++i)
      if (!touched[static_cast<size_t>(i)] && p.objective(i) != 0.0)
        note("variable " + std::to_string(i) +
             " is unconstrained but has objective weight (unbounded direction)");
  return out;
}

Residuals measure_residuals(const ConicProgram& p, const Eigen::VectorXd& x) {
  Residuals r;
  if (p.eq_lhs.rows() > 0)
    r.primal_eq = (p.eq_lhs * x - p.eq_rhs).cwiseAbs().maxCoeff();
  for (const auto& c : p.cones) {
    const Eigen::VectorXd v = c.map * x + c.offset;
    double viol = 0.0;
    switch (c.kind) {
      case ConeKind::Nonnegative:
        viol = std::max(0.0, -v.minCoeff());
        break;
      case ConeKind::SecondOrder:
        viol = std::max(0.0, v.tail(v.size() - 1).norm() - v(0));
        break;
      case ConeKind::Psd: {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat(v, c.side),
                                                          Eigen::EigenvaluesOnly);
        viol = std::max(0.0, -es.eigenvalues().minCoeff());
        break;
      }
    }
    r.cone_violation = std::max(r.cone_violation, viol);
  }
  return r;
}

ConicSolution solve(const ConicProgram& p, const SolveOptions& opts,
                    const SolverBackend& backend) {
  ConicSolution sol = backend.solve(p, opts);
  if (sol.status == SolveStatus::Optimal) {
    const Residuals measured = measure_residuals(p, sol.primal);
    const double eq_scale =
        1.0 + (p.eq_rhs.size() ? p.eq_rhs.cwiseAbs().maxCoeff() : 0.0);
    double cone_scale = 1.0;
    for (const auto& c : p.cones)
      if (c.offset.size())
        cone_scale = std::max(cone_scale, c.offset.cwiseAbs().maxCoeff());
    const double tol_eq = opts.feas_tol * eq_scale;
    const double tol_cone = opts.feas_tol * cone_scale;
    Residuals combined = measured;
    combined.duality_gap = sol.residuals.duality_gap;
    sol.residuals = combined;
    sol.feas_tol_used = std::max(tol_eq, tol_cone);
    if (measured.primal_eq > tol_eq || measured.cone_violation > tol_cone) {
      sol.status = SolveStatus::NumericalFailure;
      sol.message = "backend reported optimal but measured residuals exceed tolerance";
    }
    sol.objective_value = p.objective.dot(sol.primal) + p.objective_constant;
  }
  return sol;
}

std::string dump_program_json(const ConicProgram& p) {
  nlohmann::json j;
  j["num_free"] = p.num_free;
  j["objective_constant"] = p.objective_constant;
  nlohmann::json obj = nlohmann::json::array();
  for (int i = 0; i < p.objective.size(); ++i)
    if (p.objective(i) != 0.0) obj.push_back({i, p.objective(i)});
  j["objective"] = obj;
  auto triplets = [](const SpMat& m) {
    nlohmann::json t = nlohmann::json::array();
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it)
        t.push_back({it.row(), it.col(), it.value()});
    return t;
  };
  j["equalities"] = {{"triplets", triplets(p.eq_lhs)},
                     {"rhs", std::vector<double>(p.eq_rhs.data(),
                                                 p.eq_rhs.data() + p.eq_rhs.size())}};
  nlohmann::json cones = nlohmann::json::array();
  for (const auto& c : p.cones) {
    nlohmann::json cj;
    cj["kind"] = c.kind == ConeKind::Nonnegative   ? "nonneg"
                 : c.kind == ConeKind::SecondOrder ? "soc"
                                                   : "psd";
    cj["dim"] = c.dim;
    if (c.kind == ConeKind::Psd) cj["side"] = c.side;
    cj["triplets"] = triplets(c.map);
    cj["offset"] =
        std::vector<double>(c.offset.data(), c.offset.data() + c.offset.size());
    cones.push_back(cj);
  }
  j["cones"] = cones;
  return j.dump(2);
}

int ProgramBuilder::add_vars(int count) {
  const int first = num_vars_;
  num_vars_ += count;
  return first;
}

void ProgramBuilder::add_objective_term(int var, double coeff) {
  objective_.emplace_back(var, coeff);
}

void ProgramBuilder::add_objective_constant(double c) { obj_const_ += c; }

int ProgramBuilder::add_equality(const std::vector<std::pair<int, double>>& lhs,
                                 double rhs) {
  const int row = static_cast<int>(eq_rhs_.size());
  for (const auto& [v, c] : lhs)
    if (c != 0.0) eq_triplets_.emplace_back(row, v, c);
  eq_rhs_.push_back(rhs);
  return row;
}

void ProgramBuilder::add_nonneg(std::vector<AffineRow> rows) {
  cones_.push_back({ConeKind::Nonnegative, 0, std::move(rows), -1});
}

void ProgramBuilder::add_second_order(std::vector<AffineRow> rows) {
  cones_.push_back({ConeKind::SecondOrder, 0, std::move(rows), -1});
}

int ProgramBuilder::add_psd_vars(int side) {
  const int first = add_vars(svec_dim(side));
  cones_.push_back({ConeKind::Psd, side, {}, first});
  return first;
}

ConicProgram ProgramBuilder::build() const {
  ConicProgram p;
  p.num_free = num_vars_;
  p.objective = Eigen::VectorXd::Zero(num_vars_);
  for (const auto& [v, c] : objective_) p.objective(v) += c;
  p.objective_constant = obj_const_;
  p.eq_lhs.resize(static_cast<int>(eq_rhs_.size()), num_vars_);
  p.eq_lhs.setFromTriplets(eq_triplets_.begin(), eq_triplets_.end());
  p.eq_rhs = Eigen::Map<const Eigen::VectorXd>(eq_rhs_.data(),
                                               static_cast<long>(eq_rhs_.size()));
  for (const auto& pc : cones_) {
    ConeBlock b;
    b.kind = pc.kind;
    if (pc.kind == ConeKind::Psd) {
      b.side = pc.side;
      b.dim = svec_dim(pc.side);
      std::vector<Triplet> t;
      t.reserve(b.dim);
      for (int i = 0; i < b.dim; ++i) t.emplace_back(i, pc.var_offset + i, 1.0);
      b.map.resize(b.dim, num_vars_);
      b.map.setFromTriplets(t.begin(), t.end());
      b.offset = Eigen::VectorXd::Zero(b.dim);
    } else {
      b.dim = static_cast<int>(pc.rows.size());
      b.offset = Eigen::VectorXd::Zero(b.dim);
      std::vector<Triplet> t;
      for (int i = 0; i < b.dim; ++i) {
        b.offset(i) = pc.rows[i].offset;
        for (const auto& [v, c] : pc.rows[i].terms)
          if (c != 0.0) t.emplace_back(i, v, c);
      }
      b.map.resize(b.dim, num_vars_);
      b.map.setFromTriplets(t.begin(), t.end());
    }
    p.cones.push_back(std::move(b));
  }
  return p;
}

}  // namespace silas
