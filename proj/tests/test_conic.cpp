#include <doctest.h>

#include <cmath>

#include "silas/conic.hpp"

using namespace silas;
using Row = ProgramBuilder::AffineRow;

namespace {

ConicProgram min_x_subject_x_ge_1() {
  ProgramBuilder b;
  const int x = b.add_vars(1);
  b.add_objective_term(x, 1.0);
  b.add_nonneg({Row{{{x, 1.0}}, -1.0}});  // x - 1 >= 0
  return b.build();
}

}  // namespace

TEST_CASE("lp: min x s.t. x >= 1") {
  auto sol = solve(min_x_subject_x_ge_1());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("psd feasibility: [[x,1],[1,x]] >= 0, min x -> 1") {
  ProgramBuilder b;
  const int x = b.add_vars(1);
  b.add_objective_term(x, 1.0);
  const int q = b.add_psd_vars(2);
  // Tie the Gram entries to [[x,1],[1,x]] in svec form (x, sqrt2, x).
  b.add_equality({{q + 0, 1.0}, {x, -1.0}}, 0.0);
  b.add_equality({{q + 1, 1.0}}, std::sqrt(2.0));
  b.add_equality({{q + 2, 1.0}, {x, -1.0}}, 0.0);
  auto sol = solve(b.build());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("infeasible lp: x >= 1 and -x >= 0") {
  ProgramBuilder b;
  const int x = b.add_vars(1);
  b.add_objective_term(x, 1.0);
  b.add_nonneg({Row{{{x, 1.0}}, -1.0}, Row{{{x, -1.0}}, 0.0}});
  auto sol = solve(b.build());
  REQUIRE(sol.status == SolveStatus::Infeasible);
  CHECK(sol.dual_certificate.has_value());
}

TEST_CASE("unbounded lp: min -x s.t. x >= 0") {
  ProgramBuilder b;
  const int x = b.add_vars(1);
  b.add_objective_term(x, -1.0);
  b.add_nonneg({Row{{{x, 1.0}}, 0.0}});
  auto sol = solve(b.build());
  CHECK(sol.status == SolveStatus::Unbounded);
}

TEST_CASE("socp: min t s.t. t >= ||(x-3, 4)||, x free") {
  ProgramBuilder b;
  const int t = b.add_vars(1);
  const int x = b.add_vars(1);
  b.add_objective_term(t, 1.0);
  b.add_second_order(
      {Row{{{t, 1.0}}, 0.0}, Row{{{x, 1.0}}, -3.0}, Row{{}, 4.0}});
  auto sol = solve(b.build());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal(t) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(sol.primal(x) == doctest::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("sdp with equalities: min tr(CX), X psd, tr(X) = 1") {
  // C = diag(2, 1); optimum picks the smaller eigenvalue: objective 1.
  ProgramBuilder b;
  const int q = b.add_psd_vars(2);
  b.add_objective_term(q + 0, 2.0);
  b.add_objective_term(q + 2, 1.0);
  b.add_equality({{q + 0, 1.0}, {q + 2, 1.0}}, 1.0);
  auto sol = solve(b.build());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.primal(q + 2) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("reported residuals are reproducible from the primal vector") {
  auto p = min_x_subject_x_ge_1();
  auto sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  const Residuals re = measure_residuals(p, sol.primal);
  CHECK(std::abs(re.primal_eq - sol.residuals.primal_eq) <= 1e-9);
  CHECK(std::abs(re.cone_violation - sol.residuals.cone_violation) <= 1e-9);
}

TEST_CASE("objective scaling leaves the argmin unchanged") {
  ProgramBuilder b;
  const int t = b.add_vars(1);
  const int x = b.add_vars(1);
  b.add_objective_term(t, 1.0);
  b.add_second_order({Row{{{t, 1.0}}, 0.0}, Row{{{x, 1.0}}, -2.0}});
  b.add_nonneg({Row{{{x, 1.0}}, 0.0}});
  auto p1 = b.build();
  ConicProgram p2 = p1;
  p2.objective *= 50.0;
  auto s1 = solve(p1), s2 = solve(p2);
  REQUIRE(s1.status == SolveStatus::Optimal);
  REQUIRE(s2.status == SolveStatus::Optimal);
  CHECK((s1.primal - s2.primal).cwiseAbs().maxCoeff() <= 1e-5);
  CHECK(s2.objective_value ==
        doctest::Approx(50.0 * s1.objective_value).epsilon(1e-6));
}

TEST_CASE("validate reports structural diagnostics") {
  ProgramBuilder b;
  const int x = b.add_vars(1);
  b.add_objective_term(x, 1.0);
  b.add_nonneg({Row{{{x, 1.0}}, 0.0}});
  auto good = b.build();
  CHECK(validate(good).empty());

  ConicProgram bad_rhs = good;
  bad_rhs.eq_rhs = Eigen::VectorXd::Ones(2);  // rhs without matching rows
  CHECK(!validate(bad_rhs).empty());

  ConicProgram bad_psd = good;
  ConeBlock cb;
  cb.kind = ConeKind::Psd;
  cb.side = 2;
  cb.dim = 2;  // wrong: svec dimension of side 2 is 3
  cb.map = SpMat(2, good.num_free);
  cb.offset = Eigen::VectorXd::Zero(2);
  bad_psd.cones.push_back(cb);
  CHECK(!validate(bad_psd).empty());

  ConicProgram loose = good;
  loose.num_free = 2;
  loose.objective = Eigen::VectorXd::Zero(2);
  loose.objective(1) = 1.0;  // variable 1 appears nowhere
  loose.eq_lhs.conservativeResize(0, 2);
  for (auto& c : loose.cones) c.map.conservativeResize(c.map.rows(), 2);
  CHECK(validate(loose).size() == 1);
}

TEST_CASE("trivially infeasible equality row 0 = 1") {
  ProgramBuilder b;
  const int x = b.add_vars(1);
  b.add_objective_term(x, 1.0);
  b.add_nonneg({Row{{{x, 1.0}}, 0.0}});
  b.add_equality({}, 1.0);
  auto sol = solve(b.build());
  CHECK(sol.status == SolveStatus::Infeasible);
  CHECK(sol.dual_certificate.has_value());
}

TEST_CASE("reference backend agrees with the ipm on tiny programs") {
  ReferenceBackend ref;
  SolveOptions opts;
  auto p = min_x_subject_x_ge_1();
  auto a = solve(p, opts);
  auto r = ref.solve(p, opts);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(std::abs(a.objective_value - r.objective_value) <= 1e-3);

  // min x + y s.t. x >= 0.5, y >= -1, x + 2y >= 0
  ProgramBuilder b;
  const int x = b.add_vars(2);
  b.add_objective_term(x, 1.0);
  b.add_objective_term(x + 1, 1.0);
  b.add_nonneg({Row{{{x, 1.0}}, -0.5}, Row{{{x + 1, 1.0}}, 1.0},
                Row{{{x, 1.0}, {x + 1, 2.0}}, 0.0}});
  auto p2 = b.build();
  auto a2 = solve(p2, opts);
  auto r2 = ref.solve(p2, opts);
  REQUIRE(a2.status == SolveStatus::Optimal);
  REQUIRE(r2.status == SolveStatus::Optimal);
  CHECK(std::abs(a2.objective_value - r2.objective_value) <= 1e-2);
}

TEST_CASE("program dump serializes without loss of structure") {
  auto p = min_x_subject_x_ge_1();
  const std::string dump = dump_program_json(p);
  CHECK(dump.find("\"cones\"") != std::string::npos);
  CHECK(dump.find("nonneg") != std::string::npos);
}
