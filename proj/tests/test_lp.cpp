#include "hps/lp.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace hps;

namespace {

struct BoundRecorder : BranchObserver {
  int children = 0;
  int violations = 0;
  void on_child(double parent, double child) override {
    ++children;
    if (child < parent - 1e-7 * std::max(1.0, std::abs(parent))) ++violations;
  }
};

// One machine-month with a 10/15-shift choice y: internal hours eta*K(y),
// external hours e cover the rest. Objective keeps the 10-shift cost as a
// constant folded into the y coefficient so totals compare directly.
MilpProblem shift_choice(double required, double eta) {
  LpBuilder b;
  const auto e = b.add_variable(200.0, 0.0, kInfinity, "e");
  const auto y = b.add_variable(100.0 * (480.0 - 320.0), 0.0, 1.0, "y");
  b.add_row({{e, 1.0}, {y, eta * (480.0 - 320.0)}}, Relation::GreaterEqual, required - eta * 320.0);
  MilpProblem p;
  p.lp = b.build();
  p.binaries = {y};
  return p;
}

}  // namespace

TEST_CASE("lp: single bounded variable") {
  LpBuilder b;
  const auto x = b.add_variable(1.0, 0.0, 10.0);
  b.add_row({{x, 1.0}}, Relation::GreaterEqual, 3.0);
  const auto s = solve_lp(b.build());
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.values(0) == doctest::Approx(3.0));
  CHECK(s.objective == doctest::Approx(3.0));
}

TEST_CASE("lp: maximize sum over simplex") {
  LpBuilder b;
  const auto x = b.add_variable(-1.0);
  const auto y = b.add_variable(-1.0);
  b.add_row({{x, 1.0}, {y, 1.0}}, Relation::LessEqual, 1.0);
  const auto s = solve_lp(b.build());
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-1.0));
}

TEST_CASE("lp: contradictory rows are infeasible") {
  LpBuilder b;
  const auto x = b.add_variable(1.0, -kInfinity, kInfinity);
  b.add_row({{x, 1.0}}, Relation::GreaterEqual, 5.0);
  b.add_row({{x, 1.0}}, Relation::LessEqual, 3.0);
  CHECK(solve_lp(b.build()).status == SolveStatus::Infeasible);
}

TEST_CASE("lp: unbounded direction detected") {
  LpBuilder b;
  const auto x = b.add_variable(-1.0);
  const auto y = b.add_variable(0.0);
  b.add_row({{x, 1.0}, {y, -1.0}}, Relation::LessEqual, 1.0);
  CHECK(solve_lp(b.build()).status == SolveStatus::Unbounded);
}

TEST_CASE("lp: equality rows and free variables") {
  LpBuilder b;
  const auto x = b.add_variable(2.0, -kInfinity, kInfinity);
  const auto y = b.add_variable(3.0);
  b.add_row({{x, 1.0}, {y, 1.0}}, Relation::Equal, 4.0);
  b.add_row({{x, 1.0}}, Relation::GreaterEqual, 1.0);
  const auto p = b.build();
  const auto s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.values(0) == doctest::Approx(4.0));
  CHECK(s.objective == doctest::Approx(8.0));
  CHECK(max_violation(p, s.values) <= 1e-9);
}

TEST_CASE("lp: validation rejects inconsistent dimensions") {
  LpProblem p;
  p.objective = Eigen::VectorXd::Ones(2);
  p.constraints = Eigen::MatrixXd::Ones(1, 3);
  p.relations = {Relation::LessEqual};
  p.rhs = Eigen::VectorXd::Ones(1);
  p.lower = Eigen::VectorXd::Zero(2);
  p.upper = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("milp: shift choice at full planned utilization") {
  const auto p = shift_choice(320.0, 1.0);
  const auto s = solve_milp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.values(1) == doctest::Approx(0.0));
  CHECK(s.values(0) == doctest::Approx(0.0));
  CHECK(s.objective + 32000.0 == doctest::Approx(32000.0));
  CHECK(enumerate_exact(p).objective == doctest::Approx(s.objective));
}

TEST_CASE("milp: shift choice with 80 percent planned utilization") {
  const auto p = shift_choice(320.0, 0.8);
  const auto s = solve_milp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.values(1) == doctest::Approx(0.0));
  CHECK(s.values(0) == doctest::Approx(64.0));
  CHECK(s.objective + 32000.0 == doctest::Approx(44800.0));
  CHECK(enumerate_exact(p).objective == doctest::Approx(s.objective));
}

TEST_CASE("milp: without binaries equals the LP") {
  LpBuilder b;
  const auto x = b.add_variable(1.0, 0.0, 10.0);
  const auto y = b.add_variable(2.0, 0.0, 10.0);
  b.add_row({{x, 1.0}, {y, 1.0}}, Relation::GreaterEqual, 7.5);
  MilpProblem p;
  p.lp = b.build();
  CHECK(solve_milp(p).objective == doctest::Approx(solve_lp(p.lp).objective));
}

TEST_CASE("milp: every fixing infeasible") {
  LpBuilder b;
  const auto y = b.add_variable(1.0, 0.0, 1.0);
  const auto z = b.add_variable(1.0, 0.0, 1.0);
  b.add_row({{y, 1.0}, {z, 1.0}}, Relation::GreaterEqual, 3.0);
  MilpProblem p;
  p.lp = b.build();
  p.binaries = {y, z};
  CHECK(enumerate_exact(p).status == SolveStatus::Infeasible);
  CHECK(solve_milp(p).status == SolveStatus::Infeasible);
}

TEST_CASE("milp: random knapsack-like instances agree with enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 30; ++k) {
    LpBuilder b;
    const int n = 6;
    std::vector<std::pair<Eigen::Index, double>> cap, cover;
    for (int i = 0; i < n; ++i) {
      const auto v = b.add_variable(-(1.0 + 9.0 * u(rng)), 0.0, 1.0);
      cap.emplace_back(v, 1.0 + 4.0 * u(rng));
    }
    const auto slack = b.add_variable(3.0 * u(rng), 0.0, 5.0);
    cap.emplace_back(slack, -1.0);
    b.add_row(cap, Relation::LessEqual, 6.0);
    MilpProblem p;
    p.lp = b.build();
    for (Eigen::Index i = 0; i < n; ++i) p.binaries.push_back(i);
    BoundRecorder rec;
    const auto bb = solve_milp(p, {}, &rec);
    const auto ex = enumerate_exact(p);
    REQUIRE(bb.status == SolveStatus::Optimal);
    CHECK(bb.objective == doctest::Approx(ex.objective).epsilon(1e-9));
    CHECK(rec.violations == 0);
  }
}

TEST_CASE("milp: a feasible incumbent is kept when nothing beats it") {
  const auto p = shift_choice(320.0, 1.0);
  Eigen::VectorXd start(2);
  start << 0.0, 0.0;
  const auto s = solve_milp(p, {}, nullptr, &start);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(0.0));
}

TEST_CASE("milp: fixed-binary solver matches cold solves") {
  const auto p = shift_choice(400.0, 0.9);
  FixedBinarySolver fixed(p);
  for (const double y : {0.0, 1.0, 0.0, 1.0}) {
    Eigen::VectorXd a(1);
    a << y;
    auto lp = p.lp;
    lp.lower(1) = lp.upper(1) = y;
    const auto cold = solve_lp(lp);
    const auto warm = fixed.solve(a);
    REQUIRE(warm.status == SolveStatus::Optimal);
    CHECK(warm.objective == doctest::Approx(cold.objective));
  }
}

TEST_CASE("milp: enumeration refuses large binary sets") {
  LpBuilder b;
  MilpProblem p;
  for (int i = 0; i < 21; ++i) p.binaries.push_back(b.add_variable(1.0, 0.0, 1.0));
  p.lp = b.build();
  CHECK_THROWS_AS((void)enumerate_exact(p), std::invalid_argument);
}

TEST_CASE("lp format dump has all sections") {
  const auto p = shift_choice(320.0, 1.0);
  std::ostringstream out;
  write_lp_format(out, p);
  const auto s = out.str();
  for (const char* section : {"Minimize", "Subject To", "Bounds", "Binaries", "End"}) {
    CHECK(s.find(section) != std::string::npos);
  }
}
