#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "rqproc/lp.hpp"
#include "rqproc/rng.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace rqproc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

lp::Problem single_var_problem() {
  lp::Problem p;
  p.objective = Eigen::VectorXd::Constant(1, 1.0);
  p.constraints = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.rhs = Eigen::VectorXd::Constant(1, 3.0);
  p.relations = {lp::Relation::le};
  p.lower = Eigen::VectorXd::Constant(1, 0.0);
  p.upper = Eigen::VectorXd::Constant(1, 10.0);
  p.sense = lp::Sense::maximize;
  return p;
}

// maximize Z'a subject to sum a = n(1-alpha), 0 <= a <= 1
lp::Problem score_problem(const Eigen::VectorXd& Z, double alpha) {
  const int n = static_cast<int>(Z.size());
  lp::Problem p;
  p.objective = Z;
  p.constraints = Eigen::MatrixXd::Ones(1, n);
  p.rhs = Eigen::VectorXd::Constant(1, n * (1.0 - alpha));
  p.lower = Eigen::VectorXd::Zero(n);
  p.upper = Eigen::VectorXd::Ones(n);
  p.sense = lp::Sense::maximize;
  return p;
}

}  // namespace

TEST_CASE("single bounded variable maximization") {
  const lp::Solution sol = lp::solve(single_var_problem());
  REQUIRE(sol.status == lp::Status::optimal);
  CHECK(sol.variables[0] == Catch::Approx(3.0).margin(1e-9));
  CHECK(sol.objective_value == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("degenerate zero objective is optimal with value zero") {
  lp::Problem p;
  p.objective = Eigen::VectorXd::Zero(1);
  p.constraints = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.rhs = Eigen::VectorXd::Constant(1, 1.0);
  p.lower = Eigen::VectorXd::Zero(1);
  p.upper = Eigen::VectorXd::Ones(1);
  p.sense = lp::Sense::maximize;
  const lp::Solution sol = lp::solve(p);
  REQUIRE(sol.status == lp::Status::optimal);
  CHECK(sol.objective_value == Catch::Approx(0.0).margin(1e-12));
  CHECK(sol.variables[0] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("score dual for Z=(1,2,3) at alpha=1/3") {
  Eigen::VectorXd Z(3);
  Z << 1, 2, 3;
  const lp::Solution sol = lp::solve(score_problem(Z, 1.0 / 3.0));
  REQUIRE(sol.status == lp::Status::optimal);
  const Eigen::VectorXd expect = oracles::box_lp_vertex_oracle(Z, 2.0);
  CHECK((sol.variables - expect).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(sol.variables[0] == Catch::Approx(0.0).margin(1e-9));
  CHECK(sol.variables[1] == Catch::Approx(1.0).margin(1e-9));
  CHECK(sol.variables[2] == Catch::Approx(1.0).margin(1e-9));
  CHECK(sol.objective_value == Catch::Approx(5.0).margin(1e-9));
}

TEST_CASE("infeasible and unbounded statuses") {
  lp::Problem p;
  p.objective = Eigen::VectorXd::Ones(1);
  p.constraints = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.rhs = Eigen::VectorXd::Constant(1, 5.0);
  p.lower = Eigen::VectorXd::Zero(1);
  p.upper = Eigen::VectorXd::Ones(1);
  CHECK(lp::solve(p).status == lp::Status::infeasible);

  lp::Problem q;
  q.objective = Eigen::VectorXd::Ones(2);
  q.constraints = Eigen::MatrixXd::Zero(1, 2);
  q.constraints(0, 1) = 1.0;
  q.rhs = Eigen::VectorXd::Constant(1, 1.0);
  q.lower = Eigen::VectorXd::Constant(2, 0.0);
  q.upper = Eigen::VectorXd::Constant(2, kInf);
  q.sense = lp::Sense::maximize;
  CHECK(lp::solve(q).status == lp::Status::unbounded);
}

TEST_CASE("dimension mismatch is a contract violation") {
  lp::Problem p;
  p.objective = Eigen::VectorXd::Ones(2);
  p.constraints = Eigen::MatrixXd::Ones(1, 3);
  p.rhs = Eigen::VectorXd::Ones(1);
  p.lower = Eigen::VectorXd::Zero(2);
  p.upper = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(lp::solve(p), std::invalid_argument);
}

TEST_CASE("random box LPs satisfy the optimality certificate") {
  const CounterRng rng(515151, CounterRng::misc, 0);
  std::uint64_t ctr = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform(ctr++) * 5);
    const int m = 1 + static_cast<int>(rng.uniform(ctr++) * 7);
    lp::Problem p;
    p.objective.resize(m);
    p.constraints.resize(k, m);
    p.lower = Eigen::VectorXd::Zero(m);
    p.upper.resize(m);
    for (int j = 0; j < m; ++j) {
      p.objective[j] = 4.0 * rng.uniform(ctr++) - 2.0;
      p.upper[j] = 0.5 + 3.0 * rng.uniform(ctr++);
    }
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < m; ++j) p.constraints(i, j) = 4.0 * rng.uniform(ctr++) - 2.0;
    // rhs from an interior point so the problem is feasible
    Eigen::VectorXd x0(m);
    for (int j = 0; j < m; ++j) x0[j] = p.upper[j] * rng.uniform(ctr++);
    p.rhs = p.constraints * x0;
    p.relations.resize(k);
    for (int i = 0; i < k; ++i) {
      const double u = rng.uniform(ctr++);
      p.relations[i] = (u < 0.34) ? lp::Relation::eq : (u < 0.67 ? lp::Relation::le : lp::Relation::ge);
      if (p.relations[i] == lp::Relation::le) p.rhs[i] += rng.uniform(ctr++);
      if (p.relations[i] == lp::Relation::ge) p.rhs[i] -= rng.uniform(ctr++);
    }
    p.sense = (rng.uniform(ctr++) < 0.5) ? lp::Sense::minimize : lp::Sense::maximize;
    const lp::Solution sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::optimal);
    // primal feasibility
    const Eigen::VectorXd ax = p.constraints * sol.variables;
    for (int i = 0; i < k; ++i) {
      const double resid = ax[i] - p.rhs[i];
      if (p.relations[i] == lp::Relation::eq) CHECK(std::abs(resid) < 1e-7);
      if (p.relations[i] == lp::Relation::le) CHECK(resid < 1e-7);
      if (p.relations[i] == lp::Relation::ge) CHECK(resid > -1e-7);
    }
    for (int j = 0; j < m; ++j) {
      CHECK(sol.variables[j] > p.lower[j] - 1e-9);
      CHECK(sol.variables[j] < p.upper[j] + 1e-9);
    }
    // dual certificate: with s = +1 for min and -1 for max, the reduced cost
    // s*(c_j - pi.a_j) must be >= 0 at lower bounds and <= 0 at upper bounds
    const double s = (p.sense == lp::Sense::minimize) ? 1.0 : -1.0;
    for (int j = 0; j < m; ++j) {
      const double rc = s * (p.objective[j] - sol.duals.dot(p.constraints.col(j)));
      const double to_lower = sol.variables[j] - p.lower[j];
      const double to_upper = p.upper[j] - sol.variables[j];
      if (to_lower > 1e-6 && to_upper > 1e-6) CHECK(std::abs(rc) < 1e-6);
      if (to_lower <= 1e-6) CHECK(rc > -1e-6);
      if (to_upper <= 1e-6) CHECK(rc < 1e-6);
    }
    // row duals respect the relation sign (minimize: le rows have pi <= 0)
    for (int i = 0; i < k; ++i) {
      const double pid = s * sol.duals[i];
      if (p.relations[i] == lp::Relation::le) CHECK(pid < 1e-6);
      if (p.relations[i] == lp::Relation::ge) CHECK(pid > -1e-6);
    }
  }
}

TEST_CASE("objective value does not depend on the starting basis") {
  Eigen::VectorXd Z(6);
  Z << 0.3, -1.2, 2.4, 0.9, -0.4, 1.7;
  lp::Problem p = score_problem(Z, 0.45);
  const lp::Solution cold = lp::solve(p);
  // start from an arbitrary structural basis
  const lp::Solution warm = lp::solve(p, {3});
  REQUIRE(cold.status == lp::Status::optimal);
  REQUIRE(warm.status == lp::Status::optimal);
  CHECK(std::abs(cold.objective_value - warm.objective_value) < 1e-9);
}

TEST_CASE("parametric sweep of the two-point location score LP") {
  Eigen::VectorXd Z(2);
  Z << 1, 2;
  auto family = [&](double a) { return score_problem(Z, a); };
  const auto intervals = lp::solve_parametric(family, 0.05, 0.95, {33, 1e-10});
  REQUIRE(intervals.size() == 2);
  CHECK(intervals[0].hi == Catch::Approx(0.5).margin(1e-8));
  CHECK(intervals[1].lo == Catch::Approx(0.5).margin(1e-8));
}

TEST_CASE("parametric sweep of a constant family returns one interval") {
  Eigen::VectorXd Z(3);
  Z << 2, 1, 3;
  auto family = [&](double) { return score_problem(Z, 0.4); };
  const auto intervals = lp::solve_parametric(family, 0.1, 0.9, {17, 1e-10});
  CHECK(intervals.size() == 1);
}

TEST_CASE("three-point location score LP breaks only at thirds") {
  Eigen::VectorXd Z(3);
  Z << 1, 2, 3;
  auto family = [&](double a) { return score_problem(Z, a); };
  const auto intervals = lp::solve_parametric(family, 0.05, 0.95, {65, 1e-10});
  for (std::size_t i = 0; i + 1 < intervals.size(); ++i) {
    const double bp = intervals[i].hi;
    const bool near_third = std::abs(bp - 1.0 / 3.0) < 1e-8 || std::abs(bp - 2.0 / 3.0) < 1e-8;
    CHECK(near_third);
  }
}

TEST_CASE("parametric intervals agree with independent per-alpha solves") {
  Eigen::VectorXd Z(5);
  Z << 0.7, -0.3, 1.9, 1.1, -1.5;
  auto family = [&](double a) { return score_problem(Z, a); };
  const auto intervals = lp::solve_parametric(family, 0.02, 0.98, {65, 1e-10});
  const auto grid = testutil::linspace(0.02, 0.98, 101);
  for (double a : grid) {
    const lp::Solution direct = lp::solve(family(a));
    const lp::ParametricInterval* home = nullptr;
    for (const auto& iv : intervals)
      if (a >= iv.lo - 1e-12 && a <= iv.hi + 1e-12) {
        home = &iv;
        break;
      }
    REQUIRE(home != nullptr);
    const lp::Solution via_basis = lp::evaluate_basis(family(a), home->basis, home->states);
    CHECK(std::abs(via_basis.objective_value - direct.objective_value) < 1e-8);
  }
}
