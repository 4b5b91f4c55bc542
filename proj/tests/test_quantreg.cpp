#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>

#include "rqproc/quantreg.hpp"
#include "rqproc/rng.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace rqproc;

namespace {

Dataset intercept_only(std::initializer_list<double> ys) {
  Dataset d;
  d.y = Eigen::VectorXd(static_cast<Eigen::Index>(ys.size()));
  Eigen::Index i = 0;
  for (double v : ys) d.y[i++] = v;
  d.X = Eigen::MatrixXd(d.y.size(), 0);
  return d;
}

Dataset exact_line() {
  Dataset d;
  d.y = Eigen::VectorXd(4);
  d.y << 1, 2, 3, 4;
  d.X = Eigen::MatrixXd(4, 1);
  d.X << 1, 2, 3, 4;
  return d;
}

}  // namespace

TEST_CASE("intercept-only median") {
  const QuantileFit fit = fit_rq(intercept_only({1, 2, 3}), 0.5);
  CHECK(fit.intercept == Catch::Approx(2.0).margin(1e-9));
  CHECK(fit.slopes.size() == 0);
}

TEST_CASE("exact fit has zero residuals at every alpha") {
  const Dataset d = exact_line();
  for (double alpha : {0.1, 0.37, 0.5, 0.9}) {
    const QuantileFit fit = fit_rq(d, alpha);
    CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(fit.intercept == Catch::Approx(0.0).margin(1e-9));
    CHECK(fit.slopes[0] == Catch::Approx(1.0).margin(1e-9));
    CHECK(fit.objective == Catch::Approx(0.0).margin(1e-9));
  }
}

TEST_CASE("seeded n=7 fit matches the subset enumeration oracle") {
  const Dataset d = testutil::make_dataset(77001, 7, 1);
  const QuantileFit fit = fit_rq(d, 0.25);
  const auto oracle = oracles::rq_subset_oracle(d, 0.25);
  CHECK(std::abs(fit.objective - oracle.objective) < 1e-9 * std::max(1.0, oracle.objective));
  CHECK(fit.intercept == Catch::Approx(oracle.intercept).margin(1e-7));
  CHECK(fit.slopes[0] == Catch::Approx(oracle.slopes[0]).margin(1e-7));
}

TEST_CASE("objective equals the subset oracle on small seeded datasets") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const int n = 5 + static_cast<int>(seed % 5);
    const int p = 1 + static_cast<int>(seed % 2);
    const Dataset d = testutil::make_dataset(9000 + seed, n, p);
    const double alpha = 0.15 + 0.07 * (seed % 10);
    const QuantileFit fit = fit_rq(d, alpha);
    const auto oracle = oracles::rq_subset_oracle(d, alpha);
    CHECK(std::abs(fit.objective - oracle.objective) <= 1e-9 * std::max(1.0, oracle.objective));
  }
}

TEST_CASE("quantile balance and vertex structure") {
  const Dataset d = testutil::make_dataset(4242, 23, 2);
  const double tol = residual_zero_tol(d);
  for (double alpha : {0.2, 0.5, 0.8}) {
    const QuantileFit fit = fit_rq(d, alpha);
    const int below = (fit.residuals.array() < -tol).count();
    const int at_or_below = (fit.residuals.array() <= tol).count();
    CHECK(below <= d.n() * alpha);
    CHECK(d.n() * alpha <= at_or_below);
    const int zeros = (fit.residuals.cwiseAbs().array() <= tol).count();
    CHECK(zeros == d.p() + 1);
    CHECK(fit.dual_scores.minCoeff() >= 0.0);
    CHECK(fit.dual_scores.maxCoeff() <= 1.0);
  }
}

TEST_CASE("rank-deficient design raises an error") {
  Dataset d;
  d.y = Eigen::VectorXd::LinSpaced(6, 0.0, 5.0);
  d.X = Eigen::MatrixXd(6, 2);
  d.X.col(0) = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
  d.X.col(1) = 2.0 * d.X.col(0);  // collinear
  CHECK_THROWS_AS(fit_rq(d, 0.5), std::invalid_argument);
}

TEST_CASE("regression equivariance in the slopes") {
  const Dataset d = testutil::make_dataset(1313, 15, 2);
  Eigen::VectorXd c(2);
  c << 0.7, -1.9;
  Dataset shifted = d;
  shifted.y = d.y + d.X * c;
  const QuantileFit base = fit_rq(d, 0.35);
  const QuantileFit shift = fit_rq(shifted, 0.35);
  CHECK((shift.slopes - (base.slopes + c)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(shift.intercept == Catch::Approx(base.intercept).margin(1e-8));
  CHECK((shift.residuals - base.residuals).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((shift.dual_scores - base.dual_scores).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("location and scale equivariance") {
  const Dataset d = testutil::make_dataset(999, 12, 1);
  const QuantileFit base = fit_rq(d, 0.6);

  Dataset moved = d;
  moved.y = d.y.array() + 7.25;
  const QuantileFit fit_moved = fit_rq(moved, 0.6);
  CHECK(fit_moved.intercept == Catch::Approx(base.intercept + 7.25).margin(1e-8));
  CHECK((fit_moved.slopes - base.slopes).cwiseAbs().maxCoeff() < 1e-8);

  Dataset scaled = d;
  scaled.y = 3.5 * d.y;
  const QuantileFit fit_scaled = fit_rq(scaled, 0.6);
  CHECK(fit_scaled.intercept == Catch::Approx(3.5 * base.intercept).margin(1e-7));
  CHECK((fit_scaled.slopes - 3.5 * base.slopes).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((fit_scaled.dual_scores - base.dual_scores).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("strong duality against an independently built score LP") {
  const Dataset d = testutil::make_dataset(2024, 10, 1);
  for (double alpha : {0.3, 0.5, 0.7}) {
    const QuantileFit fit = fit_rq(d, alpha);
    const int n = static_cast<int>(d.n());
    lp::Problem dual;
    dual.objective = d.y;
    dual.constraints = Eigen::MatrixXd::Ones(1 + d.p(), n);
    dual.constraints.bottomRows(d.p()) = d.X.transpose();
    dual.rhs = Eigen::VectorXd(1 + d.p());
    dual.rhs[0] = (1.0 - alpha) * n;
    dual.rhs.tail(d.p()) = (1.0 - alpha) * d.X.colwise().sum().transpose();
    dual.lower = Eigen::VectorXd::Zero(n);
    dual.upper = Eigen::VectorXd::Ones(n);
    dual.sense = lp::Sense::maximize;
    const lp::Solution ds = lp::solve(dual);
    REQUIRE(ds.status == lp::Status::optimal);
    const double dual_value = ds.objective_value - (1.0 - alpha) * d.y.sum();
    CHECK(std::abs(dual_value - fit.objective) < 1e-8 * std::max(1.0, std::abs(fit.objective)));
  }
}

TEST_CASE("fitted objective is concave in alpha") {
  const Dataset d = testutil::make_dataset(606, 14, 1);
  const auto grid = testutil::linspace(0.1, 0.9, 33);
  std::vector<double> obj;
  for (double a : grid) obj.push_back(fit_rq(d, a).objective);
  for (std::size_t i = 1; i + 1 < obj.size(); ++i)
    CHECK(obj[i] >= 0.5 * (obj[i - 1] + obj[i + 1]) - 1e-9);
}

TEST_CASE("process of an exact-fit dataset is a single segment") {
  const ProcessTrajectory traj = rq_process(exact_line());
  CHECK(traj.breakpoints.empty());
  REQUIRE(traj.segments.size() == 1);
  CHECK(traj.segments[0][0] == Catch::Approx(0.0).margin(1e-9));
  CHECK(traj.segments[0][1] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("intercept-only process steps through the order statistics") {
  const Dataset d = intercept_only({1, 2, 3});
  const ProcessTrajectory traj = rq_process(d);
  REQUIRE(traj.segments.size() == 3);
  REQUIRE(traj.breakpoints.size() == 2);
  CHECK(traj.breakpoints[0] == Catch::Approx(1.0 / 3.0).margin(1e-7));
  CHECK(traj.breakpoints[1] == Catch::Approx(2.0 / 3.0).margin(1e-7));
  // pointwise agreement with per-alpha fits on a fine grid
  for (double a : testutil::linspace(0.001, 0.999, 999)) {
    if (std::abs(a - 1.0 / 3.0) < 1e-3 || std::abs(a - 2.0 / 3.0) < 1e-3) continue;
    const QuantileFit fit = fit_rq(d, a);
    CHECK(traj.intercept_at(a) == Catch::Approx(fit.intercept).margin(1e-7));
  }
}

TEST_CASE("seeded process agrees with per-alpha fits on a grid") {
  const Dataset d = testutil::make_dataset(3131, 20, 2);
  const ProcessTrajectory traj = rq_process(d);
  CHECK(traj.segments.size() >= 3);  // breakpoint count grows with n
  int checked = 0;
  for (double a : testutil::linspace(0.02, 0.98, 101)) {
    bool near_break = false;
    for (double bp : traj.breakpoints)
      if (std::abs(a - bp) < 1e-9) near_break = true;
    if (near_break) continue;
    const QuantileFit fit = fit_rq(d, a);
    const Eigen::VectorXd& coef = traj.eval(a);
    CHECK(coef[0] == Catch::Approx(fit.intercept).margin(1e-7));
    CHECK(coef[1] == Catch::Approx(fit.slopes[0]).margin(1e-7));
    CHECK(coef[2] == Catch::Approx(fit.slopes[1]).margin(1e-7));
    ++checked;
  }
  CHECK(checked >= 95);
}

TEST_CASE("population counterpart shifts only the intercept") {
  Eigen::VectorXd beta(2);
  beta << -1.0, 2.5;
  const auto [b0_normal, b_normal] = population_truth(normal_model(), 1.0, beta, 0.5);
  CHECK(b0_normal == Catch::Approx(1.0).margin(1e-12));
  CHECK((b_normal - beta).cwiseAbs().maxCoeff() == 0.0);

  const auto [b0_logistic, b_logistic] = population_truth(logistic_model(), 2.0, beta, 0.75);
  CHECK(b0_logistic == Catch::Approx(2.0 + std::log(3.0)).margin(1e-12));
  CHECK((b_logistic - beta).cwiseAbs().maxCoeff() == 0.0);

  const auto [lo, b_lo] = population_truth(laplace_model(), 0.0, beta, 0.2);
  const auto [hi, b_hi] = population_truth(laplace_model(), 0.0, beta, 0.8);
  CHECK(lo != hi);
  CHECK((b_lo - b_hi).cwiseAbs().maxCoeff() == 0.0);
}
