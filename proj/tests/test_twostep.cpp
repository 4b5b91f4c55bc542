#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "rqproc/montecarlo.hpp"
#include "rqproc/twostep.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace rqproc;

TEST_CASE("left-continuous empirical quantile picks the ceil(n alpha)-th order statistic") {
  Eigen::VectorXd v(5);
  v << 5, 1, 4, 2, 3;
  CHECK(empirical_quantile_left(v, 0.2) == 1.0);   // ceil(1.0) = 1st
  CHECK(empirical_quantile_left(v, 0.21) == 2.0);  // ceil(1.05) = 2nd
  CHECK(empirical_quantile_left(v, 0.5) == 3.0);
  CHECK(empirical_quantile_left(v, 0.999) == 5.0);
}

TEST_CASE("two-step fit on an exact-fit dataset recovers the truth") {
  Dataset d;
  d.X = Eigen::MatrixXd(6, 1);
  d.X << -3, -2, -1, 1, 2, 3;
  d.y = 2.0 + 0.75 * d.X.col(0).array();
  for (double alpha : {0.2, 0.5, 0.8}) {
    const QuantileFit fit = two_step_fit(d, alpha);
    CHECK(fit.slopes[0] == Catch::Approx(0.75).margin(1e-9));
    CHECK(fit.intercept == Catch::Approx(2.0).margin(1e-9));
    CHECK(fit.dual_scores.size() == 0);
  }
}

TEST_CASE("fixed zero slope reduces the intercept to the sample quantile") {
  const Dataset d = testutil::make_dataset(246, 15, 1);
  const SlopeRule rule = SlopeRule::fixed_slope(Eigen::VectorXd::Zero(1));
  for (double alpha : {0.25, 0.6, 0.9}) {
    const QuantileFit fit = two_step_fit(d, alpha, rule);
    CHECK(fit.intercept == empirical_quantile_left(d.y, alpha));
  }
}

TEST_CASE("seeded n=30 fit uses the 27th residual order statistic at alpha=0.9") {
  const Dataset d = testutil::make_dataset(3030, 30, 2);
  const QuantileFit fit = two_step_fit(d, 0.9);
  Eigen::VectorXd resid = d.y - d.X * fit.slopes;
  std::sort(resid.data(), resid.data() + resid.size());
  CHECK(fit.intercept == Catch::Approx(resid[26]).margin(1e-12));
}

TEST_CASE("process on distinct residuals steps through all order statistics") {
  Dataset d;
  d.X = Eigen::MatrixXd(5, 1);
  d.X << 0.0, 1.0, 2.0, 3.0, 4.5;
  d.y = Eigen::VectorXd(5);
  d.y << 3.1, -0.4, 2.2, 5.9, 1.0;
  const TwoStepProcess proc = two_step_process(d, SlopeRule::fixed_slope(Eigen::VectorXd::Zero(1)));
  CHECK(proc.nominal_segments == 5);
  CHECK(proc.distinct_segments == 5);
  REQUIRE(proc.trajectory.segments.size() == 5);
  Eigen::VectorXd sorted = d.y;
  std::sort(sorted.data(), sorted.data() + 5);
  for (int k = 0; k < 5; ++k)
    CHECK(proc.trajectory.segments[k][0] == sorted[k]);
  REQUIRE(proc.trajectory.breakpoints.size() == 4);
  for (int k = 1; k <= 4; ++k)
    CHECK(proc.trajectory.breakpoints[k - 1] == Catch::Approx(k / 5.0).margin(1e-12));
}

TEST_CASE("breakpoint count is exactly n for generic data under a fixed slope") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 10 + static_cast<int>(seed % 7);
    const Dataset d = testutil::make_dataset(40000 + seed, n, 2);
    Eigen::VectorXd fixed(2);
    fixed << 0.9, 2.2;
    const TwoStepProcess proc = two_step_process(d, SlopeRule::fixed_slope(fixed));
    CHECK(proc.nominal_segments == n);
    CHECK(proc.distinct_segments == n);
  }
}

TEST_CASE("rank-estimated slopes tie p+1 residuals at the dispersion cut") {
  // the R-estimate is an LP vertex: p+1 centered residuals are exactly
  // equal there, so the default-rule process collapses p breakpoints
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const int n = 12 + static_cast<int>(seed % 5);
    const Dataset d = testutil::make_dataset(52000 + seed, n, 2);
    const TwoStepProcess proc = two_step_process(d);
    CHECK(proc.nominal_segments == n);
    CHECK(proc.distinct_segments == n - 2);
  }
}

TEST_CASE("tied residuals collapse breakpoints but keep the nominal count") {
  Dataset d;
  d.X = Eigen::MatrixXd(4, 1);
  d.X << 0, 1, 2, 3;
  d.y = Eigen::VectorXd(4);
  d.y << 1.0, 1.0, 2.0, 2.0;  // two tied pairs under zero slopes
  const TwoStepProcess proc = two_step_process(d, SlopeRule::fixed_slope(Eigen::VectorXd::Zero(1)));
  CHECK(proc.nominal_segments == 4);
  CHECK(proc.distinct_segments == 2);
}

TEST_CASE("slope path has zero variation over alpha") {
  const Dataset d = testutil::make_dataset(11, 12, 2);
  const TwoStepProcess proc = two_step_process(d);
  for (const auto& seg : proc.trajectory.segments)
    CHECK((seg.tail(2) - proc.slopes).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("process evaluation matches per-alpha two-step fits") {
  const Dataset d = testutil::make_dataset(888, 14, 1);
  const TwoStepProcess proc = two_step_process(d);
  const SlopeRule fixed = SlopeRule::fixed_slope(proc.slopes);
  for (double a : testutil::linspace(0.03, 0.97, 41)) {
    const QuantileFit fit = two_step_fit(d, a, fixed);
    CHECK(proc.trajectory.intercept_at(a) == Catch::Approx(fit.intercept).margin(1e-12));
  }
}

TEST_CASE("intercept path is nondecreasing in alpha") {
  const Dataset d = testutil::make_dataset(13579, 17, 2);
  const TwoStepProcess proc = two_step_process(d);
  for (std::size_t i = 1; i < proc.trajectory.segments.size(); ++i)
    CHECK(proc.trajectory.segments[i][0] >= proc.trajectory.segments[i - 1][0]);
}

TEST_CASE("location equivariance of the two-step process") {
  const Dataset d = testutil::make_dataset(777, 10, 1);
  Dataset moved = d;
  moved.y = d.y.array() + 4.5;
  const TwoStepProcess a = two_step_process(d);
  const TwoStepProcess b = two_step_process(moved);
  REQUIRE(a.trajectory.segments.size() == b.trajectory.segments.size());
  for (std::size_t i = 0; i < a.trajectory.segments.size(); ++i) {
    CHECK(b.trajectory.segments[i][0] ==
          Catch::Approx(a.trajectory.segments[i][0] + 4.5).margin(1e-9));
    CHECK((b.trajectory.segments[i].tail(1) - a.trajectory.segments[i].tail(1))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }
}

TEST_CASE("two-step and regression quantile processes stay sqrt(n)-close") {
  // median over replicates of max_alpha sqrt(n) ||two_step - rq|| must not
  // grow with n
  const std::vector<int> sizes = {100, 400, 1600};
  const std::vector<double> grid = {0.1, 0.3, 0.5, 0.7, 0.9};
  const int reps = 200;
  std::vector<double> medians;
  for (int n : sizes) {
    SimConfig cfg;
    cfg.n = n;
    cfg.p = 1;
    cfg.beta = Eigen::VectorXd::Constant(1, 1.0);
    cfg.beta0 = 0.5;
    cfg.error_model = "logistic";
    cfg.seed = 971;
    std::vector<double> vals;
    for (int r = 0; r < reps; ++r) {
      const Dataset d = generate(cfg, r);
      const RFit rf = fit_r_estimator(d, 0.5, {ScoreRule::indicator, false});
      const SlopeRule rule = SlopeRule::fixed_slope(rf.slopes);
      double mx = 0.0;
      for (double a : grid) {
        const QuantileFit ts = two_step_fit(d, a, rule);
        const QuantileFit rq = fit_rq(d, a);
        Eigen::VectorXd diff(2);
        diff << ts.intercept - rq.intercept, (ts.slopes - rq.slopes).norm();
        mx = std::max(mx, std::sqrt(static_cast<double>(n)) * diff.norm());
      }
      vals.push_back(mx);
    }
    std::sort(vals.begin(), vals.end());
    medians.push_back(0.5 * (vals[reps / 2 - 1] + vals[reps / 2]));
  }
  // allow noise but no systematic growth
  CHECK(medians[1] <= medians[0] * 1.25);
  CHECK(medians[2] <= medians[0] * 1.25);
}
