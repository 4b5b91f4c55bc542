#pragma once

// Two-step regression quantile: slopes from a rank estimator (or supplied),
// intercept as the empirical alpha-quantile of the residuals. Its process
// over alpha is the residual order-statistic step function with exactly n
// segments for distinct residuals.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rqproc/dataset.hpp"
#include "rqproc/jaeckel.hpp"
#include "rqproc/quantreg.hpp"

namespace rqproc {

// Left-continuous empirical quantile: the ceil(n*alpha)-th order statistic.
inline double empirical_quantile_left(Eigen::VectorXd values, double alpha) {
  if (values.size() == 0) throw std::invalid_argument("empirical_quantile_left: empty sample");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("empirical_quantile_left: alpha must lie in (0,1)");
  std::sort(values.data(), values.data() + values.size());
  const auto n = values.size();
  const auto idx = std::min<Eigen::Index>(
      n, std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(n * alpha - 1e-12))));
  return values[idx - 1];
}

struct SlopeRule {
  enum class Kind { r_estimator_at_alpha, fixed };
  Kind kind = Kind::r_estimator_at_alpha;
  Eigen::VectorXd fixed;

  static SlopeRule r_estimator() { return {}; }
  static SlopeRule fixed_slope(Eigen::VectorXd b) {
    SlopeRule r;
    r.kind = Kind::fixed;
    r.fixed = std::move(b);
    return r;
  }
};

inline QuantileFit two_step_fit(const Dataset& data, double alpha,
                                const SlopeRule& rule = SlopeRule::r_estimator()) {
  data.validate();
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("two_step_fit: alpha must lie in (0,1)");
  QuantileFit fit;
  fit.alpha = alpha;
  if (rule.kind == SlopeRule::Kind::fixed) {
    if (rule.fixed.size() != data.p())
      throw std::invalid_argument("two_step_fit: fixed slope length must equal p");
    fit.slopes = rule.fixed;
  } else {
    fit.slopes = fit_r_estimator(data, alpha).slopes;
  }
  Eigen::VectorXd resid = data.y;
  if (data.p() > 0) resid -= data.X * fit.slopes;
  fit.intercept = empirical_quantile_left(resid, alpha);
  fit.residuals = resid.array() - fit.intercept;
  fit.dual_scores = Eigen::VectorXd(0);  // not defined for the two-step fit
  fit.objective = alpha * fit.residuals.cwiseMax(0.0).sum() +
                  (1.0 - alpha) * (-fit.residuals).cwiseMax(0.0).sum();
  return fit;
}

struct TwoStepProcess {
  ProcessTrajectory trajectory;
  Eigen::VectorXd slopes;
  int nominal_segments = 0;   // n: one per order statistic
  int distinct_segments = 0;  // after collapsing tied residuals
};

// Intercept path = residual order statistics, jumps at alpha = k/n; the
// slope path is constant by construction.
inline TwoStepProcess two_step_process(const Dataset& data,
                                       const SlopeRule& rule = SlopeRule::r_estimator()) {
  data.validate();
  TwoStepProcess out;
  const int n = static_cast<int>(data.n());
  if (rule.kind == SlopeRule::Kind::fixed) {
    if (rule.fixed.size() != data.p())
      throw std::invalid_argument("two_step_process: fixed slope length must equal p");
    out.slopes = rule.fixed;
  } else {
    out.slopes = fit_r_estimator(data, 0.5).slopes;  // one rank slope estimate
  }
  Eigen::VectorXd resid = data.y;
  if (data.p() > 0) resid -= data.X * out.slopes;
  std::sort(resid.data(), resid.data() + n);
  out.nominal_segments = n;
  out.trajectory.source = TrajectorySource::two_step;
  // Rank-estimated slopes sit at an LP vertex, which makes p+1 residuals
  // exactly equal; the tie tolerance must absorb their recomputation noise.
  const double tie_tol = 1e-10 * (1.0 + resid.cwiseAbs().maxCoeff());
  for (int k = 1; k <= n; ++k) {
    Eigen::VectorXd coef(1 + data.p());
    coef[0] = resid[k - 1];
    coef.tail(data.p()) = out.slopes;
    if (!out.trajectory.segments.empty() &&
        std::abs(out.trajectory.segments.back()[0] - coef[0]) <= tie_tol) {
      continue;  // tied residuals collapse the breakpoint
    }
    if (!out.trajectory.segments.empty())
      out.trajectory.breakpoints.push_back(static_cast<double>(k - 1) / n);
    out.trajectory.segments.push_back(std::move(coef));
  }
  out.distinct_segments = static_cast<int>(out.trajectory.segments.size());
  return out;
}

}  // namespace rqproc
