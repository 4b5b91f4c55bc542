#pragma once

// Regression alpha-quantiles: the primal fit, its dual scores, the full
// coefficient process over alpha, and the population counterpart.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rqproc/dataset.hpp"
#include "rqproc/error_models.hpp"
#include "rqproc/lp.hpp"

namespace rqproc {

struct QuantileFit {
  double alpha = 0.0;
  double intercept = 0.0;
  Eigen::VectorXd slopes;       // length p
  Eigen::VectorXd residuals;    // length n
  Eigen::VectorXd dual_scores;  // length n; empty for two-step fits
  double objective = 0.0;
};

enum class TrajectorySource { regression_quantile, two_step, r_estimator };

// Piecewise-constant coefficient path over alpha. Segment i covers
// (breakpoints[i-1], breakpoints[i]], with the end segments extended to the
// open interval (0,1).
struct ProcessTrajectory {
  std::vector<double> breakpoints;
  std::vector<Eigen::VectorXd> segments;  // each of length 1 + p (intercept first)
  TrajectorySource source = TrajectorySource::regression_quantile;

  const Eigen::VectorXd& eval(double alpha) const {
    const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), alpha);
    return segments[static_cast<std::size_t>(it - breakpoints.begin())];
  }
  double intercept_at(double alpha) const { return eval(alpha)[0]; }
  Eigen::VectorXd slopes_at(double alpha) const { return eval(alpha).tail(eval(alpha).size() - 1); }
};

// Scale-aware tolerance for calling a residual zero: 1e-7 relative to the
// interquartile range of the response.
inline double residual_zero_tol(const Dataset& data) {
  Eigen::VectorXd s = data.y;
  std::sort(s.data(), s.data() + s.size());
  const auto n = s.size();
  const double q1 = s[static_cast<Eigen::Index>(0.25 * (n - 1))];
  const double q3 = s[static_cast<Eigen::Index>(0.75 * (n - 1))];
  return 1e-7 * std::max(1.0, q3 - q1);
}

namespace detail {

inline void check_design_rank(const Dataset& data) {
  const auto n = data.n();
  const auto p = data.p();
  Eigen::MatrixXd Z(n, p + 1);
  Z.col(0).setOnes();
  if (p > 0) Z.rightCols(p) = data.X;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  qr.setThreshold(1e-10);
  if (qr.rank() < p + 1)
    throw std::invalid_argument("quantreg: design is rank deficient (rank < p + 1)");
}

// Primal LP of the quantile criterion with the residual split u - v:
// minimize alpha*sum(u) + (1-alpha)*sum(v)
// subject to b0 + x_i'b + u_i - v_i = y_i,  u, v >= 0,  b0, b free.
inline lp::Problem rq_problem(const Dataset& data, double alpha) {
  const int n = static_cast<int>(data.n());
  const int p = static_cast<int>(data.p());
  const int m = 1 + p + 2 * n;
  lp::Problem prob;
  prob.objective = Eigen::VectorXd::Zero(m);
  prob.objective.segment(1 + p, n).setConstant(alpha);
  prob.objective.segment(1 + p + n, n).setConstant(1.0 - alpha);
  prob.constraints = Eigen::MatrixXd::Zero(n, m);
  prob.constraints.col(0).setOnes();
  if (p > 0) prob.constraints.middleCols(1, p) = data.X;
  for (int i = 0; i < n; ++i) {
    prob.constraints(i, 1 + p + i) = 1.0;
    prob.constraints(i, 1 + p + n + i) = -1.0;
  }
  prob.rhs = data.y;
  prob.lower = Eigen::VectorXd::Constant(m, 0.0);
  prob.upper = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
  prob.lower.head(1 + p).setConstant(-std::numeric_limits<double>::infinity());
  prob.sense = lp::Sense::minimize;
  return prob;
}

// u_i basic where y_i >= 0, v_i otherwise: feasible at b = 0, no phase one.
inline std::vector<int> rq_start_basis(const Dataset& data) {
  const int n = static_cast<int>(data.n());
  const int p = static_cast<int>(data.p());
  std::vector<int> basis(n);
  for (int i = 0; i < n; ++i)
    basis[i] = (data.y[i] >= 0.0) ? (1 + p + i) : (1 + p + n + i);
  return basis;
}

}  // namespace detail

inline QuantileFit fit_rq(const Dataset& data, double alpha) {
  data.validate();
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("fit_rq: alpha must lie in (0,1)");
  detail::check_design_rank(data);
  const auto n = data.n();
  const auto p = data.p();
  lp::Solution sol = lp::solve(detail::rq_problem(data, alpha), detail::rq_start_basis(data));
  if (sol.status != lp::Status::optimal)
    throw std::runtime_error("fit_rq: LP did not reach an optimum");
  QuantileFit fit;
  fit.alpha = alpha;
  fit.intercept = sol.variables[0];
  fit.slopes = sol.variables.segment(1, p);
  fit.residuals = data.y - Eigen::VectorXd::Constant(n, fit.intercept);
  if (p > 0) fit.residuals -= data.X * fit.slopes;
  fit.dual_scores = sol.duals.array() + (1.0 - alpha);
  // LP-tolerance dust outside [0,1] is clamped
  fit.dual_scores = fit.dual_scores.cwiseMax(0.0).cwiseMin(1.0);
  fit.objective = sol.objective_value;
  return fit;
}

struct ProcessOptions {
  double alpha_margin = 1e-3;  // sweep range is [margin, 1-margin]
  int grid_points = 0;         // 0: choose from n
};

// Full regression-quantile process via the parametric LP sweep.
inline ProcessTrajectory rq_process(const Dataset& data, const ProcessOptions& opt = {}) {
  data.validate();
  detail::check_design_rank(data);
  const int n = static_cast<int>(data.n());
  const int p = static_cast<int>(data.p());
  const double margin = std::min(opt.alpha_margin, 1.0 / (8.0 * n));
  const int grid = (opt.grid_points > 0) ? opt.grid_points : std::max(65, 4 * n + 5);
  auto family = [&data](double a) { return detail::rq_problem(data, a); };
  const auto intervals =
      lp::solve_parametric(family, margin, 1.0 - margin, {grid, lp::Tolerances::parametric_width});
  ProcessTrajectory traj;
  traj.source = TrajectorySource::regression_quantile;
  const double tol = 1e-9 * (1.0 + std::abs(data.y.cwiseAbs().maxCoeff()));
  for (const auto& iv : intervals) {
    Eigen::VectorXd coef = iv.solution.variables.head(1 + p);
    if (!traj.segments.empty() && (traj.segments.back() - coef).cwiseAbs().maxCoeff() <= tol) {
      continue;  // same coefficients: merge with the previous segment
    }
    if (!traj.segments.empty()) traj.breakpoints.push_back(iv.lo);
    traj.segments.push_back(std::move(coef));
  }
  return traj;
}

// Grid-sampled trajectory: exact at the grid nodes, with breakpoints placed
// between nodes whose fits differ. Cheaper than the full sweep for Monte
// Carlo work that only ever evaluates at the nodes.
inline ProcessTrajectory rq_process_on_grid(const Dataset& data,
                                            const std::vector<double>& alpha_grid) {
  ProcessTrajectory traj;
  traj.source = TrajectorySource::regression_quantile;
  const double tol = 1e-9 * (1.0 + std::abs(data.y.cwiseAbs().maxCoeff()));
  double prev_alpha = 0.0;
  for (double a : alpha_grid) {
    const QuantileFit fit = fit_rq(data, a);
    Eigen::VectorXd coef(1 + data.p());
    coef[0] = fit.intercept;
    coef.tail(data.p()) = fit.slopes;
    if (!traj.segments.empty() && (traj.segments.back() - coef).cwiseAbs().maxCoeff() <= tol) {
      prev_alpha = a;
      continue;
    }
    if (!traj.segments.empty()) traj.breakpoints.push_back(0.5 * (prev_alpha + a));
    traj.segments.push_back(std::move(coef));
    prev_alpha = a;
  }
  return traj;
}

// Population counterpart of the alpha-fit: the intercept absorbs the error
// quantile, the slopes do not depend on alpha.
inline std::pair<double, Eigen::VectorXd> population_truth(const ErrorModel& model, double beta0,
                                                           const Eigen::VectorXd& beta,
                                                           double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("population_truth: alpha must lie in (0,1)");
  return {beta0 + model.quantile(alpha), beta};
}

}  // namespace rqproc
