#pragma once

// Rank-dispersion objective with Hajek-family scores, its gradient, the
// R-estimator of the slopes at each alpha, and the extreme-alpha minimax /
// minimin fits.
//
// With indicator scores the dispersion of centered residuals equals the sum
// of their n*(about (1-alpha)) largest values, so the minimizer solves the
// linear program  min m z + sum w,  w_i >= c_i(b) - z,  w >= 0.  The same
// formulation with the fractional weight n(1-alpha) covers the interpolated
// scores. m = 1 is exactly the minimax problem.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rqproc/dataset.hpp"
#include "rqproc/lp.hpp"
#include "rqproc/quantreg.hpp"
#include "rqproc/rank_scores.hpp"
#include "rqproc/ranks.hpp"

namespace rqproc {

enum class ScoreRule { indicator, hajek };

struct DispersionEvaluation {
  Eigen::VectorXd b;
  double value = 0.0;
  Eigen::VectorXd subgradient;
};

namespace detail {

inline Eigen::VectorXd centered_residuals(const Dataset& data, const Eigen::VectorXd& b) {
  Eigen::VectorXd c = data.y_centered();
  if (data.p() > 0) c -= data.x_centered() * b;
  return c;
}

inline void check_centered_rank(const Dataset& data) {
  if (data.p() == 0) return;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.x_centered());
  qr.setThreshold(1e-10);
  if (qr.rank() < data.p())
    throw std::invalid_argument("jaeckel: centered design is rank deficient");
}

// Number of ranks r in 1..n with r >= n*alpha.
inline int indicator_count(int n, double alpha) {
  const double na = n * alpha;
  const int first = std::max(1, static_cast<int>(std::ceil(na - 1e-12)));
  return n - first + 1;
}

// min over (b, z, w) of  weight*z + sum w  s.t.  w_i >= c_i(b) - z, w_i >= 0;
// the optimum value is the sum of the `weight` largest centered residuals
// (fractional weights interpolate) and b is the dispersion minimizer.
inline lp::Problem cvar_problem(const Eigen::MatrixXd& xc, const Eigen::VectorXd& yc,
                                double weight) {
  const int n = static_cast<int>(yc.size());
  const int p = static_cast<int>(xc.cols());
  const int m = p + 1 + n;  // [b, z, w]
  lp::Problem prob;
  prob.objective = Eigen::VectorXd::Zero(m);
  prob.objective[p] = weight;
  prob.objective.tail(n).setOnes();
  prob.constraints = Eigen::MatrixXd::Zero(n, m);
  if (p > 0) prob.constraints.leftCols(p) = xc;
  prob.constraints.col(p).setOnes();
  for (int i = 0; i < n; ++i) prob.constraints(i, p + 1 + i) = 1.0;
  prob.rhs = yc;
  prob.relations.assign(n, lp::Relation::ge);
  prob.lower = Eigen::VectorXd::Zero(m);
  prob.lower.head(p + 1).setConstant(-std::numeric_limits<double>::infinity());
  prob.upper = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
  prob.sense = lp::Sense::minimize;
  return prob;
}

inline Eigen::VectorXd solve_cvar(const Eigen::MatrixXd& xc, const Eigen::VectorXd& yc,
                                  double weight, double* value, bool* degenerate,
                                  bool detect_degeneracy) {
  const int n = static_cast<int>(yc.size());
  const int p = static_cast<int>(xc.cols());
  lp::Problem prob = cvar_problem(xc, yc, weight);
  const int mcols = p + 1 + n;
  std::vector<int> basis(n);
  for (int i = 0; i < n; ++i)
    basis[i] = (yc[i] > 0.0) ? (p + 1 + i) : (mcols + i);  // w_i or the ge-slack
  lp::Solution sol;
  lp::Solution probe;
  if (detect_degeneracy && degenerate != nullptr) {
    sol = lp::solve(prob, basis);
    probe = lp::solve(std::move(prob));  // cold start probes the optimal face
  } else {
    sol = lp::solve(std::move(prob), basis);
  }
  if (sol.status != lp::Status::optimal)
    throw std::runtime_error("jaeckel: dispersion LP did not reach an optimum");
  if (value != nullptr) *value = sol.objective_value;
  Eigen::VectorXd slopes = sol.variables.head(p);
  if (degenerate != nullptr) {
    *degenerate = detect_degeneracy && probe.status == lp::Status::optimal &&
                  std::abs(probe.objective_value - sol.objective_value) < 1e-9 &&
                  (probe.variables.head(p) - slopes).norm() > 1e-6;
  }
  return slopes;
}

}  // namespace detail

// Rank-dispersion of the centered residuals under the chosen score rule.
inline double dispersion(const Dataset& data, const Eigen::VectorXd& b, double alpha,
                         ScoreRule rule = ScoreRule::hajek) {
  data.validate();
  if (b.size() != data.p())
    throw std::invalid_argument("dispersion: slope length must equal p");
  const int n = static_cast<int>(data.n());
  const Eigen::VectorXd c = detail::centered_residuals(data, b);
  const std::vector<int> ranks = ranks_of(c);
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = (rule == ScoreRule::hajek)
                         ? hajek_score(ranks[i], n, alpha)
                         : (ranks[i] >= n * alpha ? 1.0 : 0.0);
    d += c[i] * a;
  }
  return d;
}

// Gradient of the indicator-form dispersion: -sum (x_i - xbar) I[R_i >= n a].
// At kinks this is the right-limit subgradient; band_edge reports whether the
// point sits on one (integer n*alpha or a tie at the cut).
inline Eigen::VectorXd dispersion_gradient(const Dataset& data, const Eigen::VectorXd& b,
                                           double alpha, bool* band_edge = nullptr) {
  data.validate();
  if (b.size() != data.p())
    throw std::invalid_argument("dispersion_gradient: slope length must equal p");
  const int n = static_cast<int>(data.n());
  const Eigen::VectorXd c = detail::centered_residuals(data, b);
  const std::vector<int> ranks = ranks_of(c);
  const Eigen::MatrixXd xc = data.x_centered();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(data.p());
  for (int i = 0; i < n; ++i)
    if (ranks[i] >= n * alpha) g -= xc.row(i).transpose();
  if (band_edge != nullptr) {
    const double na = n * alpha;
    *band_edge = std::abs(na - std::round(na)) <= 1e-9 * n;
    const int cut = n - detail::indicator_count(n, alpha);  // last rank scored 0
    if (cut >= 1) {
      Eigen::VectorXd s = c;
      std::sort(s.data(), s.data() + n);
      if (std::abs(s[cut] - s[cut - 1]) <= residual_zero_tol(data)) *band_edge = true;
    }
  }
  return g;
}

inline DispersionEvaluation evaluate_dispersion(const Dataset& data, const Eigen::VectorXd& b,
                                                double alpha, ScoreRule rule = ScoreRule::hajek) {
  DispersionEvaluation ev;
  ev.b = b;
  ev.value = dispersion(data, b, alpha, rule);
  ev.subgradient = dispersion_gradient(data, b, alpha);
  return ev;
}

// Chebyshev-type slope: argmin over b of the maximal centered residual.
inline Eigen::VectorXd minimax_slope(const Dataset& data) {
  data.validate();
  detail::check_centered_rank(data);
  if (data.p() == 0) return Eigen::VectorXd(0);
  return detail::solve_cvar(data.x_centered(), data.y_centered(), 1.0, nullptr, nullptr, false);
}

// argmax over b of the minimal centered residual (the lower-band analogue).
inline Eigen::VectorXd minimin_slope(const Dataset& data) {
  data.validate();
  detail::check_centered_rank(data);
  if (data.p() == 0) return Eigen::VectorXd(0);
  Eigen::VectorXd yneg = -data.y_centered();
  return -detail::solve_cvar(data.x_centered(), yneg, 1.0, nullptr, nullptr, false);
}

struct RFitOptions {
  ScoreRule rule = ScoreRule::indicator;
  bool detect_degeneracy = true;
};

struct RFit {
  Eigen::VectorXd slopes;
  double objective = 0.0;
  bool degenerate = false;
  // true when n*alpha <= 1: every rank then carries score 1, the indicator
  // dispersion vanishes identically and the fit is the minimin slope, which
  // is also the limit the interpolated scores select.
  bool lower_band = false;
};

inline RFit fit_r_estimator(const Dataset& data, double alpha, const RFitOptions& opt = {}) {
  data.validate();
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("fit_r_estimator: alpha must lie in (0,1)");
  detail::check_centered_rank(data);
  const int n = static_cast<int>(data.n());
  RFit fit;
  if (data.p() == 0) {
    fit.slopes = Eigen::VectorXd(0);
    fit.objective = dispersion(data, fit.slopes, alpha, opt.rule);
    return fit;
  }
  if (opt.rule == ScoreRule::indicator) {
    const int m = detail::indicator_count(n, alpha);
    if (m >= n) {
      fit.slopes = minimin_slope(data);
      fit.objective = 0.0;
      fit.lower_band = true;
      return fit;
    }
    fit.slopes = detail::solve_cvar(data.x_centered(), data.y_centered(), m, &fit.objective,
                                    &fit.degenerate, opt.detect_degeneracy);
  } else {
    const double q = n * (1.0 - alpha);
    fit.slopes = detail::solve_cvar(data.x_centered(), data.y_centered(), q, &fit.objective,
                                    &fit.degenerate, opt.detect_degeneracy);
  }
  return fit;
}

// R-estimator slope path over a sorted alpha grid, compressed to segments
// where consecutive fits agree to 1e-7. The intercept slot is zero: the
// estimator is location invariant and carries no intercept.
inline ProcessTrajectory r_estimator_process(const Dataset& data,
                                             const std::vector<double>& alpha_grid,
                                             const RFitOptions& opt = {}) {
  ProcessTrajectory traj;
  traj.source = TrajectorySource::r_estimator;
  double prev_alpha = 0.0;
  for (double a : alpha_grid) {
    const RFit fit = fit_r_estimator(data, a, opt);
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(1 + data.p());
    coef.tail(data.p()) = fit.slopes;
    if (!traj.segments.empty() && (traj.segments.back() - coef).cwiseAbs().maxCoeff() <= 1e-7) {
      prev_alpha = a;
      continue;
    }
    if (!traj.segments.empty()) traj.breakpoints.push_back(0.5 * (prev_alpha + a));
    traj.segments.push_back(std::move(coef));
    prev_alpha = a;
  }
  return traj;
}

}  // namespace rqproc
