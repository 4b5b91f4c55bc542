#pragma once

// Hajek rank scores in the location model (closed form and as an LP), the
// regression rank scores obtained as the dual of the quantile-regression
// primal, and the centered score-statistic process.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rqproc/dataset.hpp"
#include "rqproc/lp.hpp"
#include "rqproc/quantreg.hpp"
#include "rqproc/ranks.hpp"

namespace rqproc {

struct ScoreVector {
  double alpha = 0.0;
  Eigen::VectorXd scores;
};

struct ScoreProcessPoint {
  double alpha = 0.0;
  Eigen::VectorXd statistic;  // length p
};

// Score of rank i at level alpha: 0 below the n*alpha band, 1 above it,
// linear inside. Continuous in alpha.
inline double hajek_score(int rank, int n, double alpha) {
  const double na = n * alpha;
  if (rank <= na) return 0.0;
  if (rank >= na + 1.0) return 1.0;
  return rank - na;
}

inline ScoreVector hajek_scores_closed_form(const std::vector<int>& ranks, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("hajek_scores: alpha must lie in [0,1]");
  const int n = static_cast<int>(ranks.size());
  std::vector<bool> seen(n + 1, false);
  for (int r : ranks) {
    if (r < 1 || r > n || seen[r])
      throw std::invalid_argument("hajek_scores: ranks must be a permutation of 1..n");
    seen[r] = true;
  }
  ScoreVector out;
  out.alpha = alpha;
  out.scores.resize(n);
  for (int i = 0; i < n; ++i) out.scores[i] = hajek_score(ranks[i], n, alpha);
  return out;
}

// Location-model score LP: maximize Z'a subject to sum(a) = n(1-alpha),
// 0 <= a <= 1. The optimum equals the closed-form scores of the ranks of Z.
inline ScoreVector rank_scores_lp(const Eigen::VectorXd& Z, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("rank_scores_lp: alpha must lie in (0,1)");
  const int n = static_cast<int>(Z.size());
  lp::Problem prob;
  prob.objective = Z;
  prob.constraints = Eigen::MatrixXd::Ones(1, n);
  prob.rhs = Eigen::VectorXd::Constant(1, n * (1.0 - alpha));
  prob.lower = Eigen::VectorXd::Zero(n);
  prob.upper = Eigen::VectorXd::Ones(n);
  prob.sense = lp::Sense::maximize;
  const lp::Solution sol = lp::solve(std::move(prob));
  if (sol.status != lp::Status::optimal)
    throw std::runtime_error("rank_scores_lp: LP did not reach an optimum");
  ScoreVector out;
  out.alpha = alpha;
  out.scores = sol.variables.cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

// Dual scores of the quantile-regression fit; one LP solve provides both the
// coefficients and the scores.
inline ScoreVector regression_rank_scores(const Dataset& data, double alpha) {
  const QuantileFit fit = fit_rq(data, alpha);
  return {alpha, fit.dual_scores};
}

// Evaluates A_n(alpha, b) = n^{-1/2} sum (x_i - xbar) a(R_i, alpha) for a
// fixed local direction b and many alpha. Ranks come from the shifted
// residuals y_i - n^{-1/2} x_i'b; after one sort, each alpha costs O(p) via
// suffix sums over the rank-ordered centered covariates.
class ScoreStatisticEngine {
 public:
  ScoreStatisticEngine(const Dataset& data, const Eigen::VectorXd& b) {
    if (b.size() != data.p())
      throw std::invalid_argument("score_statistic: direction length must equal p");
    n_ = static_cast<int>(data.n());
    p_ = static_cast<int>(data.p());
    Eigen::VectorXd resid = data.y;
    if (p_ > 0) resid -= data.X * b / std::sqrt(static_cast<double>(n_));
    // fully tied residuals carry no rank information: the exchangeable
    // average-score convention makes the centered statistic zero
    all_tied_ = (resid.maxCoeff() == resid.minCoeff());
    const std::vector<int> ranks = ranks_of(resid);
    const Eigen::MatrixXd xc = data.x_centered();
    xc_by_rank_.resize(n_, p_);
    for (int i = 0; i < n_; ++i) xc_by_rank_.row(ranks[i] - 1) = xc.row(i);
    suffix_.resize(n_ + 2, p_);
    suffix_.row(n_ + 1).setZero();
    suffix_.row(n_).setZero();  // suffix_(r) = sum over ranks >= r+1 ... shifted below
    suffix_.row(n_) = xc_by_rank_.row(n_ - 1);
    for (int r = n_ - 1; r >= 1; --r)
      suffix_.row(r) = suffix_.row(r + 1) + xc_by_rank_.row(r - 1);
  }

  Eigen::VectorXd eval(double alpha) const {
    if (all_tied_) return Eigen::VectorXd::Zero(p_);
    const double na = n_ * alpha;
    const int base = static_cast<int>(std::floor(na));
    Eigen::VectorXd stat = Eigen::VectorXd::Zero(p_);
    const int full_from = std::min(n_ + 1, base + 3);  // score is exactly 1 there
    stat += suffix_.row(full_from);
    for (int r = std::max(1, base); r <= std::min(n_, base + 2); ++r) {
      if (r >= full_from) break;
      const double a = hajek_score(r, n_, alpha);
      if (a != 0.0) stat += a * xc_by_rank_.row(r - 1).transpose();
    }
    return stat / std::sqrt(static_cast<double>(n_));
  }

 private:
  int n_ = 0, p_ = 0;
  bool all_tied_ = false;
  Eigen::MatrixXd xc_by_rank_;
  Eigen::MatrixXd suffix_;  // row r: sum of centered x over ranks >= r
};

// Score statistic A_n(alpha, b) at a single alpha.
inline ScoreProcessPoint score_statistic(const Dataset& data, const Eigen::VectorXd& b,
                                         double alpha) {
  data.validate();
  const ScoreStatisticEngine eng(data, b);
  return {alpha, eng.eval(alpha)};
}

inline std::vector<ScoreProcessPoint> score_statistic_process(
    const Dataset& data, const Eigen::VectorXd& b, const std::vector<double>& alpha_grid) {
  data.validate();
  const ScoreStatisticEngine eng(data, b);
  std::vector<ScoreProcessPoint> out;
  out.reserve(alpha_grid.size());
  for (double a : alpha_grid) out.push_back({a, eng.eval(a)});
  return out;
}

}  // namespace rqproc
