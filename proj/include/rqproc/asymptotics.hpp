#pragma once

// Standardizations and condition checks: the quantile scale sigma_alpha, the
// trimming boundary alpha_n*, design summaries with the Noether leverage,
// tail-envelope checks, the standardized slope process, and the Bahadur /
// uniform-linearity residuals.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rqproc/dataset.hpp"
#include "rqproc/error_models.hpp"
#include "rqproc/jaeckel.hpp"
#include "rqproc/quantreg.hpp"
#include "rqproc/rank_scores.hpp"

namespace rqproc {

struct AlphaVector {
  double alpha = 0.0;
  Eigen::VectorXd value;
};

// sqrt(alpha(1-alpha)) / f(F^{-1}(alpha)); diverges at the tails.
inline double sigma_alpha(const ErrorModel& model, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("sigma_alpha: alpha must lie in (0,1)");
  const double fq = model.density_at_quantile(alpha);
  if (!(fq > 1e-300) || !std::isfinite(fq))
    throw std::runtime_error("sigma_alpha: density underflow at alpha=" + std::to_string(alpha));
  return std::sqrt(alpha * (1.0 - alpha)) / fq;
}

// Trimming boundary 1/n^(1+4b).
inline double alpha_star(long n, double b) {
  if (n < 1) throw std::invalid_argument("alpha_star: n must be >= 1");
  if (b < 0.0) throw std::invalid_argument("alpha_star: b must be >= 0");
  return std::pow(static_cast<double>(n), -(1.0 + 4.0 * b));
}

struct DesignSummary {
  Eigen::MatrixXd q_matrix;        // sum of centered outer products
  Eigen::MatrixXd q_sqrt;          // symmetric square root
  Eigen::MatrixXd q_inverse_sqrt;  // symmetric inverse square root
  double noether_max = 0.0;        // max leverage
  Eigen::RowVectorXd x_bar;
};

inline DesignSummary design_summary(const Dataset& data) {
  data.validate();
  DesignSummary s;
  const auto p = data.p();
  s.x_bar = data.x_mean();
  if (p == 0) {
    s.q_matrix = s.q_sqrt = s.q_inverse_sqrt = Eigen::MatrixXd(0, 0);
    return s;
  }
  const Eigen::MatrixXd xc = data.x_centered();
  s.q_matrix = xc.transpose() * xc;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.q_matrix);
  const Eigen::VectorXd ev = eig.eigenvalues();
  if (ev.minCoeff() <= 1e-12 * std::max(1.0, ev.maxCoeff()))
    throw std::invalid_argument("design_summary: Q_n is singular (rank < p)");
  s.q_sqrt = eig.operatorSqrt();
  s.q_inverse_sqrt = eig.operatorInverseSqrt();
  const Eigen::MatrixXd half = xc * s.q_inverse_sqrt;  // leverage_i = ||half_i||^2
  s.noether_max = half.rowwise().squaredNorm().maxCoeff();
  return s;
}

struct F3Report {
  bool pass = true;
  double max_quantile_ratio = 0.0;  // |F^{-1}| against its envelope
  double max_density_ratio = 0.0;   // 1/f(F^{-1}) against its envelope
  double worst_alpha_quantile = 0.0;
  double worst_alpha_density = 0.0;
  double alpha_floor = 0.0;
  int points = 0;
};

// Checks the tail envelopes on a log-spaced grid in (0, alpha0] and its
// mirror [1-alpha0, 1). Violations are reported, not thrown, so user models
// can be probed.
inline F3Report check_f3(const ErrorModel& model, double alpha0, double alpha_floor = 1e-8,
                         int points_per_side = 200) {
  if (!(alpha0 > 0.0 && alpha0 <= 0.5))
    throw std::invalid_argument("check_f3: alpha0 must lie in (0, 1/2]");
  if (!(alpha_floor > 0.0 && alpha_floor < alpha0))
    throw std::invalid_argument("check_f3: floor must lie in (0, alpha0)");
  F3Report rep;
  rep.alpha_floor = alpha_floor;
  const double a = model.tail_exponent_a, c = model.tail_constant_c;
  auto probe = [&](double alpha) {
    const double env = c * std::pow(alpha * (1.0 - alpha), -a);
    const double qr = std::abs(model.quantile(alpha)) / env;
    if (qr > rep.max_quantile_ratio) {
      rep.max_quantile_ratio = qr;
      rep.worst_alpha_quantile = alpha;
    }
    const double env_d = c * std::pow(alpha * (1.0 - alpha), -a - 1.0);
    const double dr = (1.0 / model.density_at_quantile(alpha)) / env_d;
    if (dr > rep.max_density_ratio) {
      rep.max_density_ratio = dr;
      rep.worst_alpha_density = alpha;
    }
    ++rep.points;
  };
  const double lr = std::log(alpha0 / alpha_floor) / (points_per_side - 1);
  for (int i = 0; i < points_per_side; ++i) {
    const double alpha = alpha_floor * std::exp(lr * i);
    probe(alpha);
    probe(1.0 - alpha);
  }
  rep.pass = rep.max_quantile_ratio <= 1.0 && rep.max_density_ratio <= 1.0;
  return rep;
}

// f(F^{-1}(alpha)) Q_n^{1/2} (beta_hat(alpha) - beta_true) along a trajectory.
inline std::vector<AlphaVector> standardized_slope_process(
    const Dataset& data, const ProcessTrajectory& trajectory, const ErrorModel& model,
    const Eigen::VectorXd& beta_true, const std::vector<double>& alpha_grid,
    double b_exponent = 0.1) {
  if (trajectory.source == TrajectorySource::two_step)
    throw std::invalid_argument("standardized_slope_process: trajectory must be rq or r-estimator");
  if (beta_true.size() != data.p())
    throw std::invalid_argument("standardized_slope_process: beta length must equal p");
  const DesignSummary ds = design_summary(data);
  const double astar = alpha_star(data.n(), b_exponent);
  std::vector<AlphaVector> out;
  out.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    if (alpha < astar || alpha > 1.0 - astar)
      throw std::invalid_argument("standardized_slope_process: alpha outside [" +
                                  std::to_string(astar) + ", " + std::to_string(1.0 - astar) +
                                  "]");
    const Eigen::VectorXd dev = trajectory.slopes_at(alpha) - beta_true;
    out.push_back({alpha, model.density_at_quantile(alpha) * (ds.q_sqrt * dev)});
  }
  return out;
}

namespace detail {

inline Dataset residualized(const Dataset& data, const Eigen::VectorXd& beta_true) {
  Dataset d;
  d.X = data.X;
  d.y = data.y;
  if (data.p() > 0) d.y -= data.X * beta_true;
  return d;
}

}  // namespace detail

// || sqrt(n)/sigma_alpha (beta_hat - beta) - (alpha(1-alpha))^{-1/2} n Q^{-1} A(0) ||,
// the distance between the standardized R-estimator and its score-statistic
// representation. A(0) is evaluated at the true coefficients.
inline double bahadur_residual(const Dataset& data, const ErrorModel& model,
                               const Eigen::VectorXd& beta_true, double alpha,
                               double b_exponent = 0.1) {
  data.validate();
  const double astar = alpha_star(data.n(), b_exponent);
  if (alpha < astar || alpha > 1.0 - astar)
    throw std::invalid_argument("bahadur_residual: alpha outside the trimmed band");
  const int n = static_cast<int>(data.n());
  const Dataset data0 = detail::residualized(data, beta_true);
  RFitOptions opt;
  opt.detect_degeneracy = false;
  const RFit fit = fit_r_estimator(data, alpha, opt);
  const DesignSummary ds = design_summary(data);
  const ScoreStatisticEngine eng(data0, Eigen::VectorXd::Zero(data.p()));
  const Eigen::VectorXd a0 = eng.eval(alpha);
  const Eigen::VectorXd u = std::pow(alpha * (1.0 - alpha), -0.5) * n *
                            ds.q_matrix.ldlt().solve(a0);
  const Eigen::VectorXd lhs =
      std::sqrt(static_cast<double>(n)) / sigma_alpha(model, alpha) * (fit.slopes - beta_true);
  return (lhs - u).norm();
}

enum class LinearityForm { scaled_band, plain_full };

// Deterministic probe set in the ball ||b|| <= K: the zero vector plus a
// Kronecker low-discrepancy sweep of directions and radii.
inline std::vector<Eigen::VectorXd> probe_ball(int p, double K, int count = 257) {
  std::vector<Eigen::VectorXd> probes;
  probes.reserve(count);
  probes.push_back(Eigen::VectorXd::Zero(p));
  if (p == 0) return probes;
  // generalized golden ratio for dimension p+1
  double g = 1.5;
  for (int it = 0; it < 64; ++it) g = std::pow(1.0 + g, 1.0 / (p + 2));
  std::vector<double> step(p + 1);
  for (int j = 0; j <= p; ++j) step[j] = std::fmod(std::pow(1.0 / g, j + 1), 1.0);
  for (int k = 1; k < count; ++k) {
    Eigen::VectorXd d(p);
    for (int j = 0; j < p; ++j) {
      double u = std::fmod(0.5 + k * step[j], 1.0);
      u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
      d[j] = inverse_normal_cdf(u);
    }
    const double nrm = d.norm();
    if (nrm < 1e-12) continue;
    const double ur = std::fmod(0.5 + k * step[p], 1.0);
    const double radius = K * std::pow(ur, 1.0 / p);
    probes.push_back(radius / nrm * d);
  }
  return probes;
}

// Supremum over the probe ball and the alpha grid of the uniform-linearity
// discrepancy of the score statistic, in either parameterization.
inline double linearity_residual(const Dataset& data, const ErrorModel& model,
                                 const Eigen::VectorXd& beta_true, double K,
                                 const std::vector<double>& alpha_grid, LinearityForm form,
                                 double b_exponent = 0.1, int probe_count = 257) {
  data.validate();
  const int n = static_cast<int>(data.n());
  const int p = static_cast<int>(data.p());
  const Dataset data0 = detail::residualized(data, beta_true);
  const DesignSummary ds = design_summary(data);
  const double astar = alpha_star(n, b_exponent);
  if (form == LinearityForm::scaled_band) {
    for (double a : alpha_grid)
      if (a < astar || a > 1.0 - astar)
        throw std::invalid_argument("linearity_residual: alpha outside the trimmed band");
  } else {
    for (double a : alpha_grid)
      if (a < 0.0 || a > 1.0)
        throw std::invalid_argument("linearity_residual: alpha outside [0,1]");
  }
  const ScoreStatisticEngine eng0(data0, Eigen::VectorXd::Zero(p));
  const auto probes = probe_ball(p, K, probe_count);
  double sup = 0.0;
  if (form == LinearityForm::scaled_band) {
    // The (alpha(1-alpha))^{-1/2} weight belongs to the score difference
    // alone: the shift sigma_alpha*b moves the statistic by about
    // -sqrt(alpha(1-alpha)) Q b / n, so only the weighted difference cancels
    // against Q b / n.
    for (double alpha : alpha_grid) {
      const double sa = sigma_alpha(model, alpha);
      const double w = std::pow(alpha * (1.0 - alpha), -0.5);
      const Eigen::VectorXd a0 = eng0.eval(alpha);
      for (const auto& b : probes) {
        const ScoreStatisticEngine eng(data0, sa * b);
        const Eigen::VectorXd disc = w * (eng.eval(alpha) - a0) + ds.q_matrix * b / n;
        sup = std::max(sup, disc.norm());
      }
    }
  } else {
    for (const auto& b : probes) {
      const ScoreStatisticEngine eng(data0, b);
      for (double alpha : alpha_grid) {
        const Eigen::VectorXd disc = eng.eval(alpha) - eng0.eval(alpha) +
                                     model.density_at_quantile(alpha) * (ds.q_matrix * b) / n;
        sup = std::max(sup, disc.norm());
      }
    }
  }
  return sup;
}

// Supremum discrepancy between the scaled dispersion increment and its
// quadratic model in b.
inline double quadratic_approx_residual(const Dataset& data, const ErrorModel& model,
                                        const Eigen::VectorXd& beta_true, double K,
                                        const std::vector<double>& alpha_grid,
                                        int probe_count = 129) {
  data.validate();
  const int n = static_cast<int>(data.n());
  const int p = static_cast<int>(data.p());
  const Dataset data0 = detail::residualized(data, beta_true);
  const DesignSummary ds = design_summary(data);
  const ScoreStatisticEngine eng0(data0, Eigen::VectorXd::Zero(p));
  const auto probes = probe_ball(p, K, probe_count);
  const double sqn = std::sqrt(static_cast<double>(n));
  double sup = 0.0;
  for (double alpha : alpha_grid) {
    const double sa = sigma_alpha(model, alpha);
    const double w = std::pow(alpha * (1.0 - alpha), -0.5);
    const double d0 = dispersion(data0, Eigen::VectorXd::Zero(p), alpha, ScoreRule::hajek);
    const Eigen::VectorXd a0 = eng0.eval(alpha);
    for (const auto& b : probes) {
      const double db = dispersion(data0, (sa / sqn) * b, alpha, ScoreRule::hajek);
      const double lin = w * ((db - d0) / sa + b.dot(a0));
      const double quad = 0.5 * b.dot(ds.q_matrix * b) / n;
      sup = std::max(sup, std::abs(lin - quad));
    }
  }
  return sup;
}

}  // namespace rqproc
