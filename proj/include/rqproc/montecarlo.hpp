#pragma once

// Seeded replicate engine: generates model data, runs the fitters, and
// aggregates Brownian-bridge diagnostics, drift tracking and rate studies.
// Replicates are embarrassingly parallel; aggregation always reduces in
// replicate order, so results do not depend on the thread count.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rqproc/asymptotics.hpp"
#include "rqproc/dataset.hpp"
#include "rqproc/error_models.hpp"
#include "rqproc/jaeckel.hpp"
#include "rqproc/quantreg.hpp"
#include "rqproc/rank_scores.hpp"
#include "rqproc/rng.hpp"

namespace rqproc {

enum class DesignKind { iid_uniform, iid_normal, fixed_matrix };
enum class StudyKind { bridge, drift, rate };

struct SimConfig {
  int n = 200;
  int p = 1;
  int replicates = 200;
  std::string error_model = "logistic";
  DesignKind design = DesignKind::iid_uniform;
  std::string design_path;              // for fixed_matrix
  Eigen::MatrixXd fixed_design;         // preloaded matrix, used when nonempty
  double beta0 = 0.0;
  Eigen::VectorXd beta;                 // length p
  std::vector<double> alpha_grid = {0.1, 0.25, 0.5, 0.75, 0.9};
  std::uint64_t seed = 20240601;
  double b_exponent = 0.1;              // the (X2) exponent b
  Eigen::VectorXd shift;                // contiguous drift; empty = none
  TrajectorySource trajectory_source = TrajectorySource::regression_quantile;
  StudyKind study = StudyKind::bridge;
  std::vector<int> n_list = {100, 400, 1600};  // rate study sizes
  double linearity_K = 2.0;

  void validate() const {
    if (replicates < 1) throw std::invalid_argument("simconfig: replicates must be >= 1");
    if (n <= p + 1) throw std::invalid_argument("simconfig: need n > p + 1");
    if (beta.size() != p) throw std::invalid_argument("simconfig: beta length must equal p");
    if (shift.size() != 0 && shift.size() != p)
      throw std::invalid_argument("simconfig: shift length must equal p");
    double prev = 0.0;
    for (double a : alpha_grid) {
      if (!(a > prev && a < 1.0))
        throw std::invalid_argument("simconfig: alpha_grid must be strictly increasing in (0,1)");
      prev = a;
    }
    const ErrorModel m = rqproc::error_model(error_model);
    if (!(b_exponent > m.tail_exponent_a))
      throw std::invalid_argument("simconfig: b_exponent must exceed the model tail exponent");
  }
};

// The design is a function of (seed, n, p) only: replicates share one X, as
// in a fixed-design triangular array.
inline Eigen::MatrixXd generate_design(const SimConfig& cfg) {
  if (cfg.design == DesignKind::fixed_matrix) {
    if (cfg.fixed_design.rows() != cfg.n || cfg.fixed_design.cols() != cfg.p)
      throw std::runtime_error("generate: fixed design matrix not loaded or has wrong shape");
    return cfg.fixed_design;
  }
  const CounterRng rng(cfg.seed, CounterRng::design, 0);
  Eigen::MatrixXd X(cfg.n, cfg.p);
  for (int i = 0; i < cfg.n; ++i) {
    for (int j = 0; j < cfg.p; ++j) {
      const double u = rng.uniform(static_cast<std::uint64_t>(i) * cfg.p + j);
      X(i, j) = (cfg.design == DesignKind::iid_uniform) ? u : inverse_normal_cdf(u);
    }
  }
  return X;
}

inline Dataset generate(const SimConfig& cfg, int replicate) {
  cfg.validate();
  const ErrorModel model = rqproc::error_model(cfg.error_model);
  Dataset data;
  data.X = generate_design(cfg);
  const CounterRng rng(cfg.seed, CounterRng::errors, static_cast<std::uint64_t>(replicate));
  data.y.resize(cfg.n);
  for (int i = 0; i < cfg.n; ++i)
    data.y[i] = cfg.beta0 + model.quantile(rng.uniform(static_cast<std::uint64_t>(i)));
  if (cfg.p > 0) {
    data.y += data.X * cfg.beta;
    if (cfg.shift.size() > 0)
      data.y += data.X * cfg.shift / std::sqrt(static_cast<double>(cfg.n));
  }
  return data;
}

struct ReplicateFailure {
  int replicate = 0;
  std::string message;
};

struct BridgeDiagnostics {
  std::vector<double> grid;
  std::vector<Eigen::MatrixXd> cov_empirical;  // per coordinate, grid x grid
  Eigen::MatrixXd mean;                        // grid x p
  Eigen::MatrixXd mean_se;                     // grid x p
  double cross_cov_max = 0.0;
  Eigen::VectorXd ks_stats;                    // per coordinate, alpha = 0.5 marginal
  int replicates_used = 0;
};

struct BridgeStudyReport {
  BridgeDiagnostics slopes;        // standardized slope process
  BridgeDiagnostics score;         // sqrt(n) Q^{-1/2} A_nalpha(0) at the truth
  std::vector<ReplicateFailure> failures;
};

namespace detail {

// Runs fn(replicate) on `threads` workers and returns results in replicate
// order regardless of scheduling.
template <typename Result, typename Fn>
inline std::vector<std::optional<Result>> run_replicates(int replicates, int threads, Fn&& fn,
                                                         std::vector<ReplicateFailure>* failures) {
  std::vector<std::optional<Result>> results(replicates);
  std::vector<std::optional<std::string>> errors(replicates);
  std::atomic<int> next{0};
  const int nthreads = std::max(1, std::min(threads, replicates));
  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= replicates) return;
      try {
        results[r] = fn(r);
      } catch (const std::exception& e) {
        errors[r] = e.what();
      }
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (int r = 0; r < replicates; ++r)
    if (errors[r]) failures->push_back({r, *errors[r]});
  return results;
}

inline double ks_distance_vs_normal(std::vector<double> sample, double sd) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = 0.5 * std::erfc(-sample[i] / (sd * std::sqrt(2.0)));
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Covariance diagnostics of per-replicate (grid x p) matrices.
inline BridgeDiagnostics aggregate_bridge(const std::vector<Eigen::MatrixXd>& reps,
                                          const std::vector<double>& grid, int p) {
  BridgeDiagnostics diag;
  diag.grid = grid;
  const int g = static_cast<int>(grid.size());
  const int R = static_cast<int>(reps.size());
  diag.replicates_used = R;
  diag.mean = Eigen::MatrixXd::Zero(g, p);
  for (const auto& z : reps) diag.mean += z;
  diag.mean /= std::max(1, R);
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(g, p);
  for (const auto& z : reps) var += (z - diag.mean).cwiseAbs2();
  var /= std::max(1, R - 1);
  diag.mean_se = (var / std::max(1, R)).cwiseSqrt();
  diag.cov_empirical.assign(p, Eigen::MatrixXd::Zero(g, g));
  for (int j = 0; j < p; ++j) {
    for (const auto& z : reps) {
      const Eigen::VectorXd c = z.col(j) - diag.mean.col(j);
      diag.cov_empirical[j] += c * c.transpose();
    }
    diag.cov_empirical[j] /= std::max(1, R - 1);
  }
  diag.cross_cov_max = 0.0;
  for (int j = 0; j < p; ++j) {
    for (int j2 = j + 1; j2 < p; ++j2) {
      for (int s = 0; s < g; ++s) {
        double cov = 0.0;
        for (const auto& z : reps)
          cov += (z(s, j) - diag.mean(s, j)) * (z(s, j2) - diag.mean(s, j2));
        cov /= std::max(1, R - 1);
        diag.cross_cov_max = std::max(diag.cross_cov_max, std::abs(cov));
      }
    }
  }
  // alpha = 0.5 marginal against N(0, 1/4)
  int half = 0;
  double best = 1.0;
  for (int s = 0; s < g; ++s) {
    if (std::abs(grid[s] - 0.5) < best) {
      best = std::abs(grid[s] - 0.5);
      half = s;
    }
  }
  diag.ks_stats.resize(p);
  for (int j = 0; j < p; ++j) {
    std::vector<double> sample;
    sample.reserve(R);
    for (const auto& z : reps) sample.push_back(z(half, j));
    diag.ks_stats[j] = sample.empty() ? 0.0 : ks_distance_vs_normal(std::move(sample), 0.5);
  }
  return diag;
}

inline void enforce_failure_policy(int replicates, const std::vector<ReplicateFailure>& failures) {
  if (failures.size() * 100 > static_cast<std::size_t>(replicates))
    throw std::runtime_error("montecarlo: more than 1% of replicates failed (" +
                             std::to_string(failures.size()) + " of " +
                             std::to_string(replicates) + ")");
}

}  // namespace detail

inline BridgeStudyReport run_bridge_study(const SimConfig& cfg, int threads = 1) {
  cfg.validate();
  const ErrorModel model = rqproc::error_model(cfg.error_model);
  const double astar = alpha_star(cfg.n, cfg.b_exponent);
  for (double a : cfg.alpha_grid)
    if (a < astar || a > 1.0 - astar)
      throw std::invalid_argument("run_bridge_study: alpha_grid must lie in the trimmed band");
  const int g = static_cast<int>(cfg.alpha_grid.size());
  const int p = cfg.p;

  SimConfig base = cfg;
  base.fixed_design = generate_design(cfg);
  base.design = DesignKind::fixed_matrix;
  Dataset shape;
  shape.X = base.fixed_design;
  shape.y = generate(base, 0).y;  // the summary only uses X
  const DesignSummary ds = design_summary(shape);

  struct RepResult {
    Eigen::MatrixXd z;  // standardized slopes, g x p
    Eigen::MatrixXd w;  // standardized score process, g x p
  };
  BridgeStudyReport report;
  auto one = [&](int r) {
    const Dataset data = generate(base, r);
    RepResult res;
    res.z.resize(g, p);
    res.w.resize(g, p);
    RFitOptions ropt;
    ropt.detect_degeneracy = false;
    for (int s = 0; s < g; ++s) {
      const double alpha = cfg.alpha_grid[s];
      Eigen::VectorXd slopes;
      if (cfg.trajectory_source == TrajectorySource::r_estimator)
        slopes = fit_r_estimator(data, alpha, ropt).slopes;
      else
        slopes = fit_rq(data, alpha).slopes;
      res.z.row(s) =
          (model.density_at_quantile(alpha) * (ds.q_sqrt * (slopes - cfg.beta))).transpose();
    }
    const Dataset data0 = detail::residualized(data, cfg.beta);
    const ScoreStatisticEngine eng(data0, Eigen::VectorXd::Zero(p));
    const double sqn = std::sqrt(static_cast<double>(cfg.n));
    for (int s = 0; s < g; ++s)
      res.w.row(s) = (sqn * (ds.q_inverse_sqrt * eng.eval(cfg.alpha_grid[s]))).transpose();
    return res;
  };
  const auto results =
      detail::run_replicates<RepResult>(cfg.replicates, threads, one, &report.failures);
  detail::enforce_failure_policy(cfg.replicates, report.failures);
  std::vector<Eigen::MatrixXd> zs, ws;
  zs.reserve(results.size());
  ws.reserve(results.size());
  for (const auto& r : results) {
    if (!r) continue;
    zs.push_back(r->z);
    ws.push_back(r->w);
  }
  report.slopes = detail::aggregate_bridge(zs, cfg.alpha_grid, p);
  report.score = detail::aggregate_bridge(ws, cfg.alpha_grid, p);
  return report;
}

struct DriftReport {
  std::vector<double> grid;
  Eigen::MatrixXd predicted;       // grid x p
  Eigen::MatrixXd empirical_mean;  // grid x p
  Eigen::MatrixXd mean_se;         // grid x p
  double max_abs_deviation = 0.0;
  std::vector<ReplicateFailure> failures;
  int replicates_used = 0;
};

// Data carry the contiguous shift but statistics are evaluated at beta, so
// the score-statistic mean should track the predicted drift.
inline DriftReport run_drift_study(const SimConfig& cfg, int threads = 1) {
  cfg.validate();
  if (cfg.shift.size() != cfg.p)
    throw std::invalid_argument("run_drift_study: config must set a shift vector");
  const ErrorModel model = rqproc::error_model(cfg.error_model);
  const int g = static_cast<int>(cfg.alpha_grid.size());
  const int p = cfg.p;

  SimConfig base = cfg;
  base.fixed_design = generate_design(cfg);
  base.design = DesignKind::fixed_matrix;
  Dataset shape;
  shape.X = base.fixed_design;
  shape.y = generate(base, 0).y;
  const DesignSummary ds = design_summary(shape);

  DriftReport report;
  report.grid = cfg.alpha_grid;
  auto one = [&](int r) {
    const Dataset data = generate(base, r);
    const Dataset data0 = detail::residualized(data, cfg.beta);
    const ScoreStatisticEngine eng(data0, Eigen::VectorXd::Zero(p));
    Eigen::MatrixXd t(g, p);
    const double sqn = std::sqrt(static_cast<double>(cfg.n));
    for (int s = 0; s < g; ++s)
      t.row(s) = (sqn * (ds.q_inverse_sqrt * eng.eval(cfg.alpha_grid[s]))).transpose();
    return t;
  };
  const auto results =
      detail::run_replicates<Eigen::MatrixXd>(cfg.replicates, threads, one, &report.failures);
  detail::enforce_failure_policy(cfg.replicates, report.failures);
  std::vector<Eigen::MatrixXd> ts;
  for (const auto& r : results)
    if (r) ts.push_back(*r);
  const BridgeDiagnostics diag = detail::aggregate_bridge(ts, cfg.alpha_grid, p);
  report.replicates_used = diag.replicates_used;
  report.empirical_mean = diag.mean;
  report.mean_se = diag.mean_se;
  report.predicted.resize(g, p);
  const Eigen::VectorXd qs = ds.q_sqrt * cfg.shift / std::sqrt(static_cast<double>(cfg.n));
  for (int s = 0; s < g; ++s)
    report.predicted.row(s) = (model.density_at_quantile(cfg.alpha_grid[s]) * qs).transpose();
  report.max_abs_deviation = (report.empirical_mean - report.predicted).cwiseAbs().maxCoeff();
  return report;
}

struct RateStudyRow {
  int n = 0;
  double median_sup_scaled_error = 0.0;  // sup over grid of sqrt(n)/sigma ||bhat - b||
  double median_bahadur = 0.0;           // at alpha = 0.5
  double median_linearity_band = 0.0;    // scaled band form
  double median_linearity_full = 0.0;    // plain form over [0,1]
  int replicates_used = 0;
};

struct RateReport {
  std::vector<RateStudyRow> rows;
  double sup_error_ratio = 0.0;  // last median over first median
  std::vector<ReplicateFailure> failures;
};

inline RateReport run_rate_study(const SimConfig& cfg, int threads = 1) {
  cfg.validate();
  if (cfg.n_list.empty()) throw std::invalid_argument("run_rate_study: empty n list");
  const ErrorModel model = rqproc::error_model(cfg.error_model);
  RateReport report;
  for (int n : cfg.n_list) {
    SimConfig c = cfg;
    c.n = n;
    c.fixed_design.resize(0, 0);
    c.fixed_design = generate_design(c);
    c.design = DesignKind::fixed_matrix;
    struct RepResult {
      double sup_err, bahadur, lin_band, lin_full;
    };
    auto one = [&](int r) {
      const Dataset data = generate(c, r);
      RepResult res{};
      RFitOptions ropt;
      ropt.detect_degeneracy = false;
      for (double alpha : c.alpha_grid) {
        const RFit fit = fit_r_estimator(data, alpha, ropt);
        const double err = std::sqrt(static_cast<double>(n)) / sigma_alpha(model, alpha) *
                           (fit.slopes - c.beta).norm();
        res.sup_err = std::max(res.sup_err, err);
      }
      res.bahadur = bahadur_residual(data, model, c.beta, 0.5, c.b_exponent);
      res.lin_band = linearity_residual(data, model, c.beta, c.linearity_K, c.alpha_grid,
                                        LinearityForm::scaled_band, c.b_exponent);
      std::vector<double> full_grid = c.alpha_grid;
      full_grid.insert(full_grid.begin(), 0.0);
      full_grid.push_back(1.0);
      res.lin_full = linearity_residual(data, model, c.beta, c.linearity_K, full_grid,
                                        LinearityForm::plain_full, c.b_exponent);
      return res;
    };
    std::vector<ReplicateFailure> fails;
    const auto results = detail::run_replicates<RepResult>(c.replicates, threads, one, &fails);
    detail::enforce_failure_policy(c.replicates, fails);
    for (auto& f : fails) report.failures.push_back(f);
    auto median_of = [&](auto getter) {
      std::vector<double> v;
      for (const auto& r : results)
        if (r) v.push_back(getter(*r));
      std::sort(v.begin(), v.end());
      if (v.empty()) return 0.0;
      const std::size_t h = v.size() / 2;
      return (v.size() % 2 == 1) ? v[h] : 0.5 * (v[h - 1] + v[h]);
    };
    RateStudyRow row;
    row.n = n;
    row.median_sup_scaled_error = median_of([](const RepResult& r) { return r.sup_err; });
    row.median_bahadur = median_of([](const RepResult& r) { return r.bahadur; });
    row.median_linearity_band = median_of([](const RepResult& r) { return r.lin_band; });
    row.median_linearity_full = median_of([](const RepResult& r) { return r.lin_full; });
    int used = 0;
    for (const auto& r : results)
      if (r) ++used;
    row.replicates_used = used;
    report.rows.push_back(row);
  }
  if (report.rows.size() >= 2 && report.rows.front().median_sup_scaled_error > 0)
    report.sup_error_ratio = report.rows.back().median_sup_scaled_error /
                             report.rows.front().median_sup_scaled_error;
  return report;
}

}  // namespace rqproc
