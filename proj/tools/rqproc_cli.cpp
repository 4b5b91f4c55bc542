// Command-line surface: fitting, process sweeps, condition checks and
// simulation studies. Every artifact embeds the run manifest; all randomness
// comes from the config seed.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "rqproc/rqproc.hpp"

using namespace rqproc;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunManifest make_manifest(const std::string& command, const std::string& config_bytes,
                          const std::vector<std::pair<std::string, std::string>>& inputs) {
  RunManifest m;
  m.command = command;
  m.config_digest = fnv1a_hex(config_bytes);
  m.created_at = utc_now();
  for (const auto& [name, bytes] : inputs) m.input_digests.emplace_back(name, fnv1a_hex(bytes));
  return m;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void write_json_artifact(const std::string& path, json j, const RunManifest& m) {
  j["manifest"] = to_json(m);
  write_text(path, j.dump(2) + "\n");
}

std::string manifest_csv_header(const RunManifest& m) {
  std::ostringstream out;
  out << "# manifest command=" << m.command << " config_digest=" << m.config_digest
      << " tool_version=" << m.tool_version << " created_at=" << m.created_at << "\n";
  return out.str();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json residual_summary(const Eigen::VectorXd& r) {
  Eigen::VectorXd s = r;
  std::sort(s.data(), s.data() + s.size());
  const auto q = [&](double p) { return s[static_cast<Eigen::Index>(p * (s.size() - 1))]; };
  return json{{"min", s[0]},          {"q1", q(0.25)},      {"median", q(0.5)},
              {"q3", q(0.75)},        {"max", s[s.size() - 1]},
              {"abs_max", r.cwiseAbs().maxCoeff()}};
}

json fit_to_json(const QuantileFit& fit, const std::string& method) {
  json j;
  j["method"] = method;
  j["alpha"] = fit.alpha;
  j["intercept"] = fit.intercept;
  j["slopes"] = vector_to_json(fit.slopes);
  j["objective"] = fit.objective;
  j["residual_summary"] = residual_summary(fit.residuals);
  if (fit.dual_scores.size() > 0) j["dual_scores"] = vector_to_json(fit.dual_scores);
  return j;
}

std::string trajectory_csv(const ProcessTrajectory& traj, const RunManifest& m) {
  std::ostringstream out;
  out << manifest_csv_header(m);
  out << "alpha_low,alpha_high,intercept";
  const int p = traj.segments.empty() ? 0 : static_cast<int>(traj.segments.front().size()) - 1;
  for (int j = 0; j < p; ++j) out << ",slope_" << (j + 1);
  out << "\n";
  double lo = 0.0;
  for (std::size_t s = 0; s < traj.segments.size(); ++s) {
    const double hi = (s < traj.breakpoints.size()) ? traj.breakpoints[s] : 1.0;
    out << format_double(lo) << "," << format_double(hi);
    for (Eigen::Index j = 0; j < traj.segments[s].size(); ++j)
      out << "," << format_double(traj.segments[s][j]);
    out << "\n";
    lo = hi;
  }
  return out.str();
}

std::string scores_csv(const Dataset& data, const QuantileFit& fit, const RunManifest& m) {
  std::ostringstream out;
  out << manifest_csv_header(m);
  out << "index,rank,score\n";
  const auto ranks = ranks_of(fit.residuals);
  for (Eigen::Index i = 0; i < data.n(); ++i)
    out << i << "," << ranks[i] << "," << format_double(fit.dual_scores[i]) << "\n";
  return out.str();
}

int cmd_fit(const std::string& csv, double alpha, const std::string& method,
            const std::string& response_col, const std::string& out_prefix) {
  const std::string bytes = read_file(csv);
  const Dataset data = read_csv_dataset(csv, response_col);
  const std::string options = "fit alpha=" + format_double(alpha) + " method=" + method +
                              " response=" + response_col;
  const RunManifest manifest = make_manifest("fit", options, {{csv, bytes}});
  json report;
  QuantileFit fit;
  if (method == "rq") {
    fit = fit_rq(data, alpha);
    report = fit_to_json(fit, method);
  } else if (method == "rtwostep") {
    fit = two_step_fit(data, alpha);
    report = fit_to_json(fit, method);
  } else if (method == "jaeckel") {
    const RFit rf = fit_r_estimator(data, alpha);
    report["method"] = method;
    report["alpha"] = alpha;
    report["slopes"] = vector_to_json(rf.slopes);
    report["objective"] = rf.objective;
    report["degenerate"] = rf.degenerate;
    report["lower_band"] = rf.lower_band;
    Eigen::VectorXd resid = data.y;
    if (data.p() > 0) resid -= data.X * rf.slopes;
    report["residual_summary"] = residual_summary(resid.array() - resid.mean());
  } else {
    std::cerr << "unknown method '" << method << "'\n";
    return 2;
  }
  std::cout << report.dump(2) << "\n";
  if (!out_prefix.empty()) {
    write_json_artifact(out_prefix + ".json", report, manifest);
    if (method == "rq") write_text(out_prefix + "_scores.csv", scores_csv(data, fit, manifest));
  }
  return 0;
}

int cmd_process(const std::string& csv, const std::string& method, int grid_points,
                const std::string& response_col, const std::string& out_prefix) {
  const std::string bytes = read_file(csv);
  const Dataset data = read_csv_dataset(csv, response_col);
  const std::string options = "process method=" + method +
                              " grid_points=" + std::to_string(grid_points) +
                              " response=" + response_col;
  const RunManifest manifest = make_manifest("process", options, {{csv, bytes}});
  json report;
  report["method"] = method;
  ProcessTrajectory traj;
  if (method == "rq") {
    ProcessOptions opt;
    if (grid_points > 0) opt.grid_points = grid_points;
    traj = rq_process(data, opt);
  } else if (method == "rtwostep") {
    const TwoStepProcess proc = two_step_process(data);
    traj = proc.trajectory;
    report["nominal_segments"] = proc.nominal_segments;
    report["distinct_segments"] = proc.distinct_segments;
  } else if (method == "jaeckel") {
    const int g = (grid_points > 0) ? grid_points : 99;
    std::vector<double> grid(g);
    for (int i = 0; i < g; ++i) grid[i] = (i + 1.0) / (g + 1.0);
    traj = r_estimator_process(data, grid);
    // per-alpha rows with objective and degeneracy flag
    std::ostringstream rows;
    rows << manifest_csv_header(manifest) << "alpha";
    for (int j = 0; j < data.p(); ++j) rows << ",slope_" << (j + 1);
    rows << ",objective,degenerate\n";
    for (double a : grid) {
      const RFit rf = fit_r_estimator(data, a);
      rows << format_double(a);
      for (Eigen::Index j = 0; j < rf.slopes.size(); ++j)
        rows << "," << format_double(rf.slopes[j]);
      rows << "," << format_double(rf.objective) << "," << (rf.degenerate ? 1 : 0) << "\n";
    }
    if (!out_prefix.empty()) write_text(out_prefix + "_fits.csv", rows.str());
  } else {
    std::cerr << "unknown method '" << method << "'\n";
    return 2;
  }
  report["segments"] = static_cast<int>(traj.segments.size());
  report["breakpoints"] = traj.breakpoints;
  std::cout << report.dump(2) << "\n";
  if (!out_prefix.empty()) {
    write_json_artifact(out_prefix + ".json", report, manifest);
    write_text(out_prefix + "_trajectory.csv", trajectory_csv(traj, manifest));
    const std::string svg = step_svg(traj);
    write_text(out_prefix + "_trajectory.svg",
               "<!-- manifest config_digest=" + manifest.config_digest + " -->\n" + svg);
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_prefix, int threads) {
  const std::string bytes = read_file(config_path);
  SimConfig cfg = sim_config_from_json(json::parse(bytes));
  if (cfg.design == DesignKind::fixed_matrix && cfg.fixed_design.size() == 0) {
    if (cfg.design_path.empty())
      throw std::invalid_argument("config: design_path required for fixed_matrix");
    cfg.fixed_design = read_csv_matrix(cfg.design_path);
  }
  const RunManifest manifest = make_manifest("simulate", bytes, {{config_path, bytes}});
  if (cfg.replicates == 1)
    std::cerr << "warning: replicates=1 gives degenerate (zero) covariance estimates\n";
  json report;
  std::string tables;
  if (cfg.study == StudyKind::bridge) {
    const BridgeStudyReport rep = run_bridge_study(cfg, threads);
    report = to_json(rep);
    if (!out_prefix.empty()) {
      for (std::size_t j = 0; j < rep.slopes.cov_empirical.size(); ++j) {
        std::ostringstream out;
        out << manifest_csv_header(manifest);
        const auto& cov = rep.slopes.cov_empirical[j];
        for (Eigen::Index r = 0; r < cov.rows(); ++r) {
          for (Eigen::Index c = 0; c < cov.cols(); ++c)
            out << (c ? "," : "") << format_double(cov(r, c));
          out << "\n";
        }
        write_text(out_prefix + "_cov_slope" + std::to_string(j + 1) + ".csv", out.str());
        write_text(out_prefix + "_cov_slope" + std::to_string(j + 1) + ".svg",
                   "<!-- manifest config_digest=" + manifest.config_digest + " -->\n" +
                       heatmap_svg(cov));
      }
    }
  } else if (cfg.study == StudyKind::drift) {
    const DriftReport rep = run_drift_study(cfg, threads);
    report = to_json(rep);
    std::ostringstream out;
    out << manifest_csv_header(manifest) << "alpha,coord,predicted,empirical_mean,mean_se\n";
    for (std::size_t s = 0; s < rep.grid.size(); ++s)
      for (int j = 0; j < cfg.p; ++j)
        out << format_double(rep.grid[s]) << "," << (j + 1) << ","
            << format_double(rep.predicted(s, j)) << ","
            << format_double(rep.empirical_mean(s, j)) << ","
            << format_double(rep.mean_se(s, j)) << "\n";
    tables = out.str();
  } else {
    const RateReport rep = run_rate_study(cfg, threads);
    report = to_json(rep);
    std::ostringstream out;
    out << manifest_csv_header(manifest)
        << "n,median_sup_scaled_error,median_bahadur,median_linearity_band,median_linearity_full\n";
    for (const auto& row : rep.rows)
      out << row.n << "," << format_double(row.median_sup_scaled_error) << ","
          << format_double(row.median_bahadur) << ","
          << format_double(row.median_linearity_band) << ","
          << format_double(row.median_linearity_full) << "\n";
    tables = out.str();
  }
  std::cout << report.dump(2) << "\n";
  if (!out_prefix.empty()) {
    write_json_artifact(out_prefix + ".json", report, manifest);
    if (!tables.empty()) write_text(out_prefix + "_table.csv", tables);
  }
  return 0;
}

int cmd_check(const std::string& model_name, double alpha0, long n, double b,
              const std::string& csv, const std::string& response_col,
              const std::string& out_prefix) {
  const ErrorModel model = error_model(model_name);
  const double astar = alpha_star(n, b);
  const F3Report f3 = check_f3(model, alpha0);
  json report;
  report["schema_version"] = report_schema_version;
  report["model"] = model_name;
  report["n"] = n;
  report["b"] = b;
  report["alpha_star"] = astar;
  report["f3"] = to_json(f3);
  std::printf("alpha_star = %.10g  (n=%ld, b=%g)\n", astar, n, b);
  std::printf("f3 check: %s (quantile ratio %.4g, density ratio %.4g)\n",
              f3.pass ? "pass" : "FAIL", f3.max_quantile_ratio, f3.max_density_ratio);
  std::printf("%8s %14s\n", "alpha", "sigma_alpha");
  json sigma_table = json::array();
  for (double a : {0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95}) {
    const double s = sigma_alpha(model, a);
    std::printf("%8.3f %14.8f\n", a, s);
    sigma_table.push_back(json{{"alpha", a}, {"sigma", s}});
  }
  report["sigma_table"] = sigma_table;
  bool hard_pass = f3.pass;
  if (!csv.empty()) {
    const Dataset data = read_csv_dataset(csv, response_col);
    try {
      const DesignSummary ds = design_summary(data);
      const Eigen::MatrixXd xc = data.x_centered();
      const Eigen::MatrixXd half = xc * ds.q_inverse_sqrt;
      const Eigen::VectorXd lev = half.rowwise().squaredNorm();
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ds.q_matrix);
      report["noether_max"] = ds.noether_max;
      report["leverage_sum"] = lev.sum();
      report["q_spectrum"] = vector_to_json(eig.eigenvalues());
      std::printf("noether max leverage = %.8f, leverage sum = %.8f (p=%ld)\n", ds.noether_max,
                  lev.sum(), static_cast<long>(data.p()));
    } catch (const std::invalid_argument& e) {
      report["design_error"] = e.what();
      std::printf("design check: %s\n", e.what());
      hard_pass = false;
    }
  }
  report["pass"] = hard_pass;
  if (!out_prefix.empty()) {
    const std::string options = "check model=" + model_name + " alpha0=" + format_double(alpha0) +
                                " n=" + std::to_string(n) + " b=" + format_double(b);
    const RunManifest manifest =
        make_manifest("check", options, csv.empty() ? std::vector<std::pair<std::string, std::string>>{}
                                                    : std::vector<std::pair<std::string, std::string>>{
                                                          {csv, read_file(csv)}});
    write_json_artifact(out_prefix + ".json", report, manifest);
  }
  return hard_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regression quantile processes, rank scores and R-estimators"};
  app.require_subcommand(1);

  std::string csv, response_col = "y", out_prefix, method = "rq", config_path, model_name = "logistic";
  double alpha = 0.5, alpha0 = 0.5, b = 0.1;
  long n = 100;
  int grid_points = 0, threads = 1;

  auto* fit = app.add_subcommand("fit", "fit one alpha-quantile / rank estimate");
  fit->add_option("csv", csv, "input CSV")->required();
  fit->add_option("--alpha", alpha, "quantile level in (0,1)");
  fit->add_option("--method", method, "rq | rtwostep | jaeckel");
  fit->add_option("--response-col", response_col, "response column name");
  fit->add_option("--out", out_prefix, "output path prefix");

  auto* process = app.add_subcommand("process", "coefficient process over alpha");
  process->add_option("csv", csv, "input CSV")->required();
  process->add_option("--method", method, "rq | rtwostep | jaeckel");
  process->add_option("--grid-points", grid_points, "sweep grid size");
  process->add_option("--response-col", response_col, "response column name");
  process->add_option("--out", out_prefix, "output path prefix");

  auto* simulate = app.add_subcommand("simulate", "run a seeded study from a config file");
  simulate->add_option("--config", config_path, "JSON config")->required();
  simulate->add_option("--out", out_prefix, "output path prefix");
  simulate->add_option("--threads", threads, "replicate-level parallelism");

  auto* check = app.add_subcommand("check", "condition checks for a model / design");
  check->add_option("--model", model_name, "normal | logistic | laplace");
  check->add_option("--alpha0", alpha0, "tail band boundary");
  check->add_option("--n", n, "sample size for alpha_star");
  check->add_option("--b", b, "the (X2) exponent");
  check->add_option("--csv", csv, "optional dataset for design checks");
  check->add_option("--response-col", response_col, "response column name");
  check->add_option("--out", out_prefix, "output path prefix");

  CLI11_PARSE(app, argc, argv);
  try {
    if (fit->parsed()) return cmd_fit(csv, alpha, method, response_col, out_prefix);
    if (process->parsed()) return cmd_process(csv, method, grid_points, response_col, out_prefix);
    if (simulate->parsed()) return cmd_simulate(config_path, out_prefix, threads);
    if (check->parsed()) return cmd_check(model_name, alpha0, n, b, csv, response_col, out_prefix);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
