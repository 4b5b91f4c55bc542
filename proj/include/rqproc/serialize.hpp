#pragma once

// JSON serialization of configs, reports and the run manifest. Key order is
// alphabetical (nlohmann default) and floats use shortest round-trip form,
// so identical inputs serialize to identical bytes.

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "rqproc/asymptotics.hpp"
#include "rqproc/montecarlo.hpp"
#include "rqproc/version.hpp"

namespace rqproc {

using json = nlohmann::json;

inline constexpr const char* report_schema_version = "1";

inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Every emitted artifact embeds one of these; outputs are reproducible given
// an identical manifest up to the created_at timestamp.
struct RunManifest {
  std::string command;
  std::string config_digest;
  std::string tool_version = version_string;
  std::string created_at;  // ISO-8601 UTC; excluded from determinism checks
  std::vector<std::pair<std::string, std::string>> input_digests;
};

inline json to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["config_digest"] = m.config_digest;
  j["tool_version"] = m.tool_version;
  j["created_at"] = m.created_at;
  json inputs = json::object();
  for (const auto& [name, digest] : m.input_digests) inputs[name] = digest;
  j["input_digests"] = inputs;
  return j;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::VectorXd vector_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

inline json to_json(const F3Report& r) {
  return json{{"pass", r.pass},
              {"max_quantile_ratio", r.max_quantile_ratio},
              {"max_density_ratio", r.max_density_ratio},
              {"worst_alpha_quantile", r.worst_alpha_quantile},
              {"worst_alpha_density", r.worst_alpha_density},
              {"alpha_floor", r.alpha_floor},
              {"points", r.points}};
}

inline json to_json(const BridgeDiagnostics& d) {
  json cov = json::array();
  for (const auto& m : d.cov_empirical) cov.push_back(matrix_to_json(m));
  return json{{"grid", d.grid},
              {"cov_empirical", cov},
              {"mean", matrix_to_json(d.mean)},
              {"mean_se", matrix_to_json(d.mean_se)},
              {"cross_cov_max", d.cross_cov_max},
              {"ks_stats", vector_to_json(d.ks_stats)},
              {"replicates_used", d.replicates_used}};
}

inline json failures_to_json(const std::vector<ReplicateFailure>& fails) {
  json out = json::array();
  for (const auto& f : fails) out.push_back(json{{"replicate", f.replicate}, {"message", f.message}});
  return out;
}

inline json to_json(const BridgeStudyReport& r) {
  return json{{"schema_version", report_schema_version},
              {"study", "bridge"},
              {"standardized_slopes", to_json(r.slopes)},
              {"score_process", to_json(r.score)},
              {"failures", failures_to_json(r.failures)}};
}

inline json to_json(const DriftReport& r) {
  return json{{"schema_version", report_schema_version},
              {"study", "drift"},
              {"grid", r.grid},
              {"predicted", matrix_to_json(r.predicted)},
              {"empirical_mean", matrix_to_json(r.empirical_mean)},
              {"mean_se", matrix_to_json(r.mean_se)},
              {"max_abs_deviation", r.max_abs_deviation},
              {"replicates_used", r.replicates_used},
              {"failures", failures_to_json(r.failures)}};
}

inline json to_json(const RateReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back(json{{"n", row.n},
                        {"median_sup_scaled_error", row.median_sup_scaled_error},
                        {"median_bahadur", row.median_bahadur},
                        {"median_linearity_band", row.median_linearity_band},
                        {"median_linearity_full", row.median_linearity_full},
                        {"replicates_used", row.replicates_used}});
  }
  return json{{"schema_version", report_schema_version},
              {"study", "rate"},
              {"rows", rows},
              {"sup_error_ratio", r.sup_error_ratio},
              {"failures", failures_to_json(r.failures)}};
}

inline std::string study_kind_name(StudyKind k) {
  switch (k) {
    case StudyKind::bridge: return "bridge";
    case StudyKind::drift: return "drift";
    case StudyKind::rate: return "rate";
  }
  return "bridge";
}

inline std::string design_kind_name(DesignKind k) {
  switch (k) {
    case DesignKind::iid_uniform: return "iid_uniform";
    case DesignKind::iid_normal: return "iid_normal";
    case DesignKind::fixed_matrix: return "fixed_matrix";
  }
  return "iid_uniform";
}

inline json to_json(const SimConfig& c) {
  json j;
  j["n"] = c.n;
  j["p"] = c.p;
  j["replicates"] = c.replicates;
  j["error_model"] = c.error_model;
  j["design"] = design_kind_name(c.design);
  if (!c.design_path.empty()) j["design_path"] = c.design_path;
  j["beta0"] = c.beta0;
  j["beta"] = vector_to_json(c.beta);
  j["alpha_grid"] = c.alpha_grid;
  j["seed"] = c.seed;
  j["b_exponent"] = c.b_exponent;
  if (c.shift.size() > 0) j["shift"] = vector_to_json(c.shift);
  j["trajectory_source"] =
      (c.trajectory_source == TrajectorySource::r_estimator) ? "r_estimator" : "regression_quantile";
  j["study"] = study_kind_name(c.study);
  j["n_list"] = c.n_list;
  j["linearity_K"] = c.linearity_K;
  return j;
}

inline SimConfig sim_config_from_json(const json& j) {
  SimConfig c;
  c.n = j.value("n", c.n);
  c.p = j.value("p", c.p);
  c.replicates = j.value("replicates", c.replicates);
  c.error_model = j.value("error_model", c.error_model);
  const std::string design = j.value("design", std::string("iid_uniform"));
  if (design == "iid_uniform")
    c.design = DesignKind::iid_uniform;
  else if (design == "iid_normal")
    c.design = DesignKind::iid_normal;
  else if (design == "fixed_matrix")
    c.design = DesignKind::fixed_matrix;
  else
    throw std::invalid_argument("config: unknown design '" + design + "'");
  c.design_path = j.value("design_path", std::string());
  c.beta0 = j.value("beta0", 0.0);
  if (j.contains("beta")) c.beta = vector_from_json(j.at("beta"));
  if (j.contains("alpha_grid")) c.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
  c.seed = j.value("seed", c.seed);
  c.b_exponent = j.value("b_exponent", c.b_exponent);
  if (j.contains("shift")) c.shift = vector_from_json(j.at("shift"));
  const std::string src = j.value("trajectory_source", std::string("regression_quantile"));
  if (src == "regression_quantile")
    c.trajectory_source = TrajectorySource::regression_quantile;
  else if (src == "r_estimator")
    c.trajectory_source = TrajectorySource::r_estimator;
  else
    throw std::invalid_argument("config: unknown trajectory_source '" + src + "'");
  const std::string study = j.value("study", std::string("bridge"));
  if (study == "bridge")
    c.study = StudyKind::bridge;
  else if (study == "drift")
    c.study = StudyKind::drift;
  else if (study == "rate")
    c.study = StudyKind::rate;
  else
    throw std::invalid_argument("config: unknown study '" + study + "'");
  if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<int>>();
  c.linearity_K = j.value("linearity_K", c.linearity_K);
  if (c.beta.size() == 0) c.beta = Eigen::VectorXd::Zero(c.p);
  c.validate();
  return c;
}

}  // namespace rqproc
