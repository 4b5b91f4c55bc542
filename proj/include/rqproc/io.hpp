#pragma once

// CSV ingestion for datasets and small SVG emitters for step-function and
// heatmap plots. Plots are standalone documents with no external references.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rqproc/dataset.hpp"
#include "rqproc/quantreg.hpp"

namespace rqproc {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline double parse_number(const std::string& s, int line_no, const std::string& col) {
  if (s.empty())
    throw std::invalid_argument("csv: line " + std::to_string(line_no) + ": missing value in column '" + col + "'");
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("csv: line " + std::to_string(line_no) + ": '" + s +
                                "' is not numeric in column '" + col + "'");
  }
  if (pos != s.size())
    throw std::invalid_argument("csv: line " + std::to_string(line_no) + ": trailing characters in '" + s + "'");
  if (!std::isfinite(v))
    throw std::invalid_argument("csv: line " + std::to_string(line_no) + ": non-finite value in column '" + col + "'");
  return v;
}

}  // namespace detail

// Header row, one named response column, every other column a numeric
// covariate. Missing or non-numeric cells are rejected with line numbers.
inline Dataset read_csv_dataset(const std::string& path, const std::string& response_col = "y") {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: '" + path + "' is empty");
  const auto header = detail::split_csv_line(line);
  int ycol = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == response_col) ycol = static_cast<int>(j);
  if (ycol < 0)
    throw std::invalid_argument("csv: response column '" + response_col + "' not found in header");
  std::vector<double> yv;
  std::vector<std::vector<double>> xv;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw std::invalid_argument("csv: line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    std::vector<double> row;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const double v = detail::parse_number(fields[j], line_no, header[j]);
      if (static_cast<int>(j) == ycol)
        yv.push_back(v);
      else
        row.push_back(v);
    }
    xv.push_back(std::move(row));
  }
  Dataset data;
  data.y = Eigen::Map<Eigen::VectorXd>(yv.data(), static_cast<Eigen::Index>(yv.size()));
  const auto p = header.size() - 1;
  data.X.resize(static_cast<Eigen::Index>(xv.size()), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < xv.size(); ++i)
    for (std::size_t j = 0; j < p; ++j) data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = xv[i][j];
  data.validate();
  return data;
}

// Reads a plain numeric matrix (header optional) for fixed design matrices.
inline Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("csv: cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto fields = detail::split_csv_line(t);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& f : fields) {
      try {
        row.push_back(detail::parse_number(f, line_no, "matrix"));
      } catch (const std::invalid_argument&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (line_no == 1 && rows.empty()) continue;  // header row
      throw std::invalid_argument("csv: line " + std::to_string(line_no) + ": non-numeric matrix row");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("csv: line " + std::to_string(line_no) + ": ragged matrix row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("csv: '" + path + "' has no numeric rows");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

// Step-function plot of each coefficient path in a trajectory.
inline std::string step_svg(const ProcessTrajectory& traj, int width = 640, int height = 400) {
  const int p1 = traj.segments.empty() ? 1 : static_cast<int>(traj.segments.front().size());
  double lo = 0.0, hi = 1.0;
  for (const auto& s : traj.segments) {
    lo = std::min(lo, s.minCoeff());
    hi = std::max(hi, s.maxCoeff());
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto xpix = [&](double a) { return 40.0 + a * (width - 60); };
  auto ypix = [&](double v) { return height - 30.0 - (v - lo) / (hi - lo) * (height - 50); };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << xpix(0) << "\" y1=\"" << ypix(lo) << "\" x2=\"" << xpix(1) << "\" y2=\""
      << ypix(lo) << "\" stroke=\"black\"/>\n";
  for (int c = 0; c < p1; ++c) {
    svg << "<path fill=\"none\" stroke=\"" << palette[c % 8] << "\" stroke-width=\"1.5\" d=\"";
    double a0 = 0.0;
    for (std::size_t s = 0; s < traj.segments.size(); ++s) {
      const double a1 = (s < traj.breakpoints.size()) ? traj.breakpoints[s] : 1.0;
      const double v = traj.segments[s][c];
      svg << (s == 0 ? "M" : "L") << xpix(a0) << " " << ypix(v) << " L" << xpix(a1) << " "
          << ypix(v) << " ";
      a0 = a1;
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

// Grid heatmap (used for empirical covariance surfaces).
inline std::string heatmap_svg(const Eigen::MatrixXd& M, int cell = 24) {
  const int g = static_cast<int>(M.rows());
  const double lo = M.minCoeff(), hi = M.maxCoeff();
  const double span = (hi - lo < 1e-15) ? 1.0 : hi - lo;
  std::ostringstream svg;
  const int w = g * cell + 20;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << w
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < static_cast<int>(M.cols()); ++j) {
      const double t = (M(i, j) - lo) / span;
      const int r = static_cast<int>(255 * t);
      const int b = static_cast<int>(255 * (1 - t));
      svg << "<rect x=\"" << 10 + j * cell << "\" y=\"" << 10 + i * cell << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"rgb(" << r << ",64," << b << ")\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace rqproc
