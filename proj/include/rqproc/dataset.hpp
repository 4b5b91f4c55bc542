#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace rqproc {

// Response vector plus slope covariates; the intercept column is implicit
// and handled by the fitters themselves.
struct Dataset {
  Eigen::VectorXd y;  // length n
  Eigen::MatrixXd X;  // n x p

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return X.cols(); }

  void validate() const {
    if (X.rows() != y.size())
      throw std::invalid_argument("dataset: response/design row mismatch");
    if (n() <= p() + 1)
      throw std::invalid_argument("dataset: need n > p + 1");
    if (!y.allFinite() || (X.size() > 0 && !X.allFinite()))
      throw std::invalid_argument("dataset: non-finite entries");
    for (Eigen::Index j = 0; j < p(); ++j) {
      const double lo = X.col(j).minCoeff(), hi = X.col(j).maxCoeff();
      if (lo == hi)
        throw std::invalid_argument("dataset: constant covariate column (intercept is implicit)");
    }
  }

  Eigen::RowVectorXd x_mean() const {
    if (p() == 0) return Eigen::RowVectorXd(0);
    return X.colwise().mean();
  }

  // X with column means removed
  Eigen::MatrixXd x_centered() const {
    if (p() == 0) return X;
    return X.rowwise() - x_mean();
  }

  Eigen::VectorXd y_centered() const {
    return y.array() - y.mean();
  }
};

}  // namespace rqproc
