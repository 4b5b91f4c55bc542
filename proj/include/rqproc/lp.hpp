#pragma once

// Dense linear programming core: bounded-variable revised simplex with an
// implicit basis factorization that exploits unit columns. Quantile-type
// problems (residual splits, score boxes) have at most a handful of dense
// columns, so each iteration costs O(k * p) instead of O(k^2).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rqproc::lp {

enum class Status { optimal, infeasible, unbounded };
enum class Sense { minimize, maximize };
enum class Relation { eq, le, ge };

// Fixed numeric constants for the solver, kept in one place.
struct Tolerances {
  static constexpr double feasibility = 1e-8;
  static constexpr double optimality = 1e-9;
  static constexpr double pivot = 1e-10;
  static constexpr double parametric_width = 1e-10;
};

struct Problem {
  Eigen::VectorXd objective;     // length m
  Eigen::MatrixXd constraints;   // k x m
  Eigen::VectorXd rhs;           // length k
  std::vector<Relation> relations;  // length k; empty means all eq
  Eigen::VectorXd lower;         // length m, -inf allowed
  Eigen::VectorXd upper;         // length m, +inf allowed
  Sense sense = Sense::minimize;

  Eigen::Index num_vars() const { return objective.size(); }
  Eigen::Index num_rows() const { return rhs.size(); }

  void validate() const {
    const auto m = num_vars();
    const auto k = num_rows();
    if (m < 1 || k < 1) throw std::invalid_argument("lp: need k, m >= 1");
    if (constraints.rows() != k || constraints.cols() != m)
      throw std::invalid_argument("lp: constraint matrix shape mismatch");
    if (lower.size() != m || upper.size() != m)
      throw std::invalid_argument("lp: bound vector length mismatch");
    if (!relations.empty() && static_cast<Eigen::Index>(relations.size()) != k)
      throw std::invalid_argument("lp: relations length mismatch");
    for (Eigen::Index j = 0; j < m; ++j)
      if (!(lower[j] <= upper[j]))
        throw std::invalid_argument("lp: lower bound exceeds upper bound");
    if (!rhs.allFinite())
      throw std::invalid_argument("lp: rhs must be finite");
  }
};

// Column ids in Solution::basis: 0..m-1 structural, m+r slack of row r,
// m+k+r artificial of row r (only for redundant rows).
struct Solution {
  Status status = Status::optimal;
  Eigen::VectorXd variables;
  double objective_value = 0.0;
  std::vector<int> basis;
  Eigen::VectorXd duals;  // d objective_value / d rhs, in the problem's sense
  int iterations = 0;
};

namespace detail {

enum class VarState : std::uint8_t { basic, at_lower, at_upper, free_zero };

inline double inf() { return std::numeric_limits<double>::infinity(); }

class Simplex {
 public:
  explicit Simplex(Problem p) : prob_(std::move(p)) {
    prob_.validate();
    k_ = static_cast<int>(prob_.num_rows());
    m_ = static_cast<int>(prob_.num_vars());
    min_sign_ = (prob_.sense == Sense::minimize) ? 1.0 : -1.0;
    load_columns();
  }

  Solution solve(const std::vector<int>* start_basis) {
    bool warm = false;
    if (start_basis != nullptr) warm = try_warm_start(*start_basis);
    if (!warm) {
      if (!phase_one()) return finish(Status::infeasible);
    }
    cost_ = structural_cost();
    const Status st = iterate();
    return finish(st);
  }

  // Evaluates the problem at a frozen basis/state assignment: no pivoting,
  // one kernel solve. Used by the parametric sweep and trajectory checks.
  Solution evaluate(const std::vector<int>& basis,
                    const std::vector<std::uint8_t>& states) {
    if (static_cast<int>(basis.size()) != k_)
      throw std::invalid_argument("lp: basis size must equal row count");
    if (static_cast<int>(states.size()) != m_ + k_)
      throw std::invalid_argument("lp: state vector size mismatch");
    state_.assign(ncols(), VarState::at_lower);
    for (int j = 0; j < ncols(); ++j) {
      state_[j] = static_cast<VarState>(states[j]);
      xval_[j] = nonbasic_value(j);
    }
    basic_ = basis;
    for (int c : basic_) {
      if (c < 0 || c >= m_ + k_)
        throw std::invalid_argument("lp: basis column out of range");
      state_[c] = VarState::basic;
    }
    refactor();
    recompute_basics();
    cost_ = structural_cost();
    return finish(Status::optimal);
  }

  const std::vector<std::uint8_t> state_snapshot() const {
    std::vector<std::uint8_t> s(m_ + k_);
    for (int j = 0; j < m_ + k_; ++j) s[j] = static_cast<std::uint8_t>(state_[j]);
    return s;
  }

 private:
  struct Column {
    int unit_row = -1;   // >= 0 when the column has a single nonzero
    double unit_value = 0.0;
    int dense_idx = -1;  // column in dense_mat_ otherwise
  };

  int ncols() const { return static_cast<int>(cols_.size()); }

  void load_columns() {
    cols_.resize(m_ + k_);
    lb_.resize(m_ + k_);
    ub_.resize(m_ + k_);
    int ndense = 0;
    for (int j = 0; j < m_; ++j) {
      int nz = 0, row = -1;
      for (int r = 0; r < k_; ++r) {
        if (prob_.constraints(r, j) != 0.0) {
          ++nz;
          row = r;
        }
      }
      if (nz == 1) {
        cols_[j].unit_row = row;
        cols_[j].unit_value = prob_.constraints(row, j);
      } else {
        cols_[j].dense_idx = ndense++;
      }
      lb_[j] = prob_.lower[j];
      ub_[j] = prob_.upper[j];
    }
    dense_mat_.resize(k_, ndense);
    for (int j = 0; j < m_; ++j)
      if (cols_[j].dense_idx >= 0) dense_mat_.col(cols_[j].dense_idx) = prob_.constraints.col(j);
    // one slack per row; eq rows get a fixed slack
    for (int r = 0; r < k_; ++r) {
      Column c;
      c.unit_row = r;
      c.unit_value = 1.0;
      cols_[m_ + r] = c;
      const Relation rel = prob_.relations.empty() ? Relation::eq : prob_.relations[r];
      switch (rel) {
        case Relation::eq: lb_[m_ + r] = 0.0; ub_[m_ + r] = 0.0; break;
        case Relation::le: lb_[m_ + r] = 0.0; ub_[m_ + r] = inf(); break;
        case Relation::ge: lb_[m_ + r] = -inf(); ub_[m_ + r] = 0.0; break;
      }
    }
    xval_ = Eigen::VectorXd::Zero(m_ + k_);
    state_.assign(m_ + k_, VarState::at_lower);
    rhs_scale_ = std::max(1.0, prob_.rhs.cwiseAbs().maxCoeff());
  }

  Eigen::VectorXd structural_cost() const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(ncols());
    c.head(m_) = min_sign_ * prob_.objective;
    return c;
  }

  double nonbasic_value(int j) const {
    switch (state_[j]) {
      case VarState::at_lower: return std::isfinite(lb_[j]) ? lb_[j] : 0.0;
      case VarState::at_upper: return std::isfinite(ub_[j]) ? ub_[j] : 0.0;
      default: return 0.0;
    }
  }

  VarState default_state(int j) const {
    const bool lf = std::isfinite(lb_[j]), uf = std::isfinite(ub_[j]);
    if (lf && uf) return (std::abs(ub_[j]) < std::abs(lb_[j])) ? VarState::at_upper : VarState::at_lower;
    if (lf) return VarState::at_lower;
    if (uf) return VarState::at_upper;
    return VarState::free_zero;
  }

  Eigen::VectorXd column_vector(int j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(k_);
    const Column& c = cols_[j];
    if (c.unit_row >= 0)
      a[c.unit_row] = c.unit_value;
    else if (c.dense_idx >= 0)
      a = dense_mat_.col(c.dense_idx);
    else
      a[artificial_row_[j]] = artificial_sign_[j];
    return a;
  }

  double column_dot(int j, const Eigen::VectorXd& v) const {
    const Column& c = cols_[j];
    if (c.unit_row >= 0) return c.unit_value * v[c.unit_row];
    if (c.dense_idx >= 0) return dense_mat_.col(c.dense_idx).dot(v);
    return artificial_sign_[j] * v[artificial_row_[j]];
  }

  // --- kernel factorization -------------------------------------------------
  // The basis splits into unit columns (each owning its row) and q dense
  // columns covering the remaining rows; only the q x q block needs an LU.
  void refactor() {
    row_owner_.assign(k_, -1);
    dense_slots_.clear();
    for (int s = 0; s < k_; ++s) {
      const int j = basic_[s];
      const Column& c = cols_[j];
      int urow = c.unit_row;
      if (urow < 0 && c.dense_idx < 0) urow = artificial_row_[j];
      if (urow >= 0) {
        if (row_owner_[urow] != -1) throw std::runtime_error("lp: singular basis (duplicate unit row)");
        row_owner_[urow] = s;
      } else {
        dense_slots_.push_back(s);
      }
    }
    kernel_rows_.clear();
    for (int r = 0; r < k_; ++r)
      if (row_owner_[r] == -1) kernel_rows_.push_back(r);
    const int q = static_cast<int>(dense_slots_.size());
    if (static_cast<int>(kernel_rows_.size()) != q)
      throw std::runtime_error("lp: singular basis (row/column count mismatch)");
    dense_basis_.resize(k_, q);
    kernel_.resize(q, q);
    for (int s = 0; s < q; ++s) {
      const int j = basic_[dense_slots_[s]];
      dense_basis_.col(s) = dense_mat_.col(cols_[j].dense_idx);
      for (int t = 0; t < q; ++t) kernel_(t, s) = dense_basis_(kernel_rows_[t], s);
    }
    if (q > 0) {
      lu_.compute(kernel_);
      const double scale = std::max(1.0, kernel_.cwiseAbs().maxCoeff());
      if (lu_.matrixLU().diagonal().cwiseAbs().minCoeff() < 1e-12 * scale)
        throw std::runtime_error("lp: singular basis (kernel factorization)");
    }
  }

  // x_B (aligned with basis slots) solving B x_B = v.
  Eigen::VectorXd ftran(const Eigen::VectorXd& v) const {
    const int q = static_cast<int>(dense_slots_.size());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(k_);
    Eigen::VectorXd z(q);
    if (q > 0) {
      Eigen::VectorXd vr(q);
      for (int t = 0; t < q; ++t) vr[t] = v[kernel_rows_[t]];
      z = lu_.solve(vr);
      for (int s = 0; s < q; ++s) x[dense_slots_[s]] = z[s];
    }
    Eigen::VectorXd w = (q > 0) ? Eigen::VectorXd(dense_basis_ * z) : Eigen::VectorXd::Zero(k_);
    for (int r = 0; r < k_; ++r) {
      const int s = row_owner_[r];
      if (s < 0) continue;
      const int j = basic_[s];
      const Column& c = cols_[j];
      const double uval = (c.unit_row >= 0) ? c.unit_value : artificial_sign_[j];
      x[s] = (v[r] - w[r]) / uval;
    }
    return x;
  }

  // Row multipliers solving pi^T B = c_B^T.
  Eigen::VectorXd btran(const Eigen::VectorXd& c) const {
    const int q = static_cast<int>(dense_slots_.size());
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(k_);
    for (int r = 0; r < k_; ++r) {
      const int s = row_owner_[r];
      if (s < 0) continue;
      const int j = basic_[s];
      const Column& col = cols_[j];
      const double uval = (col.unit_row >= 0) ? col.unit_value : artificial_sign_[j];
      pi[r] = c[j] / uval;
    }
    if (q > 0) {
      Eigen::VectorXd rhs(q);
      for (int s = 0; s < q; ++s) {
        const int j = basic_[dense_slots_[s]];
        rhs[s] = c[j] - dense_basis_.col(s).dot(pi);
      }
      Eigen::VectorXd y = lu_.transpose().solve(rhs);
      for (int t = 0; t < q; ++t) pi[kernel_rows_[t]] += y[t];
    }
    return pi;
  }

  void recompute_basics() {
    Eigen::VectorXd beff = prob_.rhs;
    for (int j = 0; j < ncols(); ++j) {
      if (state_[j] == VarState::basic) continue;
      const double xv = nonbasic_value(j);
      xval_[j] = xv;
      if (xv == 0.0) continue;
      const Column& c = cols_[j];
      if (c.unit_row >= 0)
        beff[c.unit_row] -= c.unit_value * xv;
      else if (c.dense_idx >= 0)
        beff -= dense_mat_.col(c.dense_idx) * xv;
      else
        beff[artificial_row_[j]] -= artificial_sign_[j] * xv;
    }
    const Eigen::VectorXd xb = ftran(beff);
    for (int s = 0; s < k_; ++s) xval_[basic_[s]] = xb[s];
  }

  bool basics_feasible(double tol) const {
    for (int s = 0; s < k_; ++s) {
      const int j = basic_[s];
      if (xval_[j] < lb_[j] - tol || xval_[j] > ub_[j] + tol) return false;
    }
    return true;
  }

  bool try_warm_start(const std::vector<int>& basis) {
    if (static_cast<int>(basis.size()) != k_) return false;
    for (int j : basis)
      if (j < 0 || j >= m_ + k_) return false;
    state_.assign(m_ + k_, VarState::at_lower);
    for (int j = 0; j < m_ + k_; ++j) state_[j] = default_state(j);
    basic_ = basis;
    for (int c : basic_) state_[c] = VarState::basic;
    try {
      refactor();
    } catch (const std::runtime_error&) {
      return false;
    }
    recompute_basics();
    return basics_feasible(Tolerances::feasibility * rhs_scale_);
  }

  bool phase_one() {
    // artificial columns, one per row, signed to absorb the residual
    artificial_row_.assign(m_ + 2 * k_, -1);
    artificial_sign_.assign(m_ + 2 * k_, 0.0);
    state_.assign(m_ + k_, VarState::at_lower);
    for (int j = 0; j < m_ + k_; ++j) state_[j] = default_state(j);
    Eigen::VectorXd resid = prob_.rhs;
    for (int j = 0; j < m_ + k_; ++j) {
      const double xv = nonbasic_value(j);
      if (xv == 0.0) continue;
      const Column& c = cols_[j];
      if (c.unit_row >= 0)
        resid[c.unit_row] -= c.unit_value * xv;
      else
        resid -= dense_mat_.col(c.dense_idx) * xv;
    }
    cols_.resize(m_ + 2 * k_);
    lb_.conservativeResize(m_ + 2 * k_);
    ub_.conservativeResize(m_ + 2 * k_);
    xval_.conservativeResize(m_ + 2 * k_);
    state_.resize(m_ + 2 * k_, VarState::at_lower);
    basic_.resize(k_);
    for (int r = 0; r < k_; ++r) {
      const int j = m_ + k_ + r;
      artificial_row_[j] = r;
      artificial_sign_[j] = (resid[r] >= 0.0) ? 1.0 : -1.0;
      lb_[j] = 0.0;
      ub_[j] = inf();
      basic_[r] = j;
      state_[j] = VarState::basic;
      xval_[j] = std::abs(resid[r]);
    }
    refactor();
    cost_ = Eigen::VectorXd::Zero(ncols());
    cost_.tail(k_).setOnes();
    const Status st = iterate();
    if (st != Status::optimal) throw std::runtime_error("lp: phase-1 failure");
    recompute_basics();
    double infeas = 0.0;
    for (int r = 0; r < k_; ++r) infeas += std::max(0.0, xval_[m_ + k_ + r]);
    if (infeas > 10.0 * Tolerances::feasibility * rhs_scale_ * k_) return false;
    // lock artificials at zero for phase 2
    for (int r = 0; r < k_; ++r) {
      lb_[m_ + k_ + r] = 0.0;
      ub_[m_ + k_ + r] = 0.0;
      if (state_[m_ + k_ + r] != VarState::basic) {
        state_[m_ + k_ + r] = VarState::at_lower;
        xval_[m_ + k_ + r] = 0.0;
      }
    }
    return true;
  }

  Status iterate() {
    const int bland_after = 3 * (k_ + ncols());
    const long cap = 50000L + 200L * (k_ + ncols());
    for (long it = 0; it < cap; ++it) {
      ++iterations_;
      if (it % 64 == 0) recompute_basics();
      const Eigen::VectorXd pi = btran(cost_);
      const bool bland = it >= bland_after;
      int enter = -1;
      double enter_dir = 0.0, best_score = Tolerances::optimality;
      for (int j = 0; j < ncols(); ++j) {
        if (state_[j] == VarState::basic) continue;
        if (lb_[j] == ub_[j]) continue;  // fixed
        const double rc = cost_[j] - column_dot(j, pi);
        double dir = 0.0;
        if ((state_[j] == VarState::at_lower || state_[j] == VarState::free_zero) &&
            rc < -Tolerances::optimality)
          dir = 1.0;
        else if ((state_[j] == VarState::at_upper || state_[j] == VarState::free_zero) &&
                 rc > Tolerances::optimality)
          dir = -1.0;
        if (dir == 0.0) continue;
        if (bland) {
          enter = j;
          enter_dir = dir;
          break;
        }
        if (std::abs(rc) > best_score) {
          best_score = std::abs(rc);
          enter = j;
          enter_dir = dir;
        }
      }
      if (enter < 0) {
        recompute_basics();
        return Status::optimal;
      }
      const Eigen::VectorXd d = ftran(column_vector(enter));
      // ratio test
      double span = ub_[enter] - lb_[enter];
      if (!std::isfinite(span)) span = inf();
      double best_t = span;
      int leave_slot = -1;
      bool leave_to_upper = false;
      double best_pivot = 0.0;
      for (int s = 0; s < k_; ++s) {
        const double delta = enter_dir * d[s];
        const int j = basic_[s];
        if (delta > Tolerances::pivot) {
          if (!std::isfinite(lb_[j])) continue;
          const double t = std::max(0.0, (xval_[j] - lb_[j]) / delta);
          if (t < best_t - 1e-12 ||
              (t < best_t + 1e-12 &&
               (bland ? (leave_slot < 0 || j < basic_[leave_slot])
                      : std::abs(delta) > best_pivot))) {
            best_t = std::min(t, best_t);
            leave_slot = s;
            leave_to_upper = false;
            best_pivot = std::abs(delta);
          }
        } else if (delta < -Tolerances::pivot) {
          if (!std::isfinite(ub_[j])) continue;
          const double t = std::max(0.0, (ub_[j] - xval_[j]) / (-delta));
          if (t < best_t - 1e-12 ||
              (t < best_t + 1e-12 &&
               (bland ? (leave_slot < 0 || j < basic_[leave_slot])
                      : std::abs(delta) > best_pivot))) {
            best_t = std::min(t, best_t);
            leave_slot = s;
            leave_to_upper = true;
            best_pivot = std::abs(delta);
          }
        }
      }
      if (!std::isfinite(best_t)) return Status::unbounded;
      // apply the step
      for (int s = 0; s < k_; ++s) xval_[basic_[s]] -= best_t * enter_dir * d[s];
      if (leave_slot < 0) {
        // bound flip, no basis change
        state_[enter] = (enter_dir > 0) ? VarState::at_upper : VarState::at_lower;
        xval_[enter] = nonbasic_value(enter);
        continue;
      }
      const int leaving = basic_[leave_slot];
      state_[leaving] = leave_to_upper ? VarState::at_upper : VarState::at_lower;
      xval_[leaving] = nonbasic_value(leaving);
      xval_[enter] = nonbasic_value(enter) + enter_dir * best_t;
      basic_[leave_slot] = enter;
      state_[enter] = VarState::basic;
      refactor();
    }
    throw std::runtime_error("lp: iteration limit exceeded");
  }

  Solution finish(Status st) {
    Solution sol;
    sol.status = st;
    sol.iterations = iterations_;
    if (st != Status::optimal) return sol;
    sol.variables = xval_.head(m_);
    sol.objective_value = prob_.objective.dot(sol.variables);
    sol.basis = basic_;
    const Eigen::VectorXd pi = btran(cost_);
    sol.duals = min_sign_ * pi;
    return sol;
  }

  Problem prob_;
  int k_ = 0, m_ = 0;
  double min_sign_ = 1.0;
  double rhs_scale_ = 1.0;
  std::vector<Column> cols_;
  Eigen::MatrixXd dense_mat_;
  Eigen::VectorXd lb_, ub_, xval_, cost_;
  std::vector<VarState> state_;
  std::vector<int> basic_;
  std::vector<int> artificial_row_;
  std::vector<double> artificial_sign_;
  // kernel data
  std::vector<int> row_owner_, dense_slots_, kernel_rows_;
  Eigen::MatrixXd dense_basis_, kernel_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  int iterations_ = 0;
};

}  // namespace detail

inline Solution solve(Problem p) {
  detail::Simplex s(std::move(p));
  return s.solve(nullptr);
}

inline Solution solve(Problem p, const std::vector<int>& start_basis) {
  detail::Simplex s(std::move(p));
  return s.solve(&start_basis);
}

// Re-evaluates a problem at a frozen basis and nonbasic state assignment.
inline Solution evaluate_basis(Problem p, const std::vector<int>& basis,
                               const std::vector<std::uint8_t>& states) {
  detail::Simplex s(std::move(p));
  return s.evaluate(basis, states);
}

struct ParametricInterval {
  double lo = 0.0, hi = 0.0;
  Solution solution;              // solved at the interval midpoint
  std::vector<int> basis;
  std::vector<std::uint8_t> states;
};

struct ParametricOptions {
  int grid_points = 65;
  double refine_width = Tolerances::parametric_width;
};

namespace detail {

struct BasisSignature {
  std::vector<int> basis;
  std::vector<std::uint8_t> states;
  bool operator==(const BasisSignature& o) const {
    if (states != o.states) return false;
    std::vector<int> a = basis, b = o.basis;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  }
};

}  // namespace detail

// Sweeps a family of problems whose rhs and objective are affine in alpha.
// Returns maximal intervals on which the optimal basis signature is constant;
// breakpoints are localized by bisection between grid points.
inline std::vector<ParametricInterval> solve_parametric(
    const std::function<Problem(double)>& family, double alpha_lo,
    double alpha_hi, const ParametricOptions& opt = {}) {
  if (!(alpha_lo < alpha_hi)) throw std::invalid_argument("lp: empty alpha range");
  const int g = std::max(2, opt.grid_points);
  auto solve_at = [&](double a) {
    detail::Simplex s(family(a));
    Solution sol = s.solve(nullptr);
    if (sol.status != Status::optimal)
      throw std::runtime_error("lp: parametric family not solvable at alpha=" + std::to_string(a));
    detail::BasisSignature sig{sol.basis, s.state_snapshot()};
    return std::make_pair(sol, sig);
  };
  std::vector<double> grid(g);
  for (int i = 0; i < g; ++i)
    grid[i] = alpha_lo + (alpha_hi - alpha_lo) * i / (g - 1);
  std::vector<detail::BasisSignature> sigs(g);
  for (int i = 0; i < g; ++i) sigs[i] = solve_at(grid[i]).second;

  // Recursive subdivision: a cell may hold several crossings, so each split
  // probes the midpoint signature and keeps only the halves that change.
  std::vector<double> breakpoints;
  const std::function<void(double, double, const detail::BasisSignature&,
                           const detail::BasisSignature&, int)>
      scan = [&](double lo, double hi, const detail::BasisSignature& slo,
                 const detail::BasisSignature& shi, int depth) {
        if (hi - lo <= opt.refine_width || depth > 80) {
          breakpoints.push_back(0.5 * (lo + hi));
          return;
        }
        const double mid = 0.5 * (lo + hi);
        const detail::BasisSignature smid = solve_at(mid).second;
        const bool left_same = (smid == slo), right_same = (smid == shi);
        if (left_same && right_same) return;  // verified constant at midpoint
        if (!left_same) scan(lo, mid, slo, smid, depth + 1);
        if (!right_same) scan(mid, hi, smid, shi, depth + 1);
      };
  for (int i = 0; i + 1 < g; ++i) scan(grid[i], grid[i + 1], sigs[i], sigs[i + 1], 0);
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<ParametricInterval> out;
  double lo = alpha_lo;
  for (std::size_t i = 0; i <= breakpoints.size(); ++i) {
    const double hi = (i < breakpoints.size()) ? breakpoints[i] : alpha_hi;
    ParametricInterval iv;
    iv.lo = lo;
    iv.hi = hi;
    const auto [sol, sig] = solve_at(0.5 * (lo + hi));
    iv.solution = sol;
    iv.basis = sig.basis;
    iv.states = sig.states;
    out.push_back(std::move(iv));
    lo = hi;
  }
  return out;
}

}  // namespace rqproc::lp
