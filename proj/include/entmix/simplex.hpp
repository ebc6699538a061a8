#pragma once

// Dense two-phase tableau simplex for small standard-form problems
//
//   minimize c^T x   subject to   A x = b,  x >= 0.
//
// Bland's rule is used throughout, so degenerate problems (repeated
// generators, redundant rows) terminate.

#include "entmix/common.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace entmix {

enum class LpStatus { optimal, infeasible, unbounded };

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar objective{};
  // Optimal phase-1 value: the total artificial mass left at the end of phase 1.
  Scalar infeasibility{};
};

template <typename Scalar>
struct SimplexOptions {
  Scalar pivot_eps = Scalar(1e-11);
  Scalar feasibility_tol = Scalar(1e-9);
  bool phase1_only = false;
};

namespace detail {

template <typename Scalar>
Scalar magnitude(const Scalar& v) {
  return v < Scalar(0) ? Scalar(-v) : v;
}

template <typename Scalar>
class Tableau {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Tableau(const Matrix& a, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b, Scalar eps)
      : m_(a.rows()), n_(a.cols()), eps_(eps), t_(Matrix::Zero(m_ + 1, n_ + m_ + 1)), basis_(m_) {
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Scalar sign = b(i) < Scalar(0) ? Scalar(-1) : Scalar(1);
      t_.row(i).head(n_) = sign * a.row(i);
      t_(i, n_ + i) = Scalar(1);
      t_(i, rhs()) = sign * b(i);
      basis_[i] = n_ + i;
    }
  }

  Eigen::Index rhs() const { return n_ + m_; }
  bool artificial(Eigen::Index j) const { return j >= n_; }

  void set_phase1_costs() {
    t_.row(m_).setZero();
    for (Eigen::Index i = 0; i < m_; ++i) {
      t_.row(m_).head(n_) -= t_.row(i).head(n_);
      t_(m_, rhs()) -= t_(i, rhs());
    }
  }

  void set_costs(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& c) {
    t_.row(m_).setZero();
    t_.row(m_).head(n_) = c.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index bj = basis_[i];
      if (bj < n_ && c(bj) != Scalar(0)) t_.row(m_) -= c(bj) * t_.row(i);
    }
  }

  // Returns false when the problem is unbounded in the current costs.
  bool optimize(bool allow_artificial_entering) {
    const Eigen::Index cap = 50 * (m_ + n_ + 10);
    for (Eigen::Index iter = 0; iter < cap; ++iter) {
      Eigen::Index enter = -1;
      const Eigen::Index last = allow_artificial_entering ? n_ + m_ : n_;
      for (Eigen::Index j = 0; j < last; ++j) {
        if (t_(m_, j) < -eps_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;

      Eigen::Index leave = -1;
      Scalar best{};
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (t_(i, enter) > eps_) {
          const Scalar ratio = t_(i, rhs()) / t_(i, enter);
          if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw NumericalError("simplex iteration cap reached");
  }

  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!artificial(basis_[i])) continue;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (magnitude(t_(i, j)) > eps_) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  Scalar objective_value() const { return -t_(m_, rhs()); }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solution() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i)
      if (basis_[i] < n_) x(basis_[i]) = t_(i, rhs());
    return x;
  }

 private:
  void pivot(Eigen::Index r, Eigen::Index s) {
    t_.row(r) /= t_(r, s);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i != r && t_(i, s) != Scalar(0)) t_.row(i) -= t_(i, s) * t_.row(r);
    }
    basis_[r] = s;
  }

  Eigen::Index m_;
  Eigen::Index n_;
  Scalar eps_;
  Matrix t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace detail

template <typename Scalar>
LpResult<Scalar> solve_lp(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& c,
                          const SimplexOptions<Scalar>& opts = {}) {
  if (a.rows() != b.size() || a.cols() != c.size()) throw StructuralError("LP data shapes disagree");

  detail::Tableau<Scalar> tab(a, b, opts.pivot_eps);
  tab.set_phase1_costs();
  tab.optimize(false);

  LpResult<Scalar> res;
  res.infeasibility = tab.objective_value();
  if (res.infeasibility > opts.feasibility_tol) {
    res.status = LpStatus::infeasible;
    return res;
  }
  tab.drive_out_artificials();
  if (!opts.phase1_only) {
    tab.set_costs(c);
    if (!tab.optimize(false)) {
      res.status = LpStatus::unbounded;
      return res;
    }
  }
  res.status = LpStatus::optimal;
  res.x = tab.solution();
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace entmix
