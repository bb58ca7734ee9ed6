#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "liftmerge/config.hpp"

namespace liftmerge {

/// min objective^T x  s.t.  constraints_lhs * x <= constraints_rhs, x free.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints_lhs;
  Eigen::VectorXd constraints_rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd argmin;  // empty unless Optimal
  double value = std::numeric_limits<double>::quiet_NaN();

  bool optimal() const { return status == LpStatus::Optimal; }
};

namespace detail {

/// Revised simplex for  min cost^T z  s.t.  M z = rhs, z >= 0, rhs >= 0.
///
/// Phase one starts from an all-artificial basis. The basis matrix is
/// refactorized from M at every iteration, so rounding does not build up
/// across pivots. Artificials never re-enter once they leave; those that
/// cannot be pivoted out after phase one sit on dependent rows and are held
/// at zero.
///
/// Pricing is Dantzig's rule until a run of degenerate pivots is seen, after
/// which the solver falls back to Bland's rule for the rest of the solve.
class StandardFormSimplex {
 public:
  enum class Result { Optimal, Unbounded };

  StandardFormSimplex(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs)
      : m_(m), rhs_(rhs), rows_(m.rows()), structural_(m.cols()),
        basis_(static_cast<std::size_t>(m.rows())), cost_(m.cols() + m.rows()) {
    for (Eigen::Index i = 0; i < rows_; ++i) basis_[static_cast<std::size_t>(i)] = structural_ + i;
    max_iterations_ = 50 * (rows_ + structural_) + 1000;
  }

  /// Returns false when M z = rhs, z >= 0 has no solution.
  bool phase_one() {
    cost_.setZero();
    cost_.tail(rows_).setOnes();
    // The auxiliary objective is bounded below by zero, so a column that
    // looks unbounded here is rounding noise and is simply skipped.
    iterate(/*phase_one=*/true);
    factorize();
    const Eigen::VectorXd x = basic_values();
    double infeasibility = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] >= structural_) infeasibility += std::abs(x(i));
    }
    const double scale = std::max(1.0, rhs_.cwiseAbs().maxCoeff());
    if (infeasibility > 1e-9 * scale) return false;

    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < structural_) continue;
      Eigen::VectorXd e = Eigen::VectorXd::Zero(rows_);
      e(i) = 1.0;
      const Eigen::VectorXd w = lu_.transpose().solve(e);
      const Eigen::RowVectorXd row = w.transpose() * m_;
      Eigen::Index best = -1;
      double best_abs = 1e-7;
      for (Eigen::Index j = 0; j < structural_; ++j) {
        if (in_basis(j)) continue;
        if (std::abs(row(j)) > best_abs) {
          best_abs = std::abs(row(j));
          best = j;
        }
      }
      if (best >= 0) {
        basis_[static_cast<std::size_t>(i)] = best;
        factorize();
      }
    }
    return true;
  }

  Result phase_two(const Eigen::VectorXd& cost) {
    cost_.setZero();
    cost_.head(structural_) = cost;
    return iterate(/*phase_one=*/false);
  }

  /// Structural columns currently in the basis.
  std::vector<Eigen::Index> basic_structural() const {
    std::vector<Eigen::Index> out;
    for (auto b : basis_) {
      if (b < structural_) out.push_back(b);
    }
    return out;
  }

  /// Simplex multipliers pi with reduced costs r = cost - M^T pi.
  Eigen::VectorXd multipliers() {
    factorize();
    const Eigen::VectorXd pi = lu_.transpose().solve(basic_costs());
    return pi;
  }

 private:
  bool in_basis(Eigen::Index j) const { return std::find(basis_.begin(), basis_.end(), j) != basis_.end(); }

  Eigen::VectorXd column(Eigen::Index j) const {
    if (j < structural_) return m_.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(rows_);
    e(j - structural_) = 1.0;
    return e;
  }

  void factorize() {
    Eigen::MatrixXd b(rows_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) b.col(i) = column(basis_[static_cast<std::size_t>(i)]);
    lu_.compute(b);
  }

  Eigen::VectorXd basic_values() const { return lu_.solve(rhs_); }

  Eigen::VectorXd basic_costs() const {
    Eigen::VectorXd cb(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) cb(i) = cost_(basis_[static_cast<std::size_t>(i)]);
    return cb;
  }

  Result iterate(bool phase_one) {
    constexpr double kPivotTol = 1e-9;
    constexpr double kHarrisSlack = 1e-11;
    const double reduced_tol = 1e-10 * std::max(1.0, cost_.cwiseAbs().maxCoeff());
    bool bland = false;
    int degenerate_run = 0;
    // Columns with no usable pivot; they are skipped from then on.
    std::vector<bool> blocked(static_cast<std::size_t>(structural_), false);
    for (long iter = 0; iter < max_iterations_; ++iter) {
      factorize();
      const Eigen::VectorXd x = basic_values();
      const Eigen::VectorXd pi = lu_.transpose().solve(basic_costs());
      const Eigen::RowVectorXd reduced = cost_.head(structural_).transpose() - pi.transpose() * m_;

      Eigen::Index enter = -1;
      double most_negative = -reduced_tol;
      for (Eigen::Index j = 0; j < structural_; ++j) {
        if (blocked[static_cast<std::size_t>(j)] || in_basis(j)) continue;
        if (reduced(j) < most_negative) {
          enter = j;
          if (bland) break;
          most_negative = reduced(j);
        }
      }
      if (enter < 0) return Result::Optimal;

      const Eigen::VectorXd dir = lu_.solve(m_.col(enter));
      const double dir_scale = std::max(1.0, dir.cwiseAbs().maxCoeff());
      auto held = [&](Eigen::Index i) {
        return !phase_one && basis_[static_cast<std::size_t>(i)] >= structural_;
      };

      // A held artificial blocks at ratio zero whichever way it would move.
      Eigen::Index leave = -1;
      double best_ratio = 0.0;
      for (Eigen::Index i = 0; i < rows_ && leave < 0; ++i) {
        if (held(i) && std::abs(dir(i)) > kPivotTol * dir_scale) leave = i;
      }
      if (leave < 0) {
        // Two-pass (Harris) ratio test: smallest ratio with slightly relaxed
        // values, then the largest pivot within it.
        double bound = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < rows_; ++i) {
          if (held(i)) continue;
          const double a = dir(i);
          if (a > kPivotTol * dir_scale) bound = std::min(bound, (std::max(0.0, x(i)) + kHarrisSlack) / a);
        }
        for (Eigen::Index i = 0; i < rows_; ++i) {
          if (held(i)) continue;
          const double a = dir(i);
          if (a <= kPivotTol * dir_scale) continue;
          const double ratio = std::max(0.0, x(i)) / a;
          if (ratio > bound) continue;
          bool better = leave < 0;
          if (!better && bland) {
            better = basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)];
          } else if (!better) {
            better = a > dir(leave);
          }
          if (better) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) {
        if (!phase_one && dir.maxCoeff() <= 0.0) return Result::Unbounded;
        blocked[static_cast<std::size_t>(enter)] = true;
        continue;
      }

      if (best_ratio <= 1e-12) {
        if (++degenerate_run > 25) bland = true;
      } else {
        degenerate_run = 0;
      }
      basis_[static_cast<std::size_t>(leave)] = enter;
    }
    throw NumericalError("simplex iteration limit exceeded (" + std::to_string(max_iterations_) +
                         " pivots)");
  }

  Eigen::MatrixXd m_;
  Eigen::VectorXd rhs_;
  Eigen::Index rows_;
  Eigen::Index structural_;
  std::vector<Eigen::Index> basis_;
  Eigen::VectorXd cost_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  long max_iterations_;
};

inline void check_dimensions(const LinearProgram& lp) {
  if (lp.constraints_lhs.rows() != lp.constraints_rhs.size()) {
    throw InputError("LP constraint matrix has " + std::to_string(lp.constraints_lhs.rows()) +
                     " rows but rhs has length " + std::to_string(lp.constraints_rhs.size()));
  }
  if (lp.objective.size() != lp.constraints_lhs.cols()) {
    throw InputError("LP objective has length " + std::to_string(lp.objective.size()) +
                     " but constraint matrix has " + std::to_string(lp.constraints_lhs.cols()) +
                     " columns");
  }
  if (!lp.objective.allFinite() || !lp.constraints_lhs.allFinite() ||
      !lp.constraints_rhs.allFinite()) {
    throw InputError("LP data contains non-finite values");
  }
}

struct NormalizedRows {
  Eigen::MatrixXd lhs;
  Eigen::VectorXd rhs;
  bool contradictory = false;
};

// Unit-norm rows; zero rows are dropped (or flagged when they read 0 <= negative)
// and parallel duplicates collapse to the tightest copy. Duplicate rows make
// the dual basis singular, which the tableau cannot detect reliably.
inline NormalizedRows normalize_rows(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                     double feas) {
  constexpr double kSameRow = 1e-12;
  NormalizedRows out;
  const Eigen::Index d = a.cols();
  Eigen::MatrixXd lhs(a.rows(), d);
  Eigen::VectorXd rhs(a.rows());
  std::vector<Eigen::Index> order;
  order.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double norm = a.row(i).norm();
    if (norm > 1e-13) {
      lhs.row(i) = a.row(i) / norm;
      rhs(i) = b(i) / norm;
      order.push_back(i);
    } else if (b(i) < -feas) {
      out.contradictory = true;
    }
  }
  std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    for (Eigen::Index k = 0; k < d; ++k) {
      if (lhs(x, k) != lhs(y, k)) return lhs(x, k) < lhs(y, k);
    }
    return x < y;
  });
  std::vector<Eigen::Index> keep;
  for (auto i : order) {
    if (!keep.empty() && (lhs.row(i) - lhs.row(keep.back())).cwiseAbs().maxCoeff() <= kSameRow) {
      if (rhs(i) < rhs(keep.back())) keep.back() = i;
      continue;
    }
    keep.push_back(i);
  }
  std::sort(keep.begin(), keep.end());
  out.lhs.resize(static_cast<Eigen::Index>(keep.size()), d);
  out.rhs.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.lhs.row(static_cast<Eigen::Index>(k)) = lhs.row(keep[k]);
    out.rhs(static_cast<Eigen::Index>(k)) = rhs(keep[k]);
  }
  return out;
}

struct RowSpace {
  Eigen::MatrixXd basis;  // d x r, orthonormal columns spanning the rows of A
};

inline RowSpace row_space(const Eigen::MatrixXd& a) {
  const Eigen::Index d = a.cols();
  if (a.rows() == 0) return {Eigen::MatrixXd(d, 0)};
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  if (rank == d) return {Eigen::MatrixXd::Identity(d, d)};
  const Eigen::MatrixXd q = qr.householderQ();
  return {q.leftCols(rank)};
}

struct DualSolve {
  enum class Kind { Optimal, DualInfeasible, DualUnbounded } kind;
  Eigen::VectorXd x;
  std::vector<Eigen::Index> active;  // primal rows matching the optimal dual basis
};

// Re-solves the active rows A_B x = b_B from the original data. The tableau
// accumulates rounding over many pivots; the basis itself is usually right.
inline Eigen::VectorXd polish(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const DualSolve& dual) {
  const Eigen::Index d = a.cols();
  if (static_cast<Eigen::Index>(dual.active.size()) != d) return dual.x;
  Eigen::MatrixXd ab(d, d);
  Eigen::VectorXd bb(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    ab.row(k) = a.row(dual.active[static_cast<std::size_t>(k)]);
    bb(k) = b(dual.active[static_cast<std::size_t>(k)]);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ab);
  if (lu.rank() < d) return dual.x;
  const Eigen::VectorXd x = lu.solve(bb);
  if (!x.allFinite()) return dual.x;
  const double before = (a * dual.x - b).maxCoeff();
  const double after = (a * x - b).maxCoeff();
  return after <= before ? x : dual.x;
}

// Solves min c^T x s.t. A x <= b through its dual  min b^T l  s.t. A^T l = -c, l >= 0.
// The dual has one equality row per primal variable, so the tableau stays
// small when there are many constraints and few variables.
inline DualSolve solve_through_dual(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                    const Eigen::VectorXd& c) {
  const Eigen::Index d = a.cols();
  Eigen::MatrixXd m = a.transpose();
  Eigen::VectorXd rhs = -c;
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    if (rhs(k) < 0.0) {
      sign(k) = -1.0;
      rhs(k) = -rhs(k);
      m.row(k) = -m.row(k);
    }
  }
  StandardFormSimplex simplex(m, rhs);
  if (!simplex.phase_one()) return {DualSolve::Kind::DualInfeasible, {}, {}};
  if (simplex.phase_two(b) == StandardFormSimplex::Result::Unbounded) {
    return {DualSolve::Kind::DualUnbounded, {}, {}};
  }
  return {DualSolve::Kind::Optimal, simplex.multipliers().cwiseProduct(sign), simplex.basic_structural()};
}

}  // namespace detail

/// Dense simplex backend. Any callable with the same signature can stand in
/// for it (see the LpSolver concept).
struct DenseSimplex {
  LpOutcome operator()(const LinearProgram& lp) const {
    detail::check_dimensions(lp);
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    const double feas = tolerances().feas;
    const auto rows = detail::normalize_rows(lp.constraints_lhs, lp.constraints_rhs, feas);
    if (rows.contradictory) return {LpStatus::Infeasible, {}, kNaN};

    const double cscale = lp.objective.size() > 0 ? lp.objective.cwiseAbs().maxCoeff() : 0.0;
    const Eigen::VectorXd c = cscale > 0.0 ? Eigen::VectorXd(lp.objective / cscale) : lp.objective;

    // Work in the row space of A: x = Q z with Q orthonormal. Directions in
    // the null space of A never change feasibility, so a nonzero objective
    // component there means the LP is unbounded (or infeasible), and the
    // reduced problem has a full-rank dual that the tableau handles well.
    const auto space = detail::row_space(rows.lhs);
    const Eigen::MatrixXd a = rows.lhs * space.basis;
    const Eigen::VectorXd cz = space.basis.transpose() * c;
    if ((c - space.basis * cz).norm() > 1e-9) {
      return {primal_feasible(a, rows.rhs) ? LpStatus::Unbounded : LpStatus::Infeasible, {}, kNaN};
    }

    if (a.cols() == 0) {
      // Every constraint reads 0 <= rhs and the objective is flat.
      return {LpStatus::Optimal, Eigen::VectorXd::Zero(lp.objective.size()), 0.0};
    }
    const auto dual = detail::solve_through_dual(a, rows.rhs, cz);
    switch (dual.kind) {
      case detail::DualSolve::Kind::DualUnbounded:
        return {LpStatus::Infeasible, {}, kNaN};
      case detail::DualSolve::Kind::DualInfeasible:
        return {primal_feasible(a, rows.rhs) ? LpStatus::Unbounded : LpStatus::Infeasible, {}, kNaN};
      case detail::DualSolve::Kind::Optimal:
        break;
    }
    Eigen::VectorXd z = dual.x;
    if (a.rows() > 0 && (a * z - rows.rhs).maxCoeff() > 0.0) z = detail::polish(a, rows.rhs, dual);
    const Eigen::VectorXd x = space.basis * z;
    if (rows.lhs.rows() > 0) {
      const double residual = (rows.lhs * x - rows.rhs).maxCoeff();
      if (!(residual <= feas)) {
        throw NumericalError("simplex optimum violates constraints by " + std::to_string(residual));
      }
    }
    return {LpStatus::Optimal, x, lp.objective.dot(x)};
  }

 private:
  // max t s.t. A x + t <= b, t <= 0 is always feasible and bounded, so its
  // dual never fails phase one.
  static bool primal_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    const Eigen::Index d = a.cols();
    Eigen::MatrixXd lhs(a.rows() + 1, d + 1);
    lhs.setZero();
    lhs.topLeftCorner(a.rows(), d) = a;
    lhs.col(d).head(a.rows()).setOnes();
    lhs(a.rows(), d) = 1.0;
    Eigen::VectorXd rhs(a.rows() + 1);
    rhs.head(a.rows()) = b;
    rhs(a.rows()) = 0.0;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(d + 1);
    c(d) = -1.0;
    const auto dual = detail::solve_through_dual(lhs, rhs, c);
    if (dual.kind != detail::DualSolve::Kind::Optimal) {
      throw NumericalError("feasibility subproblem failed to solve");
    }
    return dual.x(d) >= -tolerances().feas;
  }
};

template <class S>
concept LpSolver = requires(const S& solver, const LinearProgram& lp) {
  { solver(lp) } -> std::same_as<LpOutcome>;
};

static_assert(LpSolver<DenseSimplex>);

inline LpOutcome solve_lp(const LinearProgram& lp) { return DenseSimplex{}(lp); }

}  // namespace liftmerge
