#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "liftmerge/config.hpp"
#include "liftmerge/polyhedron.hpp"

namespace liftmerge {

/// x^T A x + B^T x + C with A symmetric.
struct QuadraticFunction {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  double C = 0.0;

  QuadraticFunction() = default;
  QuadraticFunction(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double c) : B(b), C(c) {
    if (a.rows() != a.cols() || a.rows() != b.size()) {
      throw InputError("quadratic function: A must be n x n and B of length n");
    }
    A = 0.5 * (a + a.transpose());
  }

  Eigen::Index dim() const { return B.size(); }
  double operator()(const Eigen::VectorXd& x) const { return x.dot(A * x) + B.dot(x) + C; }
};

/// D^T y + E.
struct AffineFunction {
  Eigen::VectorXd D;
  double E = 0.0;

  Eigen::Index dim() const { return D.size(); }
  double operator()(const Eigen::VectorXd& y) const { return D.dot(y) + E; }
};

/// Partition values s_i in {1..count()}, each value used at least once.
class PartitionIndex {
 public:
  PartitionIndex() = default;
  explicit PartitionIndex(std::vector<int> values) : values_(std::move(values)) {
    int top = 0;
    for (int v : values_) {
      if (v < 1) throw InputError("partition values must be positive, got " + std::to_string(v));
      top = std::max(top, v);
    }
    std::vector<bool> used(static_cast<std::size_t>(top) + 1, false);
    for (int v : values_) used[static_cast<std::size_t>(v)] = true;
    for (int v = 1; v <= top; ++v) {
      if (!used[static_cast<std::size_t>(v)]) {
        throw InputError("partition value " + std::to_string(v) + " is unused (values must be 1.." +
                         std::to_string(top) + " without gaps)");
      }
    }
    count_ = top;
  }

  /// Single partition of `size` elements.
  static PartitionIndex uniform(std::size_t size) {
    return size == 0 ? PartitionIndex() : PartitionIndex(std::vector<int>(size, 1));
  }

  std::size_t size() const { return values_.size(); }
  int count() const { return count_; }
  int operator[](std::size_t i) const { return values_[i]; }
  const std::vector<int>& values() const { return values_; }

  /// Element indices with partition value k, ascending.
  std::vector<std::size_t> members(int k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] == k) out.push_back(i);
    }
    return out;
  }

 private:
  std::vector<int> values_;
  int count_ = 0;
};

/// u = F x + g, attached to one region of the original solution.
struct ControlLaw {
  Eigen::MatrixXd F;
  Eigen::VectorXd g;
};

/// Piecewise quadratic value function over overlapping polyhedral partitions.
struct PwqSolution {
  Eigen::Index n = 0;
  PolyhedralSet regions;
  std::vector<QuadraticFunction> functions;
  PartitionIndex partition;
  std::optional<std::vector<ControlLaw>> control_laws;

  /// Shape checks only; per-partition overlap is checked by the compile pipeline.
  void validate() const {
    if (n < 1) throw InputError("solution dimension n must be positive");
    if (regions.size() != functions.size() || regions.size() != partition.size()) {
      throw InputError("regions, functions and partition must have equal length (" +
                       std::to_string(regions.size()) + ", " + std::to_string(functions.size()) +
                       ", " + std::to_string(partition.size()) + ")");
    }
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (regions[i].dim() != n) {
        throw InputError("region " + std::to_string(i + 1) + " has dimension " +
                         std::to_string(regions[i].dim()) + ", expected " + std::to_string(n));
      }
      if (functions[i].dim() != n) {
        throw InputError("function " + std::to_string(i + 1) + " has dimension " +
                         std::to_string(functions[i].dim()) + ", expected " + std::to_string(n));
      }
    }
    if (control_laws && control_laws->size() != regions.size()) {
      throw InputError("control_laws must have one entry per region");
    }
    if (control_laws) {
      for (std::size_t i = 0; i < control_laws->size(); ++i) {
        const auto& law = (*control_laws)[i];
        if (law.F.cols() != n || law.F.rows() != law.g.size()) {
          throw InputError("control law " + std::to_string(i + 1) + " has inconsistent shape");
        }
      }
    }
  }
};

/// Dimension of the lifted space, (n^2 + 3n) / 2.
constexpr Eigen::Index lifted_dim(Eigen::Index n) { return (n * n + 3 * n) / 2; }

/// Same data as PwqSolution in the lifted space, with affine pieces.
struct LiftedSolution {
  Eigen::Index n = 0;
  Eigen::Index l = 0;
  PolyhedralSet regions;
  std::vector<AffineFunction> functions;
  PartitionIndex partition;
};

// ---------------------------------------------------------------------------
// Lifting

/// [x_1..x_n, x_1^2, x_1 x_2, .., x_1 x_n, x_2^2, x_2 x_3, .., x_n^2].
inline Eigen::VectorXd lift_point(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd y(lifted_dim(n));
  y.head(n) = x;
  Eigen::Index k = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) y(k++) = x(i) * x(j);
  }
  return y;
}

/// [H_i, 0] y <= K_i for every region.
inline PolyhedralSet lift_regions(const PolyhedralSet& ps) {
  PolyhedralSet out;
  out.reserve(ps.size());
  for (const auto& p : ps) {
    if (p.is_empty_marker()) {
      out.push_back(Polyhedron::empty(lifted_dim(p.dim())));
      continue;
    }
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.rows(), lifted_dim(p.dim()));
    h.leftCols(p.dim()) = p.H();
    out.emplace_back(h, p.K());
  }
  return out;
}

inline AffineFunction lift_function(const QuadraticFunction& f) {
  const Eigen::Index n = f.dim();
  AffineFunction out{Eigen::VectorXd(lifted_dim(n)), f.C};
  out.D.head(n) = f.B;
  Eigen::Index k = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.D(k++) = f.A(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) out.D(k++) = 2.0 * f.A(i, j);
  }
  return out;
}

inline std::vector<AffineFunction> lift_functions(const std::vector<QuadraticFunction>& fs) {
  std::vector<AffineFunction> out;
  out.reserve(fs.size());
  for (const auto& f : fs) {
    if (!fs.empty() && f.dim() != fs.front().dim()) {
      throw InputError("all quadratic functions must share the same dimension");
    }
    out.push_back(lift_function(f));
  }
  return out;
}

inline LiftedSolution lift_solution(const PwqSolution& s) {
  s.validate();
  return {s.n, lifted_dim(s.n), lift_regions(s.regions), lift_functions(s.functions), s.partition};
}

// ---------------------------------------------------------------------------
// Sequential oracle

struct SequentialResult {
  std::size_t index = 0;  // 0-based region index
  double value = 0.0;
};

/// Scans every region; lowest index wins ties. nullopt when no region contains the point.
template <class Function>
std::optional<SequentialResult> evaluate_sequential(const PolyhedralSet& regions,
                                                    const std::vector<Function>& functions,
                                                    const Eigen::VectorXd& point) {
  const double tol = tolerances().feas;
  std::optional<SequentialResult> best;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (!regions[i].contains(point, tol)) continue;
    const double v = functions[i](point);
    if (!best || v < best->value) best = SequentialResult{i, v};
  }
  return best;
}

inline std::optional<SequentialResult> evaluate_sequential(const PwqSolution& s,
                                                           const Eigen::VectorXd& x) {
  if (x.size() != s.n) throw InputError("query point has wrong dimension");
  return evaluate_sequential(s.regions, s.functions, x);
}

/// Evaluates a lifted solution at a lifted point y.
inline std::optional<SequentialResult> evaluate_sequential(const LiftedSolution& s,
                                                           const Eigen::VectorXd& y) {
  if (y.size() != s.l) throw InputError("lifted query point has wrong dimension");
  return evaluate_sequential(s.regions, s.functions, y);
}

/// Indices of the regions containing the point (closed, tau_feas).
inline std::vector<std::size_t> index_set(const PolyhedralSet& regions, const Eigen::VectorXd& point) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].contains(point, tolerances().feas)) out.push_back(i);
  }
  return out;
}

}  // namespace liftmerge
