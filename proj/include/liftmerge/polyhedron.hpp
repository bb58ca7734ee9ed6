#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liftmerge/config.hpp"
#include "liftmerge/lp.hpp"

namespace liftmerge {

/// {y : H y <= K}. Rows are stored with unit Euclidean norm.
///
/// Zero rows are dropped when vacuous; a zero row with negative right-hand
/// side turns the whole polyhedron into the canonical empty set, which has
/// no rows and `is_empty_marker() == true`.
class Polyhedron {
 public:
  Polyhedron() = default;

  Polyhedron(const Eigen::MatrixXd& h, const Eigen::VectorXd& k) : dim_(h.cols()) {
    if (h.rows() != k.size()) {
      throw InputError("polyhedron H has " + std::to_string(h.rows()) + " rows but K has length " +
                       std::to_string(k.size()));
    }
    if (!h.allFinite() || !k.allFinite()) throw InputError("polyhedron data must be finite");
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      const double norm = h.row(i).norm();
      if (norm > kZeroRow) {
        keep.push_back(i);
      } else if (k(i) < 0.0) {
        empty_ = true;
      }
    }
    if (empty_) {
      h_.resize(0, dim_);
      k_.resize(0);
      return;
    }
    h_.resize(static_cast<Eigen::Index>(keep.size()), dim_);
    k_.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r) {
      const double norm = h.row(keep[r]).norm();
      h_.row(static_cast<Eigen::Index>(r)) = h.row(keep[r]) / norm;
      k_(static_cast<Eigen::Index>(r)) = k(keep[r]) / norm;
    }
  }

  static Polyhedron universe(Eigen::Index dim) {
    return Polyhedron(Eigen::MatrixXd(0, dim), Eigen::VectorXd(0));
  }

  /// Takes rows verbatim (already unit norm, as stored by this class). Used by
  /// deserialization so that a save/load cycle is bit-exact.
  static Polyhedron from_normalized(Eigen::MatrixXd h, Eigen::VectorXd k) {
    if (h.rows() != k.size()) throw InputError("polyhedron H and K differ in row count");
    Polyhedron p;
    p.dim_ = h.cols();
    p.h_ = std::move(h);
    p.k_ = std::move(k);
    return p;
  }

  static Polyhedron empty(Eigen::Index dim) {
    Polyhedron p = universe(dim);
    p.empty_ = true;
    return p;
  }

  /// Axis-aligned box lo <= y <= hi.
  static Polyhedron box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    const Eigen::Index d = lo.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * d, d);
    Eigen::VectorXd k(2 * d);
    for (Eigen::Index i = 0; i < d; ++i) {
      h(2 * i, i) = -1.0;
      k(2 * i) = -lo(i);
      h(2 * i + 1, i) = 1.0;
      k(2 * i + 1) = hi(i);
    }
    return Polyhedron(h, k);
  }

  Eigen::Index dim() const { return dim_; }
  Eigen::Index rows() const { return h_.rows(); }
  const Eigen::MatrixXd& H() const { return h_; }
  const Eigen::VectorXd& K() const { return k_; }
  bool is_empty_marker() const { return empty_; }

  /// Closed membership H y <= K + tol.
  bool contains(const Eigen::VectorXd& y, double tol) const {
    if (empty_) return false;
    for (Eigen::Index i = 0; i < h_.rows(); ++i) {
      if (h_.row(i).dot(y) > k_(i) + tol) return false;
    }
    return true;
  }

  Polyhedron intersect(const Polyhedron& other) const {
    check_same_dim(other);
    if (empty_ || other.empty_) return empty(dim_);
    Polyhedron out;
    out.dim_ = dim_;
    out.h_.resize(h_.rows() + other.h_.rows(), dim_);
    out.h_ << h_, other.h_;
    out.k_.resize(k_.size() + other.k_.size());
    out.k_ << k_, other.k_;
    return out;
  }

  /// Adds g^T y <= b (normalized; zero rows handled as in the constructor).
  Polyhedron with_row(const Eigen::VectorXd& g, double b) const {
    Eigen::MatrixXd row = g.transpose();
    return intersect(Polyhedron(row, Eigen::VectorXd::Constant(1, b)));
  }

  Polyhedron select_rows(const std::vector<Eigen::Index>& idx) const {
    Polyhedron out;
    out.dim_ = dim_;
    out.empty_ = empty_;
    out.h_.resize(static_cast<Eigen::Index>(idx.size()), dim_);
    out.k_.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
      out.h_.row(static_cast<Eigen::Index>(r)) = h_.row(idx[r]);
      out.k_(static_cast<Eigen::Index>(r)) = k_(idx[r]);
    }
    return out;
  }

  void check_same_dim(const Polyhedron& other) const {
    if (other.dim_ != dim_) {
      throw InputError("polyhedron dimension mismatch: " + std::to_string(dim_) + " vs " +
                       std::to_string(other.dim_));
    }
  }

 private:
  static constexpr double kZeroRow = 1e-12;

  Eigen::Index dim_ = 0;
  Eigen::MatrixXd h_;
  Eigen::VectorXd k_;
  bool empty_ = false;
};

/// Ordered collection of polyhedra of one dimension (0-based).
using PolyhedralSet = std::vector<Polyhedron>;

/// a^T y = b with ||a|| = 1 and the first nonzero entry of a positive.
struct Hyperplane {
  Eigen::VectorXd a;
  double b = 0.0;

  /// Number of nonzero coefficients.
  int support() const {
    int s = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += a(i) != 0.0 ? 1 : 0;
    return s;
  }
};

/// Canonical form of the row g^T y <= h. `flipped` is true when the row reads
/// a^T y >= b in canonical coordinates.
struct CanonicalRow {
  Hyperplane plane;
  bool flipped = false;
};

inline CanonicalRow canonicalize(const Eigen::VectorXd& g, double h) {
  const double norm = g.norm();
  CanonicalRow out{{g / norm, h / norm}, false};
  for (Eigen::Index i = 0; i < out.plane.a.size(); ++i) {
    if (std::abs(out.plane.a(i)) > 1e-12) {
      if (out.plane.a(i) < 0.0) {
        out.plane.a = -out.plane.a;
        out.plane.b = -out.plane.b;
        out.flipped = true;
      }
      break;
    }
  }
  // Exact zeros keep support counts honest after normalization noise.
  for (Eigen::Index i = 0; i < out.plane.a.size(); ++i) {
    if (std::abs(out.plane.a(i)) <= 1e-15) out.plane.a(i) = 0.0;
  }
  return out;
}

inline bool same_hyperplane(const Hyperplane& x, const Hyperplane& y, double tol = 1e-8) {
  return x.a.size() == y.a.size() && (x.a - y.a).norm() <= tol && std::abs(x.b - y.b) <= tol;
}

// ---------------------------------------------------------------------------
// LP-backed primitives

/// Chebyshev-type certificate: max t s.t. H y + t ||H_i|| <= K, t <= 1.
struct InteriorCertificate {
  double radius = 0.0;
  Eigen::VectorXd center;
};

/// nullopt when the polyhedron is empty.
inline std::optional<InteriorCertificate> interior_certificate(const Polyhedron& p) {
  if (p.is_empty_marker()) return std::nullopt;
  const Eigen::Index d = p.dim();
  const Eigen::Index m = p.rows();
  LinearProgram lp;
  lp.constraints_lhs.resize(m + 1, d + 1);
  lp.constraints_lhs.setZero();
  lp.constraints_lhs.topLeftCorner(m, d) = p.H();
  lp.constraints_lhs.col(d).head(m) = p.H().rowwise().norm();
  lp.constraints_lhs(m, d) = 1.0;
  lp.constraints_rhs.resize(m + 1);
  lp.constraints_rhs.head(m) = p.K();
  lp.constraints_rhs(m) = 1.0;
  lp.objective = Eigen::VectorXd::Zero(d + 1);
  lp.objective(d) = -1.0;
  const auto out = solve_lp(lp);
  if (!out.optimal()) throw NumericalError("interior certificate LP did not reach an optimum");
  const double t = out.argmin(d);
  if (t < -tolerances().feas) return std::nullopt;
  return InteriorCertificate{t, out.argmin.head(d)};
}

inline bool is_full_dimensional(const Polyhedron& p) {
  const auto cert = interior_certificate(p);
  return cert && cert->radius > tolerances().interior;
}

inline bool is_empty(const Polyhedron& p) { return !interior_certificate(p).has_value(); }

/// True iff p1 and p2 share interior points.
inline bool overlaps(const Polyhedron& p1, const Polyhedron& p2) {
  p1.check_same_dim(p2);
  return is_full_dimensional(p1.intersect(p2));
}

/// sup g^T y over p; +inf when unbounded, nullopt when p is empty.
inline std::optional<double> support_value(const Polyhedron& p, const Eigen::VectorXd& g) {
  if (p.is_empty_marker()) return std::nullopt;
  const auto out = solve_lp({-g, p.H(), p.K()});
  switch (out.status) {
    case LpStatus::Optimal:
      return -out.value;
    case LpStatus::Unbounded:
      return std::numeric_limits<double>::infinity();
    case LpStatus::Infeasible:
      break;
  }
  return std::nullopt;
}

/// Interval hull of p along the first `count` coordinates (infinite where unbounded).
/// nullopt when p is empty.
inline std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> coordinate_bounds(
    const Polyhedron& p, Eigen::Index count) {
  Eigen::VectorXd lo(count), hi(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(p.dim());
    e(i) = 1.0;
    const auto up = support_value(p, e);
    if (!up) return std::nullopt;
    const auto down = support_value(p, -e);
    if (!down) return std::nullopt;
    hi(i) = *up;
    lo(i) = -*down;
  }
  return std::make_pair(lo, hi);
}

/// Irredundant representation of the same point set, one LP per row.
inline Polyhedron remove_redundant(const Polyhedron& p) {
  if (p.is_empty_marker() || is_empty(p)) return Polyhedron::empty(p.dim());
  const double feas = tolerances().feas;
  std::vector<bool> kept(static_cast<std::size_t>(p.rows()), true);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    std::vector<Eigen::Index> others;
    for (Eigen::Index j = 0; j < p.rows(); ++j) {
      if (j != i && kept[static_cast<std::size_t>(j)]) others.push_back(j);
    }
    // The relaxed copy of row i keeps the LP bounded.
    const Polyhedron relaxed = p.select_rows(others).with_row(p.H().row(i).transpose(), p.K()(i) + 1.0);
    const auto sup = support_value(relaxed, p.H().row(i).transpose());
    if (!sup || *sup <= p.K()(i) + feas) kept[static_cast<std::size_t>(i)] = false;
  }
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if (kept[static_cast<std::size_t>(i)]) idx.push_back(i);
  }
  return p.select_rows(idx);
}

namespace detail {

inline void region_diff_recurse(const Polyhedron& r, const PolyhedralSet& q, std::size_t start,
                                PolyhedralSet& out) {
  std::size_t k = start;
  while (k < q.size() && !overlaps(r, q[k])) ++k;
  if (k == q.size()) {
    out.push_back(r);
    return;
  }
  const Polyhedron& cut = q[k];
  Polyhedron inside = r;
  for (Eigen::Index row = 0; row < cut.rows(); ++row) {
    const Eigen::VectorXd g = cut.H().row(row).transpose();
    const double h = cut.K()(row);
    Polyhedron outside = inside.with_row(-g, -h);
    if (is_full_dimensional(outside)) region_diff_recurse(outside, q, k + 1, out);
    inside = inside.with_row(g, h);
    if (!is_full_dimensional(inside)) return;
  }
}

}  // namespace detail

/// Closure of p minus the union of q as pairwise non-overlapping,
/// full-dimensional, irredundant polyhedra. q is processed in input order;
/// each cutting polyhedron splits the remainder along its rows, one at a time.
inline PolyhedralSet region_diff(const Polyhedron& p, const PolyhedralSet& q) {
  for (const auto& e : q) p.check_same_dim(e);
  PolyhedralSet raw;
  if (!is_full_dimensional(p)) return raw;
  detail::region_diff_recurse(p, q, 0, raw);
  PolyhedralSet out;
  out.reserve(raw.size());
  for (const auto& piece : raw) out.push_back(remove_redundant(piece));
  return out;
}

/// Deduplicated canonical facet hyperplanes, in first-seen order.
inline std::vector<Hyperplane> extract_hyperplanes(const PolyhedralSet& ps) {
  std::vector<Hyperplane> planes;
  for (const auto& p : ps) {
    const Polyhedron facets = remove_redundant(p);
    for (Eigen::Index i = 0; i < facets.rows(); ++i) {
      auto c = canonicalize(facets.H().row(i).transpose(), facets.K()(i));
      bool seen = false;
      for (const auto& h : planes) {
        if (same_hyperplane(h, c.plane)) {
          seen = true;
          break;
        }
      }
      if (!seen) planes.push_back(std::move(c.plane));
    }
  }
  return planes;
}

}  // namespace liftmerge
