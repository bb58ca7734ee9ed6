#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "liftmerge/config.hpp"
#include "liftmerge/parallel.hpp"
#include "liftmerge/polyhedron.hpp"

namespace liftmerge {

enum class Side : unsigned char { Low, High, Both };

/// Low: p lies in {a^T y <= b}. High: p lies in {a^T y >= b}. Both otherwise.
/// A region on the hyperplane itself (or empty) counts as Low.
inline Side classify(const Polyhedron& p, const Hyperplane& h) {
  if (h.a.size() != p.dim()) throw InputError("classify: hyperplane and region dimensions differ");
  const double feas = tolerances().feas;
  const auto upper = support_value(p, h.a);
  if (!upper || *upper <= h.b + feas) return Side::Low;
  const auto lower = support_value(p, -h.a);
  if (lower && -*lower >= h.b - feas) return Side::High;
  return Side::Both;
}

/// Operation counts charged by the online evaluation.
///
/// A hyperplane test with s nonzero coefficients costs s multiply-adds plus
/// one comparison (s + 1), so decisions on original coordinates cost about
/// n + 1 and decisions touching product coordinates up to l + 1.
struct OpCountModel {
  Eigen::Index n = 0;
  Eigen::Index l = 0;

  long node_cost(int support) const { return support + 1; }
  long function_eval_cost() const { return static_cast<long>(l) + 1; }
  long compare_cost() const { return 1; }
  long lift_cost() const { return static_cast<long>(n * (n + 1) / 2); }
};

inline int row_support(const Eigen::VectorXd& row) {
  int s = 0;
  for (Eigen::Index i = 0; i < row.size(); ++i) s += row(i) != 0.0 ? 1 : 0;
  return s;
}

/// Binary point-location tree over the regions of one partition.
///
/// Internal nodes send y low when a^T y <= b. A leaf lists candidate regions
/// (global indices, ascending) together with the rows of each candidate that
/// the path to the leaf has not already certified; only those rows are
/// checked online.
struct SearchTree {
  struct Node {
    int plane = -1;  // -1 marks a leaf
    int low = -1;
    int high = -1;
    std::vector<std::size_t> candidates;
    std::vector<std::vector<Eigen::Index>> residual_rows;

    bool leaf() const { return plane < 0; }
  };

  std::vector<Hyperplane> planes;  // all distinct facet hyperplanes of the partition
  std::vector<Node> nodes;         // nodes[0] is the root
  int depth = 0;

  std::size_t n_h() const { return planes.size(); }
};

namespace detail {

struct RowPlane {
  int plane = -1;  // index in SearchTree::planes, -1 if the row is not a facet
  bool flipped = false;
};

class TreeBuilder {
 public:
  TreeBuilder(const PolyhedralSet& regions, std::vector<std::size_t> members)
      : regions_(regions), members_(std::move(members)) {}

  SearchTree build() {
    if (members_.empty()) throw InputError("build_tree: empty partition");
    PolyhedralSet subset;
    for (auto r : members_) subset.push_back(regions_[r]);
    tree_.planes = extract_hyperplanes(subset);
    match_rows();
    classify_all();
    std::vector<std::size_t> active(members_.size());
    for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;
    used_.assign(tree_.planes.size(), false);
    tree_.depth = grow(active);
    return std::move(tree_);
  }

 private:
  void match_rows() {
    rows_.resize(members_.size());
    for (std::size_t m = 0; m < members_.size(); ++m) {
      const Polyhedron& p = regions_[members_[m]];
      rows_[m].resize(static_cast<std::size_t>(p.rows()));
      for (Eigen::Index r = 0; r < p.rows(); ++r) {
        const auto c = canonicalize(p.H().row(r).transpose(), p.K()(r));
        for (std::size_t h = 0; h < tree_.planes.size(); ++h) {
          if (same_hyperplane(tree_.planes[h], c.plane)) {
            rows_[m][static_cast<std::size_t>(r)] = {static_cast<int>(h), c.flipped};
            break;
          }
        }
      }
    }
  }

  // Facet rows and unbounded directions settle most entries without an LP.
  Side classify_member(std::size_t m, std::size_t h) const {
    for (const auto& rp : rows_[m]) {
      if (rp.plane == static_cast<int>(h)) return rp.flipped ? Side::High : Side::Low;
    }
    const Polyhedron& p = regions_[members_[m]];
    const Hyperplane& plane = tree_.planes[h];
    for (Eigen::Index k = 0; k < plane.a.size(); ++k) {
      if (plane.a(k) != 0.0 && (p.rows() == 0 || p.H().col(k).cwiseAbs().maxCoeff() == 0.0)) {
        return Side::Both;
      }
    }
    return classify(p, plane);
  }

  void classify_all() {
    table_.assign(tree_.planes.size(), std::vector<Side>(members_.size(), Side::Both));
    parallel_for(tree_.planes.size(), [&](std::size_t h) {
      for (std::size_t m = 0; m < members_.size(); ++m) table_[h][m] = classify_member(m, h);
    });
  }

  int make_leaf(int id, const std::vector<std::size_t>& active) {
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    for (auto m : active) {
      node.candidates.push_back(members_[m]);
      std::vector<Eigen::Index> residual;
      for (std::size_t r = 0; r < rows_[m].size(); ++r) {
        const auto& rp = rows_[m][r];
        const Side needed = rp.flipped ? Side::High : Side::Low;
        const bool certified =
            rp.plane >= 0 && std::find(path_.begin(), path_.end(), std::make_pair(rp.plane, needed)) != path_.end();
        if (!certified) residual.push_back(static_cast<Eigen::Index>(r));
      }
      node.residual_rows.push_back(std::move(residual));
    }
    return 0;
  }

  // Returns the height of the subtree rooted at the new node.
  int grow(const std::vector<std::size_t>& active) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    if (active.size() <= 1) return make_leaf(id, active);

    int best = -1;
    std::tuple<std::size_t, std::size_t> best_key{active.size(), 0};
    for (std::size_t h = 0; h < tree_.planes.size(); ++h) {
      if (used_[h]) continue;
      std::size_t lo = 0;
      std::size_t hi = 0;
      for (auto m : active) {
        const Side s = table_[h][m];
        lo += s != Side::High ? 1 : 0;
        hi += s != Side::Low ? 1 : 0;
      }
      const std::tuple<std::size_t, std::size_t> key{std::max(lo, hi), lo + hi};
      if (std::get<0>(key) >= active.size()) continue;
      if (best < 0 || key < best_key) {
        best = static_cast<int>(h);
        best_key = key;
      }
    }
    if (best < 0) return make_leaf(id, active);

    std::vector<std::size_t> low_set;
    std::vector<std::size_t> high_set;
    for (auto m : active) {
      const Side s = table_[static_cast<std::size_t>(best)][m];
      if (s != Side::High) low_set.push_back(m);
      if (s != Side::Low) high_set.push_back(m);
    }
    used_[static_cast<std::size_t>(best)] = true;
    tree_.nodes[static_cast<std::size_t>(id)].plane = best;

    path_.emplace_back(best, Side::Low);
    const int low_id = static_cast<int>(tree_.nodes.size());
    const int low_height = grow(low_set);
    path_.back().second = Side::High;
    const int high_id = static_cast<int>(tree_.nodes.size());
    const int high_height = grow(high_set);
    path_.pop_back();
    used_[static_cast<std::size_t>(best)] = false;

    tree_.nodes[static_cast<std::size_t>(id)].low = low_id;
    tree_.nodes[static_cast<std::size_t>(id)].high = high_id;
    return 1 + std::max(low_height, high_height);
  }

  const PolyhedralSet& regions_;
  std::vector<std::size_t> members_;
  SearchTree tree_;
  std::vector<std::vector<RowPlane>> rows_;
  std::vector<std::vector<Side>> table_;
  std::vector<bool> used_;
  std::vector<std::pair<int, Side>> path_;
};

}  // namespace detail

/// Balanced-split tree over `members` (indices into `regions`, which must not overlap).
///
/// Each node takes the unused hyperplane minimizing max(|low|, |high|), then
/// |low| + |high|, then the hyperplane index, where regions cut by the plane
/// count on both sides. A node becomes a leaf when no plane shrinks the
/// larger side below the current count.
inline SearchTree build_tree(const PolyhedralSet& regions, std::vector<std::size_t> members) {
  return detail::TreeBuilder(regions, std::move(members)).build();
}

inline SearchTree build_tree(const PolyhedralSet& partition) {
  std::vector<std::size_t> members(partition.size());
  for (std::size_t i = 0; i < members.size(); ++i) members[i] = i;
  return build_tree(partition, std::move(members));
}

struct TreeResult {
  std::optional<std::size_t> region;
  long ops = 0;
};

inline TreeResult evaluate_tree(const SearchTree& tree, const Eigen::VectorXd& y, const PolyhedralSet& regions,
                                const OpCountModel& model) {
  TreeResult out;
  const SearchTree::Node* node = &tree.nodes.front();
  while (!node->leaf()) {
    const Hyperplane& h = tree.planes[static_cast<std::size_t>(node->plane)];
    out.ops += model.node_cost(h.support());
    node = &tree.nodes[static_cast<std::size_t>(h.a.dot(y) <= h.b ? node->low : node->high)];
  }
  const double feas = tolerances().feas;
  for (std::size_t c = 0; c < node->candidates.size(); ++c) {
    const Polyhedron& p = regions[node->candidates[c]];
    bool inside = true;
    for (auto r : node->residual_rows[c]) {
      out.ops += model.node_cost(row_support(p.H().row(r).transpose()));
      if (p.H().row(r).dot(y) > p.K()(r) + feas) {
        inside = false;
        break;
      }
    }
    if (inside) {
      out.region = node->candidates[c];
      return out;
    }
  }
  return out;
}

/// Largest ops_used any query can incur in this tree.
inline long worst_case_tree_ops(const SearchTree& tree, const PolyhedralSet& regions, const OpCountModel& model) {
  long worst = 0;
  struct Frame {
    int node;
    long cost;
  };
  std::vector<Frame> stack{{0, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const auto& node = tree.nodes[static_cast<std::size_t>(f.node)];
    if (node.leaf()) {
      long cost = f.cost;
      for (std::size_t c = 0; c < node.candidates.size(); ++c) {
        const Polyhedron& p = regions[node.candidates[c]];
        for (auto r : node.residual_rows[c]) cost += model.node_cost(row_support(p.H().row(r).transpose()));
      }
      worst = std::max(worst, cost);
      continue;
    }
    const long step = model.node_cost(tree.planes[static_cast<std::size_t>(node.plane)].support());
    stack.push_back({node.low, f.cost + step});
    stack.push_back({node.high, f.cost + step});
  }
  return worst;
}

}  // namespace liftmerge
