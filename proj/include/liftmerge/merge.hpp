#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "liftmerge/parallel.hpp"
#include "liftmerge/polyhedron.hpp"
#include "liftmerge/solution.hpp"

namespace liftmerge {

/// Piecewise affine function over one or more non-overlapping partitions.
/// provenance[i] is the input region that region i was cut from.
struct MergedSolution {
  Eigen::Index n = 0;
  Eigen::Index l = 0;
  PolyhedralSet regions;
  std::vector<AffineFunction> functions;
  PartitionIndex partition;
  std::vector<std::size_t> provenance;

  static MergedSolution from_lifted(const LiftedSolution& s) {
    MergedSolution out{s.n, s.l, s.regions, s.functions, s.partition, {}};
    out.provenance.resize(s.regions.size());
    std::iota(out.provenance.begin(), out.provenance.end(), std::size_t{0});
    return out;
  }

  void validate() const {
    const auto count = regions.size();
    if (functions.size() != count || partition.size() != count || provenance.size() != count) {
      throw InputError("merged solution: regions, functions, partition and provenance differ in length");
    }
  }
};

namespace detail {

using Box = std::pair<Eigen::VectorXd, Eigen::VectorXd>;

inline bool boxes_disjoint(const Box& a, const Box& b, double tol) {
  for (Eigen::Index k = 0; k < a.first.size(); ++k) {
    if (a.second(k) <= b.first(k) + tol || b.second(k) <= a.first(k) + tol) return true;
  }
  return false;
}

inline bool same_function(const AffineFunction& f, const AffineFunction& g) {
  return (f.D - g.D).cwiseAbs().maxCoeff() <= 1e-12 && std::abs(f.E - g.E) <= 1e-12;
}

}  // namespace detail

/// Removes overlaps: every region keeps only the part where its function is
/// the pointwise minimum. `provenance[i]` is attached to the pieces of region
/// i (defaults to i). `bounded_coords` leading coordinates are used for a
/// bounding-box prefilter of the pairwise overlap tests.
///
/// Coinciding functions: j cuts i only when j < i or the two functions differ,
/// so exactly one copy of a duplicated piece survives.
inline MergedSolution merge(const PolyhedralSet& regions, const std::vector<AffineFunction>& functions,
                            std::vector<std::size_t> provenance = {},
                            std::optional<Eigen::Index> bounded_coords = std::nullopt) {
  if (regions.size() != functions.size()) {
    throw InputError("merge: regions and functions differ in length");
  }
  MergedSolution out;
  if (regions.empty()) return out;
  const Eigen::Index dim = regions.front().dim();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].dim() != dim || functions[i].dim() != dim) {
      throw InputError("merge: region/function " + std::to_string(i + 1) + " has the wrong dimension");
    }
  }
  if (provenance.empty()) {
    provenance.resize(regions.size());
    std::iota(provenance.begin(), provenance.end(), std::size_t{0});
  }
  const Eigen::Index box_dims = std::min(dim, bounded_coords.value_or(dim));
  const double feas = tolerances().feas;

  std::vector<std::optional<detail::Box>> boxes(regions.size());
  parallel_for(regions.size(), [&](std::size_t i) { boxes[i] = coordinate_bounds(regions[i], box_dims); });

  std::vector<PolyhedralSet> pieces(regions.size());
  parallel_for(regions.size(), [&](std::size_t i) {
    if (!boxes[i]) return;
    PolyhedralSet cuts;
    for (std::size_t j = 0; j < regions.size(); ++j) {
      if (j == i || !boxes[j]) continue;
      if (detail::boxes_disjoint(*boxes[i], *boxes[j], feas)) continue;
      if (j > i && detail::same_function(functions[i], functions[j])) continue;
      // {J_i >= J_j}  <=>  (D_j - D_i)^T y <= E_i - E_j
      Polyhedron loses = regions[j].with_row(functions[j].D - functions[i].D, functions[i].E - functions[j].E);
      if (!overlaps(regions[i], loses)) continue;
      cuts.push_back(std::move(loses));
    }
    pieces[i] = region_diff(regions[i], cuts);
  });

  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (auto& p : pieces[i]) {
      out.regions.push_back(std::move(p));
      out.functions.push_back(functions[i]);
      out.provenance.push_back(provenance[i]);
    }
  }
  out.partition = PartitionIndex::uniform(out.regions.size());
  out.l = dim;
  return out;
}

/// Full merge of every partition of a solution into one.
inline MergedSolution merge(const MergedSolution& s) {
  s.validate();
  auto out = merge(s.regions, s.functions, s.provenance, s.n > 0 ? std::optional(s.n) : std::nullopt);
  out.n = s.n;
  out.l = s.l;
  return out;
}

/// `sweeps` rounds of pairwise merging: partitions 2k-1 and 2k become
/// partition k. An odd trailing partition is carried through unchanged.
inline MergedSolution merge_pairwise(const MergedSolution& s, int sweeps) {
  s.validate();
  if (sweeps < 0) throw InputError("merge_pairwise: sweep count must be nonnegative");
  MergedSolution cur = s;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    const int parts = cur.partition.count();
    MergedSolution next{cur.n, cur.l, {}, {}, {}, {}};
    std::vector<int> values;
    for (int k = 1; 2 * k - 1 <= parts; ++k) {
      std::vector<std::size_t> idx = cur.partition.members(2 * k - 1);
      if (2 * k <= parts) {
        const auto second = cur.partition.members(2 * k);
        idx.insert(idx.end(), second.begin(), second.end());
        std::sort(idx.begin(), idx.end());
        PolyhedralSet regions;
        std::vector<AffineFunction> functions;
        std::vector<std::size_t> provenance;
        for (auto i : idx) {
          regions.push_back(cur.regions[i]);
          functions.push_back(cur.functions[i]);
          provenance.push_back(cur.provenance[i]);
        }
        auto merged = merge(regions, functions, provenance,
                            cur.n > 0 ? std::optional(cur.n) : std::nullopt);
        for (std::size_t r = 0; r < merged.regions.size(); ++r) {
          next.regions.push_back(std::move(merged.regions[r]));
          next.functions.push_back(std::move(merged.functions[r]));
          next.provenance.push_back(merged.provenance[r]);
          values.push_back(k);
        }
      } else {
        for (auto i : idx) {
          next.regions.push_back(cur.regions[i]);
          next.functions.push_back(cur.functions[i]);
          next.provenance.push_back(cur.provenance[i]);
          values.push_back(k);
        }
      }
    }
    next.partition = PartitionIndex(std::move(values));
    cur = std::move(next);
  }
  return cur;
}

/// Relabels partitions by `order` (order[v-1] is the new value of partition v).
inline MergedSolution relabel_partitions(const MergedSolution& s, const std::vector<int>& order) {
  std::vector<int> values(s.partition.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = order.at(static_cast<std::size_t>(s.partition[i] - 1));
  }
  MergedSolution out = s;
  out.partition = PartitionIndex(std::move(values));
  return out;
}

/// Tries the identity pairing plus `permutations` random ones and keeps the
/// result with the fewest regions (first found wins ties).
inline MergedSolution merge_pairwise_greedy(const MergedSolution& s, int sweeps, int permutations,
                                            std::uint64_t seed) {
  MergedSolution best = merge_pairwise(s, sweeps);
  if (sweeps == 0) return best;
  std::mt19937_64 rng(seed);
  std::vector<int> order(static_cast<std::size_t>(s.partition.count()));
  std::iota(order.begin(), order.end(), 1);
  for (int r = 0; r < permutations; ++r) {
    // Fisher-Yates with raw engine output keeps the sequence library-independent.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
    }
    auto candidate = merge_pairwise(relabel_partitions(s, order), sweeps);
    if (candidate.regions.size() < best.regions.size()) best = std::move(candidate);
  }
  return best;
}

}  // namespace liftmerge
