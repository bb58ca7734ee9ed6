#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "liftmerge/solution.hpp"

namespace liftmerge {

/// Synthetic overlapping-partition instances.
///
/// Every partition tiles the box [-half_width, half_width]^n with grid^n
/// cells. Partition k (0-based) moves its interior grid lines by
/// shift * k / n_part cell widths, so with shift = 0 all partitions share
/// one grid. Each cell gets its own random quadratic.
struct GeneratorSpec {
  int n = 2;
  int n_part = 2;
  int grid = 2;
  std::uint64_t seed = 1;
  double shift = 0.5;      // fraction of a cell width spread across partitions, in [0, 1)
  double curvature = 1.0;  // A entries in [-curvature, curvature]
  double linear = 1.0;     // B entries in [-linear, linear]
  double offset = 1.0;     // C in [-offset, offset]
  double half_width = 1.0;
};

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

inline PwqSolution generate(const GeneratorSpec& spec) {
  if (spec.n < 1 || spec.n_part < 1 || spec.grid < 1) throw InputError("generator: n, n_part and grid must be positive");
  if (spec.shift < 0.0 || spec.shift >= 1.0) throw InputError("generator: shift must lie in [0, 1)");
  if (!(spec.half_width > 0.0)) throw InputError("generator: half_width must be positive");
  std::mt19937_64 rng(spec.seed);
  const Eigen::Index n = spec.n;
  const double width = 2.0 * spec.half_width / spec.grid;

  PwqSolution s;
  s.n = n;
  std::vector<int> partition;
  for (int k = 0; k < spec.n_part; ++k) {
    const double offset = spec.shift * width * k / spec.n_part;
    std::vector<double> cuts{-spec.half_width};
    for (int i = 1; i < spec.grid; ++i) cuts.push_back(-spec.half_width + offset + i * width);
    cuts.push_back(spec.half_width);

    long cells = 1;
    for (Eigen::Index d = 0; d < n; ++d) cells *= spec.grid;
    for (long cell = 0; cell < cells; ++cell) {
      Eigen::VectorXd lo(n), hi(n);
      long rest = cell;
      for (Eigen::Index d = 0; d < n; ++d) {
        const auto i = static_cast<std::size_t>(rest % spec.grid);
        rest /= spec.grid;
        lo(d) = cuts[i];
        hi(d) = cuts[i + 1];
      }
      s.regions.push_back(Polyhedron::box(lo, hi));

      Eigen::MatrixXd a(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = r; c < n; ++c) {
          a(r, c) = uniform(rng, -spec.curvature, spec.curvature);
          a(c, r) = a(r, c);
        }
      }
      Eigen::VectorXd b(n);
      for (Eigen::Index d = 0; d < n; ++d) b(d) = uniform(rng, -spec.linear, spec.linear);
      const double c = uniform(rng, -spec.offset, spec.offset);
      s.functions.emplace_back(a, b, c);
      partition.push_back(k + 1);
    }
  }
  s.partition = PartitionIndex(std::move(partition));
  return s;
}

/// The two-region one-dimensional instance: |x| <= 2 with x^2 + 1 and
/// |x| <= 3 with 2 x^2, one partition each.
inline PwqSolution example_1d() {
  PwqSolution s;
  s.n = 1;
  Eigen::MatrixXd h(2, 1);
  h << 1.0, -1.0;
  s.regions.emplace_back(h, Eigen::Vector2d(2.0, 2.0));
  s.regions.emplace_back(h, Eigen::Vector2d(3.0, 3.0));
  s.functions.emplace_back(Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1), 1.0);
  s.functions.emplace_back(Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Zero(1), 0.0);
  s.partition = PartitionIndex({1, 2});
  return s;
}

}  // namespace liftmerge
