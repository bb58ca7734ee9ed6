#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "liftmerge/polyhedron.hpp"
#include "liftmerge/solution.hpp"

namespace liftmerge {

namespace detail {

inline std::pair<double, double> interval_product(double alo, double ahi, double blo, double bhi) {
  const double c[] = {alo * blo, alo * bhi, ahi * blo, ahi * bhi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

inline std::pair<double, double> interval_square(double lo, double hi) {
  const double a = lo * lo;
  const double b = hi * hi;
  if (lo <= 0.0 && hi >= 0.0) return {0.0, std::max(a, b)};
  return {std::min(a, b), std::max(a, b)};
}

/// Lifted image of p tightened by interval bounds on every product x_i x_j.
inline Polyhedron lifted_relaxation(const Polyhedron& p, const Eigen::VectorXd& lo,
                                    const Eigen::VectorXd& hi) {
  const Eigen::Index n = p.dim();
  const Eigen::Index l = lifted_dim(n);
  const Eigen::Index extra = l - n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.rows() + 2 * extra, l);
  Eigen::VectorXd k(p.rows() + 2 * extra);
  h.topLeftCorner(p.rows(), n) = p.H();
  k.head(p.rows()) = p.K();
  Eigen::Index row = p.rows();
  Eigen::Index col = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++col) {
      const auto [blo, bhi] =
          i == j ? interval_square(lo(i), hi(i)) : interval_product(lo(i), hi(i), lo(j), hi(j));
      h(row, col) = 1.0;
      k(row++) = bhi;
      h(row, col) = -1.0;
      k(row++) = -blo;
    }
  }
  return Polyhedron(h, k);
}

inline bool contained_in(const Polyhedron& inner, const Polyhedron& outer) {
  for (Eigen::Index r = 0; r < outer.rows(); ++r) {
    const auto sup = support_value(inner, outer.H().row(r).transpose());
    if (!sup || *sup > outer.K()(r) + tolerances().feas) return false;
  }
  return true;
}

}  // namespace detail

/// Drops regions whose function provably never wins.
///
/// Region i goes when some surviving region j contains it and J[j] <= J[i]
/// holds on all of P[i]. The inequality is certified by minimizing the lifted
/// difference over P[i] with box bounds on the product coordinates, which is
/// a relaxation, so a removal is always safe while some removable regions
/// may be kept. Exact ties remove the higher index.
///
/// `kept`, when given, receives the input index of every surviving region.
inline PwqSolution reduce(const PwqSolution& s, std::vector<std::size_t>* kept = nullptr) {
  s.validate();
  const std::size_t count = s.regions.size();
  const auto lifted = lift_functions(s.functions);
  const double feas = tolerances().feas;
  const double obj = tolerances().objective;

  std::vector<std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>>> bounds(count);
  std::vector<std::optional<InteriorCertificate>> centers(count);
  for (std::size_t i = 0; i < count; ++i) {
    bounds[i] = coordinate_bounds(s.regions[i], s.n);
    centers[i] = interior_certificate(s.regions[i]);
  }

  std::vector<bool> removed(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    if (!bounds[i] || !centers[i]) continue;
    const auto& [lo, hi] = *bounds[i];
    if (!lo.allFinite() || !hi.allFinite()) continue;
    std::optional<Polyhedron> relaxation;
    for (std::size_t j = 0; j < count && !removed[i]; ++j) {
      if (j == i || removed[j]) continue;
      if (!s.regions[j].contains(centers[i]->center, feas)) continue;
      if (!detail::contained_in(s.regions[i], s.regions[j])) continue;
      if (!relaxation) relaxation = detail::lifted_relaxation(s.regions[i], lo, hi);
      const Eigen::VectorXd diff = lifted[i].D - lifted[j].D;
      const auto out = solve_lp({diff, relaxation->H(), relaxation->K()});
      if (!out.optimal()) continue;
      const double margin = out.value + (lifted[i].E - lifted[j].E);
      if (margin >= -feas && (j < i || margin > obj)) removed[i] = true;
    }
  }

  PwqSolution out;
  out.n = s.n;
  std::vector<int> values;
  std::map<int, int> renumber;
  for (std::size_t i = 0; i < count; ++i) {
    if (!removed[i]) renumber.emplace(s.partition[i], 0);
  }
  int next = 1;
  for (auto& [from, to] : renumber) to = next++;
  if (s.control_laws) out.control_laws.emplace();
  if (kept != nullptr) kept->clear();
  for (std::size_t i = 0; i < count; ++i) {
    if (removed[i]) continue;
    if (kept != nullptr) kept->push_back(i);
    out.regions.push_back(s.regions[i]);
    out.functions.push_back(s.functions[i]);
    values.push_back(renumber.at(s.partition[i]));
    if (s.control_laws) out.control_laws->push_back((*s.control_laws)[i]);
  }
  out.partition = PartitionIndex(std::move(values));
  return out;
}

}  // namespace liftmerge
