#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <vector>

#include "liftmerge.hpp"

namespace testing_helpers {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Eigen::MatrixXd out(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) out(i, j++) = x;
    ++i;
  }
  return out;
}

// [lo, hi] on the real line.
inline liftmerge::Polyhedron interval(double lo, double hi) {
  return liftmerge::Polyhedron::box(vec({lo}), vec({hi}));
}

// Brute-force point sampling helper for Monte-Carlo checks.
inline Eigen::VectorXd sample_box(std::mt19937_64& rng, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Eigen::VectorXd x(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) x(i) = liftmerge::uniform(rng, lo(i), hi(i));
  return x;
}

}  // namespace testing_helpers
