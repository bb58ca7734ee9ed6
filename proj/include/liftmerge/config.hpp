#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace liftmerge {

/// Malformed input: dimension mismatches, schema violations, invalid partitions.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An LP or geometric primitive could not produce a trustworthy answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerance ladder shared by every module.
///
/// `feas` is the slack allowed on a closed inequality, `interior` the
/// inscribed radius that certifies a full-dimensional set and `objective`
/// the accuracy expected from an LP optimum.
struct Tolerances {
  double feas = 1e-9;
  double interior = 1e-7;
  double objective = 1e-8;
};

namespace detail {

inline double env_or(const char* name, double fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0)) {
    throw InputError(std::string("invalid tolerance in ") + name + ": " + raw);
  }
  return v;
}

inline Tolerances& mutable_tolerances() {
  static Tolerances tol = [] {
    Tolerances t;
    t.feas = env_or("LIFTMERGE_TAU_FEAS", t.feas);
    t.interior = env_or("LIFTMERGE_TAU_INT", t.interior);
    t.objective = env_or("LIFTMERGE_TAU_OBJ", t.objective);
    return t;
  }();
  return tol;
}

}  // namespace detail

/// Process-wide tolerances. Environment overrides (LIFTMERGE_TAU_FEAS,
/// LIFTMERGE_TAU_INT, LIFTMERGE_TAU_OBJ) are read on first access.
inline const Tolerances& tolerances() { return detail::mutable_tolerances(); }

/// Not synchronized; call before any concurrent work starts.
inline void set_tolerances(const Tolerances& t) { detail::mutable_tolerances() = t; }

}  // namespace liftmerge
