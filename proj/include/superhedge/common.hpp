#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace superhedge {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid domain data (bad marginals, non-convex call curves, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Text could not be parsed; `offset` is the byte position of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_ = 0;
};

// Runtime evaluation failure (division by zero, unbound variable).
class EvalError : public Error {
 public:
  using Error::Error;
};

// File / stream problems.
class IoError : public Error {
 public:
  using Error::Error;
};

// Central numeric tolerances. Everything tolerance-driven in the library
// routes through these constants.
namespace tol {
inline constexpr double feasibility = 1e-9;   // LP primal/dual feasibility
inline constexpr double optimality = 1e-9;    // LP reduced-cost threshold
inline constexpr double report_gap = 1e-7;    // primal/dual agreement in reports
inline constexpr double weight_sum = 1e-12;   // marginal weights sum to 1
inline constexpr double measure_sum = 1e-10;  // lattice measure normalization
inline constexpr double atom_merge = 1e-10;   // atoms closer than this merge
inline constexpr double mean_match = 1e-9;    // martingale mean agreement
inline constexpr double ray_drift = 1e-12;    // ray * drift positivity cutoff
inline constexpr double convexity = 1e-12;    // second-difference slack
}  // namespace tol

}  // namespace superhedge
