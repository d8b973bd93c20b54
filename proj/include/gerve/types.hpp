#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gerve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// N x d sample matrices are row-major so that each point is contiguous.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Bad arguments, malformed files, dimension mismatches. CLI exit code 1.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical breakdown (non-finite objective, degenerate geometry). CLI exit code 2.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Total mixture density at a point is zero or not finite.
class DegeneratePoint : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

// Every kernel weight in a mean-shift step underflowed.
class StalledPoint : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class InsufficientMatches : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class DegenerateEllipse : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

}  // namespace gerve
