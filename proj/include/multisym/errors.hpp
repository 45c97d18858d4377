#pragma once

#include <stdexcept>
#include <string>

namespace multisym {

struct MissingGradient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChartMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegreeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CFLViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteField : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NewtonDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularJacobian : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotAlgebraicError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroR : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SliceOutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct ProjectionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace multisym
