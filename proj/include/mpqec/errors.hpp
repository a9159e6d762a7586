#pragma once

#include <stdexcept>
#include <string>

namespace mpqec {

// Base for every failure raised by the library. kind() is a stable tag used by
// the CLI to pick exit codes and by tests to match error categories.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define MPQEC_ERROR(Name)                                              \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  }

MPQEC_ERROR(InvalidInput);
MPQEC_ERROR(DimensionTooLarge);
MPQEC_ERROR(ShapeError);
MPQEC_ERROR(NumericalFailure);
MPQEC_ERROR(GaugeFailure);
MPQEC_ERROR(HnlsViolated);
MPQEC_ERROR(OptimizerStalled);
MPQEC_ERROR(ConstraintInfeasible);
MPQEC_ERROR(WSetTooLarge);
MPQEC_ERROR(OrthogonalityViolated);
MPQEC_ERROR(CholeskyFailure);
MPQEC_ERROR(PositivityLost);
MPQEC_ERROR(IllConditioned);

#undef MPQEC_ERROR

}  // namespace mpqec
