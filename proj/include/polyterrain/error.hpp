#pragma once

#include <stdexcept>
#include <string>

namespace polyterrain {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data that cannot be used: missing files, malformed manifests,
// mismatched dimensions. `subject` names the offending path or field.
class InputError : public Error {
 public:
  enum class Kind { kMissingFile, kMalformed, kDimensionMismatch, kIo };

  InputError(Kind kind, std::string subject, const std::string& what)
      : Error(what + ": " + subject), kind_(kind), subject_(std::move(subject)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  Kind kind_;
  std::string subject_;
};

// A caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// The polygon handed to the partitioner intersects itself.
class NonSimplePolygon : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

// A contour projected into a plane frame has no area.
class DegenerateProjection : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

// An empty mask was given where a region was expected.
class EmptyRegion : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

}  // namespace polyterrain
