#pragma once

#include <stdexcept>
#include <string>

namespace bm {

/// Evaluation on the critical hypersurface (x = 0) of a singular quantity.
class PoleError : public std::domain_error {
 public:
  explicit PoleError(const std::string& what) : std::domain_error(what) {}
};

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

class RankDeficientError : public std::runtime_error {
 public:
  explicit RankDeficientError(const std::string& what) : std::runtime_error(what) {}
};

/// A family of forms stopped being nondegenerate (sign change of the density).
class DegeneracyError : public std::runtime_error {
 public:
  explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

class StepSizeError : public std::runtime_error {
 public:
  explicit StepSizeError(const std::string& what) : std::runtime_error(what) {}
};

class ResolutionError : public std::invalid_argument {
 public:
  explicit ResolutionError(const std::string& what) : std::invalid_argument(what) {}
};

class MembershipError : public std::invalid_argument {
 public:
  explicit MembershipError(const std::string& what) : std::invalid_argument(what) {}
};

class SingularSystemError : public std::runtime_error {
 public:
  explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed scenario input. `field` names the offending JSON path when known.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace bm
