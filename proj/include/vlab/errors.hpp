#pragma once

#include <stdexcept>
#include <string>

namespace vlab {

/// Invalid input shape, range or precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of a closed form (e.g. Hardy in d < 3).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A constructive step found an empty feasible set.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection sampling ran out of its draw budget.
class SamplingExhausted : public std::runtime_error {
 public:
  SamplingExhausted(const std::string& what, long accepted, long draws)
      : std::runtime_error(what), accepted_(accepted), draws_(draws) {}
  long accepted() const noexcept { return accepted_; }
  long draws() const noexcept { return draws_; }

 private:
  long accepted_;
  long draws_;
};

/// The grid cannot resolve the requested potential.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No sign change inside the search bracket.
class BracketingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Log-log fit impossible (sign change or empty window).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vlab
