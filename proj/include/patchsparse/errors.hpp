#pragma once

#include <stdexcept>
#include <string>

namespace patchsparse {

/// Inconsistent sizes between signals, dictionaries and supports.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dictionary constructor could not produce a valid dictionary.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A support set whose atoms are linearly dependent.
class NonMinimalSupport : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive computation would exceed its enumeration guard.
class CombinatorialExplosion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double gap)
      : std::runtime_error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

/// A function evaluated outside the set where it is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The operation does not apply to this kind of input.
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A support sequence with an empty kernel was used where a signal is needed.
class UnrealizableSupport : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An experiment configuration failed validation.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace patchsparse
