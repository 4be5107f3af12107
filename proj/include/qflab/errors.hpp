#pragma once

#include <stdexcept>
#include <string>

namespace qflab {

enum class ErrorKind {
  CapExceeded,
  DependentBasis,
  DependentVectors,
  AsymmetricForm,
  TooManyForms,
  EmptyLevelSet,
  EmptyAtom,
  NegativeDiagonal,
  DegenerateContext,
  UnknownExperiment,
  InvalidArgument,
  ConfigError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qflab
