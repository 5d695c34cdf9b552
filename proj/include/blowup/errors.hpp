#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

/// Base for every error raised by the toolkit. The CLI maps subclasses onto
/// exit codes, so new error kinds must derive from one of the two groups below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: parameters, geometry, or problem specifications.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to deliver a result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public InputError {
 public:
  using InputError::InputError;
};

class GeometryError : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateConfiguration : public InputError {
 public:
  using InputError::InputError;
};

class InvalidScaling : public InputError {
 public:
  using InputError::InputError;
};

class CertificationError : public InputError {
 public:
  using InputError::InputError;
};

class NearSingularity : public InputError {
 public:
  using InputError::InputError;
};

class SpecError : public InputError {
 public:
  SpecError(const std::string& field_path, const std::string& what)
      : InputError(field_path + ": " + what), path_(field_path) {}
  const std::string& field_path() const noexcept { return path_; }

 private:
  std::string path_;
};

class NotIntegrable : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotCoercive : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class FitDegenerate : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SpectralDegeneracy : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ContinuationOutOfRange : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StiffnessError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace blowup
