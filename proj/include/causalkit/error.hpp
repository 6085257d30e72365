#pragma once

#include <stdexcept>
#include <string>

namespace causalkit {

/// Base of every error the library throws. All of them mean "the input
/// does not satisfy a precondition"; failing checks are reported through
/// CheckReport instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two objects that must live over the same coordinate space do not.
class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class CyclicGraph : public Error {
 public:
  using Error::Error;
};

/// A conditioning atom has probability zero.
class NullAtom : public Error {
 public:
  using Error::Error;
};

class NotSurjective : public Error {
 public:
  using Error::Error;
};

/// A kernel is not constant on a fiber where the construction needs it to be.
class WellDefinednessViolation : public Error {
 public:
  WellDefinednessViolation(const std::string& message, std::string omega, std::string omega_other)
      : Error(message + ": omega=" + omega + " omega'=" + omega_other),
        omega_(std::move(omega)),
        omega_other_(std::move(omega_other)) {}

  const std::string& omega() const { return omega_; }
  const std::string& omega_other() const { return omega_other_; }

 private:
  std::string omega_;
  std::string omega_other_;
};

class SingularConditioning : public Error {
 public:
  using Error::Error;
};

}  // namespace causalkit
