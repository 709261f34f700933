#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subriemann {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::string expected, const std::string& source)
      : Error("syntax error at offset " + std::to_string(offset) + ": expected " + expected +
              " in '" + source + "'"),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class UnknownVariable : public Error {
 public:
  UnknownVariable(std::string name, std::size_t offset)
      : Error("unknown variable '" + name + "' at offset " + std::to_string(offset)),
        name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Evaluation left the real domain of an operation (division by zero, sqrt or log of a
/// non-positive number, fractional power of a non-positive base).
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularFrame : public Error {
 public:
  using Error::Error;
};

class GradingViolation : public Error {
 public:
  using Error::Error;
};

class JacobiViolation : public Error {
 public:
  using Error::Error;
};

class NotHorizontal : public Error {
 public:
  using Error::Error;
};

class ZeroGradient : public Error {
 public:
  using Error::Error;
};

class NotOnSurface : public Error {
 public:
  using Error::Error;
};

class CharacteristicPoint : public Error {
 public:
  using Error::Error;
};

class ExtensionFailure : public Error {
 public:
  using Error::Error;
};

class NotCarnot : public Error {
 public:
  using Error::Error;
};

class NotTangent : public Error {
 public:
  using Error::Error;
};

class NewtonDivergence : public Error {
 public:
  using Error::Error;
};

class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class CharacteristicEncounter : public Error {
 public:
  CharacteristicEncounter(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class NearOrigin : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace subriemann
