#pragma once

#include <stdexcept>
#include <string>

namespace aniso {

/// Failure categories; the CLI maps each to a distinct exit code.
enum class ErrorKind {
  parameter,   // violated precondition on an input value
  domain,      // evaluation point outside the operation's domain
  quadrature,  // non-convergent integration or eigen-solve
  bracket,     // root/bisection bracket without a sign change
  regime,      // parameters outside the supported regime (e.g. c != n)
  config,      // unparsable or invalid run configuration
  io,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& w) : Error(ErrorKind::parameter, w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};
struct QuadratureError : Error {
  explicit QuadratureError(const std::string& w) : Error(ErrorKind::quadrature, w) {}
};
struct BracketError : Error {
  explicit BracketError(const std::string& w) : Error(ErrorKind::bracket, w) {}
};
struct RegimeError : Error {
  explicit RegimeError(const std::string& w) : Error(ErrorKind::regime, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};

}  // namespace aniso
