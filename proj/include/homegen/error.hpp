#pragma once

#include <stdexcept>
#include <string>

namespace homegen {

/// Base class for every failure the engine raises on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text or file content (JSON, OBJ, fixtures, ...).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

/// Data that parses but breaks a structural invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Filesystem failures.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

/// Remote chat-completion endpoint failures (network, missing fixture).
class ServiceError : public Error {
 public:
  explicit ServiceError(const std::string& what) : Error(what) {}
};

/// A geometric request with no feasible answer (no free corner, an
/// unsatisfiable adjacency, ...).
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(what) {}
};

}  // namespace homegen
