#pragma once

#include <stdexcept>
#include <string>

namespace hz {

/// Input outside the domain of a formula (|z| >= 1, degenerate geodesic, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NotHyperbolicError : public DomainError {
 public:
  NotHyperbolicError(const std::string& what, std::string kind)
      : DomainError(what), classification(std::move(kind)) {}
  std::string classification;  // "elliptic" or "parabolic"
};

class PoleError : public DomainError {
 public:
  PoleError(const std::string& what, double location, int order)
      : DomainError(what), location(location), order(order) {}
  double location;
  int order;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Markov partition or coding table violates its contract.
class CodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Config file failed validation; `path` names the offending field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& msg)
      : std::runtime_error(path + ": " + msg), path(std::move(path)) {}
  std::string path;
};

}  // namespace hz
