#pragma once

#include <stdexcept>
#include <string>

namespace netident {

enum class ModelErrorKind {
  Schema,
  SelfLoop,
  ImproperTransfer,
  UnstableTransfer,
  StrictlyProperFlag,
};

/// Raised when a model document is malformed or violates a model-set invariant.
class ModelError : public std::runtime_error {
 public:
  ModelError(ModelErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ModelErrorKind kind() const noexcept { return kind_; }

 private:
  ModelErrorKind kind_;
};

/// Raised for an output/target selection that does not name unknown modules of one row.
class QueryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// I - G(z) (or a sub-block of it) is numerically singular at the requested point.
class SingularPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netident
