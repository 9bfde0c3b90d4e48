#pragma once

#include <stdexcept>
#include <string>

namespace bosegas {

// Exit-code classes used by the CLI: config/domain -> 2, resource -> 3,
// numeric and invariant failures -> 1.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physically inadmissible input, e.g. a potential past its first resonance.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A kernel element was requested that was never computed.
class LookupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A verified inequality or identity failed.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bosegas
