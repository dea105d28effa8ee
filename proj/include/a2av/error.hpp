#pragma once

#include <stdexcept>
#include <string>

namespace a2av {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid plan construction or plan invariant violation.
class PlanError : public Error {
 public:
  using Error::Error;
};

/// Misuse of the point-to-point transport (bad peer, truncation, ...).
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Simulator failure: deadlock, livelock, or inconsistent event state.
class SimError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration (unknown schedule name, bad grid factorization, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace a2av
