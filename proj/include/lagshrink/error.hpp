#pragma once

#include <stdexcept>
#include <string>

namespace lagshrink {

enum class ErrorKind {
  InputDomain,      // argument outside the documented domain
  NoSolution,       // well-formed request with no admissible answer
  NonConvergence,   // iteration budget exhausted
  NumericFailure,   // step underflow, degenerate geometry, bracket loss
  DegenerateRadius, // |A| or |B| too small for a polar representation
  SymmetryNotFound,
  NotAShrinker,
  Format,           // malformed file or JSON document
};

inline const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::InputDomain: return "input-domain";
  case ErrorKind::NoSolution: return "no-solution";
  case ErrorKind::NonConvergence: return "non-convergence";
  case ErrorKind::NumericFailure: return "numeric-failure";
  case ErrorKind::DegenerateRadius: return "degenerate-radius";
  case ErrorKind::SymmetryNotFound: return "symmetry-not-found";
  case ErrorKind::NotAShrinker: return "not-a-shrinker";
  case ErrorKind::Format: return "format";
  }
  return "unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string &what) {
  if (!ok)
    fail(kind, what);
}

} // namespace lagshrink
