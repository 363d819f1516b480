#pragma once

#include <stdexcept>
#include <string>

namespace aforge {

// Parameters outside the constructible range (bad mode/lambda combination,
// malformed config, non-increasing ladder, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A principal-branch intermediate landed on (or ambiguously near) the cut,
// or a lemma hypothesis on the parameters is violated at the requested radius.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// The two-piece log-sum combination is too ill-conditioned to evaluate
// (|A + B| below the conditioning floor relative to |A| + |B|).
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

// A drift-field linear solve had a (near-)singular matrix and no usable
// fallback.
struct SingularSystemError : std::runtime_error {
  explicit SingularSystemError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Evaluation requested outside the assembled region of the plane.
struct OutOfDomainError : std::runtime_error {
  explicit OutOfDomainError(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace aforge
