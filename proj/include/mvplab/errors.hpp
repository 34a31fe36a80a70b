#pragma once

#include <stdexcept>
#include <string>

namespace mvplab {

/// Bad parameters or a malformed model (CLI exit status 2).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Well-formed input on which the requested quantity is undefined,
/// e.g. no suboptimal actions or an unreachable conditioning state (exit 3).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Policy enumeration would exceed the configured cap.
struct EnumerationTooLarge : DomainError {
  using DomainError::DomainError;
};

/// File access or parse failure (exit 1).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mvplab
