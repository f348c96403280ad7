#pragma once

#include <stdexcept>
#include <string>

namespace repsim {

// Error categories map 1:1 onto CLI exit codes (see tools/):
//   validation_error -> 2, io_error/parse_error -> 3, degenerate_error -> 4.

/// Violated precondition or inconsistent inputs (shape mismatch, non-finite
/// entries, bad parameter values).
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File system failures: missing files, unreadable/unwritable paths.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed file contents. Message names the offending byte or line.
class parse_error : public io_error {
 public:
  explicit parse_error(const std::string& msg) : io_error(msg) {}
};

/// Numerically degenerate data: zero/constant representations, all-identical
/// rows (RBF bandwidth undefined), empty spectra.
class degenerate_error : public std::runtime_error {
 public:
  explicit degenerate_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace repsim
