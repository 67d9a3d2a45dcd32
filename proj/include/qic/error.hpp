#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid construction parameters: qubit counts, block sizes, settings.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// A call whose arguments do not fit together (dimension mismatch, missing angle).
class UsageError : public Error {
  public:
    using Error::Error;
};

/// Malformed compressed stream or image file.
class FormatError : public Error {
  public:
    FormatError(const std::string &what, std::size_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_;
};

/// Raised by the Taylor estimator when the gradient is too small to invert.
class DegenerateGradient : public Error {
  public:
    using Error::Error;
};

} // namespace qic
