#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cassi {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NonFiniteValue,
  IndexOutOfRange,
  MaskDegenerate,
  InstanceTooLarge,
  NumericalFailure,
  CropTooLarge,
  NegativeMeasurement,
  Diverged,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by build_operator when a detector pixel collects no mask energy.
class MaskDegenerateError : public Error {
 public:
  MaskDegenerateError(std::size_t row, std::size_t col);

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace cassi
