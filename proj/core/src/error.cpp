#include "cassi/error.hpp"

namespace cassi {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::MaskDegenerate: return "MaskDegenerate";
    case ErrorKind::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::CropTooLarge: return "CropTooLarge";
    case ErrorKind::NegativeMeasurement: return "NegativeMeasurement";
    case ErrorKind::Diverged: return "Diverged";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

MaskDegenerateError::MaskDegenerateError(std::size_t row, std::size_t col)
    : Error(ErrorKind::MaskDegenerate,
            "detector pixel (" + std::to_string(row) + ", " + std::to_string(col) +
                ") receives no mask energy in any band"),
      row_(row),
      col_(col) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace cassi
