#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "cassi/error.hpp"
#include "cassi/tensor.hpp"

namespace cassi::cli {

// CubeFile layout, all integers little-endian:
//   0  char[4]  magic "HSIC"
//   4  u16      format version (1)
//   6  u8       dtype (0 = f32 LE, 1 = f64 LE)
//   7  u8       reserved, 0
//   8  u32      H
//  12  u32      W
//  16  u32      C
//  20  payload  H*W*C values, band-major, row-major within a band
// Masks and measurements are stored with C = 1 (measurements with W = W').

enum class DType : std::uint8_t { F32 = 0, F64 = 1 };

inline constexpr std::uint16_t kCubeFormatVersion = 1;
inline constexpr std::size_t kCubeHeaderBytes = 20;

DType parse_dtype(std::string_view name);

/// Malformed container; carries the byte offset where decoding stopped.
class FormatError : public Error {
 public:
  FormatError(std::size_t offset, const std::string& what);

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

struct CubeFile {
  DType dtype = DType::F64;
  Grid grid;
};

std::vector<std::uint8_t> encode_cube(const Grid& grid, DType dtype);
CubeFile decode_cube(std::span<const std::uint8_t> bytes);

CubeFile read_cube_file(const std::filesystem::path& path);
void write_cube_file(const std::filesystem::path& path, const Grid& grid, DType dtype);

/// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace cassi::cli
