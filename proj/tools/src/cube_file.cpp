#include "cassi/cli/cube_file.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include <unistd.h>

namespace cassi::cli {
namespace {

constexpr char kMagic[4] = {'H', 'S', 'I', 'C'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[offset + i]) << (8 * i);
  return v;
}

}  // namespace

DType parse_dtype(std::string_view name) {
  if (name == "f32") return DType::F32;
  if (name == "f64") return DType::F64;
  fail(ErrorKind::InvalidArgument, "dtype must be f32 or f64");
}

FormatError::FormatError(std::size_t offset, const std::string& what)
    : Error(ErrorKind::InvalidArgument, "malformed cube file at byte offset " +
                                            std::to_string(offset) + ": " + what),
      offset_(offset) {}

std::vector<std::uint8_t> encode_cube(const Grid& grid, DType dtype) {
  constexpr std::uint64_t kMaxDim = std::numeric_limits<std::uint32_t>::max();
  if (grid.rows() > kMaxDim || grid.cols() > kMaxDim || grid.bands() > kMaxDim) {
    fail(ErrorKind::InvalidArgument, "cube dimension does not fit in 32 bits");
  }
  const std::size_t width = dtype == DType::F32 ? 4 : 8;
  std::vector<std::uint8_t> out;
  out.reserve(kCubeHeaderBytes + grid.size() * width);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le(out, kCubeFormatVersion, 2);
  out.push_back(static_cast<std::uint8_t>(dtype));
  out.push_back(0);
  put_le(out, grid.rows(), 4);
  put_le(out, grid.cols(), 4);
  put_le(out, grid.bands(), 4);
  for (double v : grid.values()) {
    if (dtype == DType::F32) {
      put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4);
    } else {
      put_le(out, std::bit_cast<std::uint64_t>(v), 8);
    }
  }
  return out;
}

CubeFile decode_cube(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kCubeHeaderBytes) {
    throw FormatError(bytes.size(), "truncated header (" + std::to_string(bytes.size()) +
                                        " of " + std::to_string(kCubeHeaderBytes) + " bytes)");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != static_cast<std::uint8_t>(kMagic[i])) throw FormatError(i, "bad magic");
  }
  const auto version = get_le(bytes, 4, 2);
  if (version != kCubeFormatVersion) {
    throw FormatError(4, "unsupported format version " + std::to_string(version));
  }
  const auto code = bytes[6];
  if (code > 1) throw FormatError(6, "unknown dtype code " + std::to_string(code));
  if (bytes[7] != 0) throw FormatError(7, "reserved byte must be zero");

  const std::size_t h = get_le(bytes, 8, 4);
  const std::size_t w = get_le(bytes, 12, 4);
  const std::size_t c = get_le(bytes, 16, 4);
  if (h == 0) throw FormatError(8, "zero height");
  if (w == 0) throw FormatError(12, "zero width");
  if (c == 0) throw FormatError(16, "zero band count");

  CubeFile file;
  file.dtype = static_cast<DType>(code);
  const std::size_t width = file.dtype == DType::F32 ? 4 : 8;
  const std::size_t max_count = (std::numeric_limits<std::size_t>::max() - kCubeHeaderBytes) / 8;
  if (h > max_count / w || h * w > max_count / c) {
    throw FormatError(8, "dimensions overflow the addressable size");
  }
  const std::size_t count = h * w * c;
  const std::size_t expected = kCubeHeaderBytes + count * width;
  if (bytes.size() < expected) {
    throw FormatError(bytes.size(), "truncated payload, expected " + std::to_string(expected) +
                                        " bytes in total");
  }
  if (bytes.size() > expected) throw FormatError(expected, "trailing bytes after payload");

  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = kCubeHeaderBytes + i * width;
    values[i] = file.dtype == DType::F32
                    ? static_cast<double>(
                          std::bit_cast<float>(static_cast<std::uint32_t>(get_le(bytes, at, 4))))
                    : std::bit_cast<double>(get_le(bytes, at, 8));
  }
  file.grid = Grid(h, w, c, std::move(values));
  return file;
}

CubeFile read_cube_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_cube(bytes);
}

void write_cube_file(const std::filesystem::path& path, const Grid& grid, DType dtype) {
  write_file_atomic(path, encode_cube(grid, dtype));
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::InvalidArgument, "cannot write '" + tmp.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::InvalidArgument, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::InvalidArgument, "cannot rename onto '" + path.string() + "'");
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span<const std::uint8_t>(
                              reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace cassi::cli
