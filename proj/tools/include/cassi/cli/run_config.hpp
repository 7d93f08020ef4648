#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cassi::cli {

/// Settings shared by simulate and reconstruct, loaded from a flat
/// `key = value` text file (`#` starts a comment). Every key is optional;
/// unknown keys are rejected. Command-line flags override file values.
///
/// Keys: bands, shift_step, method, iterations, tv_weight,
/// tv_inner_iterations, init, crop_denoiser_input, convergence_tol,
/// shot_bits, seed, full_scale, dtype.
struct RunConfig {
  std::optional<std::size_t> bands;
  std::optional<std::size_t> shift_step;
  std::optional<std::string> method;
  std::optional<std::size_t> iterations;
  std::optional<double> tv_weight;
  std::optional<std::size_t> tv_inner_iterations;
  std::optional<std::string> init;
  std::optional<bool> crop_denoiser_input;
  std::optional<double> convergence_tol;
  std::optional<unsigned> shot_bits;
  std::optional<std::uint64_t> seed;
  std::optional<double> full_scale;
  std::optional<std::string> dtype;
};

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// One `key=value` line per entry, in order.
std::string format_key_values(const KeyValues& entries);

}  // namespace cassi::cli
