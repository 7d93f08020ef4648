#include "cassi/cli/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cassi/error.hpp"

namespace cassi::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::size_t line, std::string_view key, std::string_view value) {
  fail(ErrorKind::InvalidArgument, "config line " + std::to_string(line) + ": invalid value '" +
                                       std::string(value) + "' for '" + std::string(key) + "'");
}

template <class T>
T parse_number(std::size_t line, std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(line, key, value);
  return out;
}

bool parse_bool(std::size_t line, std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(line, key, value);
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::InvalidArgument,
           "config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::size_t n = line_no;

    if (key == "bands") cfg.bands = parse_number<std::size_t>(n, key, value);
    else if (key == "shift_step") cfg.shift_step = parse_number<std::size_t>(n, key, value);
    else if (key == "method") cfg.method = std::string(value);
    else if (key == "iterations") cfg.iterations = parse_number<std::size_t>(n, key, value);
    else if (key == "tv_weight") cfg.tv_weight = parse_number<double>(n, key, value);
    else if (key == "tv_inner_iterations")
      cfg.tv_inner_iterations = parse_number<std::size_t>(n, key, value);
    else if (key == "init") cfg.init = std::string(value);
    else if (key == "crop_denoiser_input") cfg.crop_denoiser_input = parse_bool(n, key, value);
    else if (key == "convergence_tol") cfg.convergence_tol = parse_number<double>(n, key, value);
    else if (key == "shot_bits") cfg.shot_bits = parse_number<unsigned>(n, key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(n, key, value);
    else if (key == "full_scale") cfg.full_scale = parse_number<double>(n, key, value);
    else if (key == "dtype") cfg.dtype = std::string(value);
    else {
      fail(ErrorKind::InvalidArgument,
           "config line " + std::to_string(n) + ": unknown key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::string format_key_values(const KeyValues& entries) {
  std::string out;
  for (const auto& [k, v] : entries) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

}  // namespace cassi::cli
