#include "cassi/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "cassi/cassi.hpp"
#include "cassi/cli/cube_file.hpp"
#include "cassi/cli/run_config.hpp"
#include "cassi/cli/suite.hpp"

namespace cassi::cli {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

template <class T>
T pick(const CLI::Option* flag, const T& flag_value, const std::optional<T>& file_value,
       const T& fallback) {
  if (flag->count() > 0) return flag_value;
  if (file_value) return *file_value;
  return fallback;
}

template <class T>
std::optional<T> pick(const CLI::Option* flag, const T& flag_value,
                      const std::optional<T>& file_value) {
  if (flag->count() > 0) return flag_value;
  return file_value;
}

RunConfig load_optional(const std::string& path) {
  return path.empty() ? RunConfig{} : load_run_config(path);
}

CodedAperture to_mask(const Grid& g, const std::string& path) {
  if (g.bands() != 1) {
    fail(ErrorKind::DimensionMismatch,
         "mask '" + path + "' must have C = 1, got C = " + std::to_string(g.bands()));
  }
  return CodedAperture(g.rows(), g.cols(), g.storage());
}

std::size_t require_shift(const CLI::Option* flag, std::size_t flag_value, const RunConfig& rc) {
  const auto d = pick(flag, flag_value, rc.shift_step);
  if (!d) fail(ErrorKind::InvalidArgument, "--shift-step is required (flag or config file)");
  if (*d == 0) fail(ErrorKind::InvalidArgument, "--shift-step must be at least 1");
  return *d;
}

DType resolve_dtype(const CLI::Option* flag, const std::string& flag_value,
                    const std::optional<std::string>& file_value, DType fallback) {
  const auto name = pick(flag, flag_value, file_value);
  return name ? parse_dtype(*name) : fallback;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string cube, mask, out, config, dtype;
  std::size_t shift_step = 1;
  unsigned bits = 11;
  std::uint64_t seed = 0;
  double full_scale = 1.0;
  CLI::Option *o_shift = nullptr, *o_bits = nullptr, *o_seed = nullptr, *o_scale = nullptr,
              *o_dtype = nullptr;
};

int cmd_simulate(const SimulateArgs& a, std::ostream&) {
  const RunConfig rc = load_optional(a.config);
  const std::size_t d = require_shift(a.o_shift, a.shift_step, rc);
  const CubeFile cube_file = read_cube_file(a.cube);
  const CodedAperture mask = to_mask(read_cube_file(a.mask).grid, a.mask);
  const Grid& g = cube_file.grid;

  if (rc.bands && *rc.bands != g.bands()) {
    fail(ErrorKind::DimensionMismatch, "config bands = " + std::to_string(*rc.bands) +
                                           " but cube has C = " + std::to_string(g.bands()));
  }
  const SceneConfig sc = SceneConfig::make(g.rows(), g.cols(), g.bands(), d);
  const HSICube cube(sc, g.storage());
  validate(sc, cube);
  const SensingOperator op = build_operator(mask, sc);
  Measurement y = phi_apply(op, cube);

  if (const auto bits = pick(a.o_bits, a.bits, rc.shot_bits)) {
    NoiseSpec ns;
    ns.shot_bits = *bits;
    ns.seed = pick(a.o_seed, a.seed, rc.seed, std::uint64_t{0});
    ns.full_scale = pick(a.o_scale, a.full_scale, rc.full_scale);
    y = add_shot_noise(y, ns);
  }
  write_cube_file(a.out, y, resolve_dtype(a.o_dtype, a.dtype, rc.dtype, cube_file.dtype));
  return kExitOk;
}

// ------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::vector<std::string> meas, out, report;
  std::string mask, config, dtype, method, init;
  std::size_t shift_step = 1, bands = 1, iters = 60, tv_iters = 20;
  double tv_weight = 0.1, tol = 0.0;
  bool no_crop = false;
  CLI::Option *o_shift = nullptr, *o_bands = nullptr, *o_method = nullptr, *o_iters = nullptr,
              *o_tv_weight = nullptr, *o_tv_iters = nullptr, *o_init = nullptr,
              *o_no_crop = nullptr, *o_tol = nullptr, *o_dtype = nullptr;
};

struct Resolved {
  std::size_t shift_step;
  std::optional<std::size_t> bands;
  Method method;
  SolverConfig solver;
  std::optional<std::string> dtype;
};

Resolved resolve(const ReconstructArgs& a, const RunConfig& rc) {
  Resolved r;
  r.shift_step = require_shift(a.o_shift, a.shift_step, rc);
  r.bands = pick(a.o_bands, a.bands, rc.bands);
  const auto method = pick(a.o_method, a.method, rc.method);
  if (!method) fail(ErrorKind::InvalidArgument, "--method is required (flag or config file)");
  r.method = parse_method(*method);

  const SolverConfig defaults;
  r.solver.iterations = pick(a.o_iters, a.iters, rc.iterations, defaults.iterations);
  r.solver.tv_weight = pick(a.o_tv_weight, a.tv_weight, rc.tv_weight, defaults.tv_weight);
  r.solver.tv_inner_iterations =
      pick(a.o_tv_iters, a.tv_iters, rc.tv_inner_iterations, defaults.tv_inner_iterations);
  const auto init = pick(a.o_init, a.init, rc.init);
  r.solver.init = init ? parse_init_strategy(*init) : defaults.init;
  r.solver.crop_denoiser_input =
      pick(a.o_no_crop, !a.no_crop, rc.crop_denoiser_input, defaults.crop_denoiser_input);
  r.solver.convergence_tol = pick(a.o_tol, a.tol, rc.convergence_tol, defaults.convergence_tol);
  r.solver.check();
  r.dtype = pick(a.o_dtype, a.dtype, rc.dtype);
  if (r.dtype) parse_dtype(*r.dtype);
  return r;
}

SceneConfig derive_geometry(const Grid& meas, const CodedAperture& mask, const Resolved& r,
                            const std::string& path) {
  if (meas.bands() != 1) {
    fail(ErrorKind::DimensionMismatch,
         "measurement '" + path + "' must have C = 1, got C = " + std::to_string(meas.bands()));
  }
  if (meas.rows() != mask.height()) {
    fail(ErrorKind::DimensionMismatch, "measurement height " + std::to_string(meas.rows()) +
                                           " differs from mask height " +
                                           std::to_string(mask.height()));
  }
  const std::size_t d = r.shift_step;
  if (meas.cols() < mask.width() || (meas.cols() - mask.width()) % d != 0) {
    fail(ErrorKind::DimensionMismatch,
         "measurement width " + std::to_string(meas.cols()) + " is not mask width " +
             std::to_string(mask.width()) + " plus a multiple of shift step " + std::to_string(d));
  }
  const std::size_t c = (meas.cols() - mask.width()) / d + 1;
  if (r.bands && *r.bands != c) {
    fail(ErrorKind::DimensionMismatch, "bands = " + std::to_string(*r.bands) +
                                           " but the measurement width implies C = " +
                                           std::to_string(c));
  }
  return SceneConfig::make(mask.height(), mask.width(), c, d);
}

std::string reconstruct_one(const Resolved& r, const CodedAperture& mask,
                            const std::string& mask_path, const std::string& meas_path,
                            const std::string& out_path) {
  const CubeFile mf = read_cube_file(meas_path);
  const SceneConfig sc = derive_geometry(mf.grid, mask, r, meas_path);
  const SensingOperator op = build_operator(mask, sc);
  const Measurement y(sc, mf.grid.storage());
  validate(sc, y);
  const DType dtype = r.dtype ? parse_dtype(*r.dtype) : mf.dtype;

  const auto start = Clock::now();
  SolveTrace trace;
  const HSICube x = run_method(r.method, op, y, r.solver, &trace);
  const double wall = elapsed_ms(start);

  const Measurement fx = phi_apply(op, x);
  double l2 = 0.0, linf = 0.0, yinf = 0.0;
  for (std::size_t i = 0; i < fx.size(); ++i) {
    const double e = fx.values()[i] - y.values()[i];
    l2 += e * e;
    linf = std::max(linf, std::fabs(e));
    yinf = std::max(yinf, std::fabs(y.values()[i]));
  }
  write_cube_file(out_path, x, dtype);

  const SolverConfig& s = r.solver;
  const KeyValues kv = {
      {"command", "reconstruct"},
      {"meas", meas_path},
      {"mask", mask_path},
      {"out", out_path},
      {"method", std::string(to_string(r.method))},
      {"height", std::to_string(sc.height)},
      {"width", std::to_string(sc.width)},
      {"bands", std::to_string(sc.bands)},
      {"shift_step", std::to_string(sc.shift_step)},
      {"iterations", std::to_string(s.iterations)},
      {"tv_weight", format_double(s.tv_weight)},
      {"tv_inner_iterations", std::to_string(s.tv_inner_iterations)},
      {"init", std::string(to_string(s.init))},
      {"crop_denoiser_input", s.crop_denoiser_input ? "true" : "false"},
      {"convergence_tol", format_double(s.convergence_tol)},
      {"dtype", dtype == DType::F32 ? "f32" : "f64"},
      {"iterations_run", std::to_string(trace.iterations)},
      {"residual_l2", format_double(std::sqrt(l2))},
      {"residual_inf", format_double(linf)},
      {"residual_rel_inf", format_double(yinf > 0.0 ? linf / yinf : linf)},
      {"wall_time_ms", fixed(wall, 3)},
  };
  return format_key_values(kv);
}

int cmd_reconstruct(const ReconstructArgs& a, std::ostream&) {
  if (a.meas.size() != a.out.size()) {
    fail(ErrorKind::InvalidArgument, "--meas and --out must be given the same number of times");
  }
  if (!a.report.empty() && a.report.size() != a.meas.size()) {
    fail(ErrorKind::InvalidArgument, "--report must be omitted or given once per --meas");
  }
  const Resolved r = resolve(a, load_optional(a.config));
  const CodedAperture mask = to_mask(read_cube_file(a.mask).grid, a.mask);

  // Batch inputs are independent; each worker owns its files.
  std::vector<std::string> reports(a.meas.size());
  parallel_for(a.meas.size(), [&](std::size_t i) {
    reports[i] = reconstruct_one(r, mask, a.mask, a.meas[i], a.out[i]);
  });
  for (std::size_t i = 0; i < a.report.size(); ++i) write_file_atomic(a.report[i], reports[i]);
  return kExitOk;
}

// ----------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string ref, test, format = "json";
};

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  const Grid ref = read_cube_file(a.ref).grid;
  const Grid test = read_cube_file(a.test).grid;
  const MetricReport m = evaluate(ref, test);
  if (a.format == "csv") {
    out << "scope,psnr_db,ssim,mse\n";
    for (std::size_t b = 0; b < m.per_band_psnr.size(); ++b) {
      out << b << ',' << format_double(m.per_band_psnr[b]) << ','
          << format_double(m.per_band_ssim[b]) << ',' << format_double(m.per_band_mse[b]) << '\n';
    }
    out << "mean," << format_double(m.psnr_db) << ',' << format_double(m.ssim) << ','
        << format_double(m.mse) << '\n';
    return kExitOk;
  }
  nlohmann::ordered_json j;
  j["psnr_db"] = m.psnr_db;
  j["ssim"] = m.ssim;
  j["mse"] = m.mse;
  j["per_band"] = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < m.per_band_psnr.size(); ++b) {
    j["per_band"].push_back(
        {{"band", b}, {"psnr_db", m.per_band_psnr[b]}, {"ssim", m.per_band_ssim[b]},
         {"mse", m.per_band_mse[b]}});
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ------------------------------------------------------------ oracle-check

struct OracleArgs {
  std::size_t height = 4, width = 4, bands = 3, shift_step = 1;
  std::uint64_t seed = 0;
  double density = 0.7;
  double tolerance = 1e-10;
  bool corrupt_sigma = false;
};

double rel_error(std::span<const double> got, std::span<const double> want) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) {
    diff += (got[i] - want[i]) * (got[i] - want[i]);
    norm += want[i] * want[i];
  }
  return norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
}

int cmd_oracle_check(const OracleArgs& a, std::ostream& out, std::ostream& err) {
  const SceneConfig sc = SceneConfig::make(a.height, a.width, a.bands, a.shift_step);
  const CodedAperture mask = ensure_full_rank(gen_mask(a.height, a.width, a.density, a.seed), sc);
  SensingOperator op = build_operator(mask, sc);

  const oracle::DenseMatrix phi = oracle::build_dense(op);
  const oracle::DenseMatrix pinv = oracle::dense_pinv(phi);
  const oracle::DenseMatrix proj = oracle::multiply(pinv, phi);
  if (a.corrupt_sigma) op = op.with_perturbed_sigma(0, 0, 1.5);

  Rng rng = Rng::for_counter(a.seed, 0x0AC1E);
  auto random_cube = [&] {
    HSICube c(sc);
    for (double& v : c.values()) v = rng.uniform();
    return c;
  };
  const HSICube x = random_cube();
  const HSICube q = random_cube();
  Measurement y(sc);
  for (double& v : y.values()) v = rng.uniform();

  const auto xv = oracle::vectorize(x);
  const auto qv = oracle::vectorize(q);
  const auto yv = oracle::vectorize(y);
  const auto px = oracle::dense_apply(proj, xv);
  const auto pq = oracle::dense_apply(proj, qv);
  const auto pinv_y = oracle::dense_apply(pinv, yv);
  std::vector<double> null_x(xv.size()), rnd(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    null_x[i] = xv[i] - px[i];
    rnd[i] = pinv_y[i] + qv[i] - pq[i];
  }

  const std::vector<std::pair<std::string, double>> checks = {
      {"phi_apply", rel_error(oracle::vectorize(phi_apply(op, x)), oracle::dense_apply(phi, xv))},
      {"phi_t_apply",
       rel_error(oracle::vectorize(phi_t_apply(op, y)),
                 oracle::dense_apply(oracle::transpose(phi), yv))},
      {"pinv_apply", rel_error(oracle::vectorize(pinv_apply(op, y)), pinv_y)},
      {"range_project", rel_error(oracle::vectorize(range_project(op, x)), px)},
      {"null_project", rel_error(oracle::vectorize(null_project(op, x)), null_x)},
      {"rnd_combine", rel_error(oracle::vectorize(rnd_combine(op, y, q)), rnd)},
  };

  out << "operation,relative_error,status\n";
  bool ok = true;
  for (const auto& [name, e] : checks) {
    const bool pass = std::isfinite(e) && e <= a.tolerance;
    ok = ok && pass;
    out << name << ',' << format_double(e) << ',' << (pass ? "ok" : "FAIL") << '\n';
    if (!pass) err << "oracle mismatch in " << name << ": relative error " << format_double(e)
                   << " exceeds " << format_double(a.tolerance) << '\n';
  }
  return ok ? kExitOk : kExitOracleBreach;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  std::size_t height = 256, width = 256, bands = 28, shift_step = 2, reps = 10;
  std::uint64_t seed = 0;
};

struct Timing {
  double median = 0.0, p95 = 0.0;
};

Timing summarize(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  Timing t;
  t.median = n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  t.p95 = samples[std::max<std::size_t>(rank, 1) - 1];
  return t;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.reps == 0) fail(ErrorKind::InvalidArgument, "--reps must be at least 1");
  const SceneConfig sc = SceneConfig::make(a.height, a.width, a.bands, a.shift_step);
  const CodedAperture mask = ensure_full_rank(gen_mask(a.height, a.width, 0.5, a.seed), sc);
  const SensingOperator op = build_operator(mask, sc);

  Rng rng = Rng::for_counter(a.seed, 0xBE7C);
  HSICube x(sc);
  for (double& v : x.values()) v = rng.uniform();
  const Measurement y = phi_apply(op, x);
  const HSICube zero(sc);

  const std::vector<std::pair<std::string, std::function<void()>>> kernels = {
      {"phi_apply", [&] { (void)phi_apply(op, x); }},
      {"pinv_apply", [&] { (void)pinv_apply(op, y); }},
      {"rnd_combine", [&] { (void)rnd_combine(op, y, zero); }},
  };

  out << (a.reps == 1 ? "operation,reps,time_ms\n" : "operation,reps,median_ms,p95_ms\n");
  for (const auto& [name, fn] : kernels) {
    std::vector<double> samples;
    for (std::size_t r = 0; r < a.reps; ++r) {
      const auto start = Clock::now();
      fn();
      samples.push_back(elapsed_ms(start));
    }
    out << name << ',' << a.reps;
    if (a.reps == 1) {
      out << ',' << fixed(samples[0], 3) << '\n';
    } else {
      const Timing t = summarize(samples);
      out << ',' << fixed(t.median, 3) << ',' << fixed(t.p95, 3) << '\n';
    }
  }

  const double n = static_cast<double>(sc.detector_size());
  const double cols = n * static_cast<double>(sc.bands);
  const std::size_t shifted = sc.detector_size() * sc.bands;
  const KeyValues mem = {
      {"operator_bytes", std::to_string(op.memory_bytes())},
      {"operator_mib", fixed(static_cast<double>(op.memory_bytes()) / (1024.0 * 1024.0), 2)},
      {"shifted_mask_bytes_f64", std::to_string(shifted * 8)},
      {"shifted_mask_bytes_f32", std::to_string(shifted * 4)},
      {"dense_phi_gib_f32", fixed(n * cols * 4.0 / (1024.0 * 1024.0 * 1024.0), 1)},
      {"dense_phi_gib_f64", fixed(n * cols * 8.0 / (1024.0 * 1024.0 * 1024.0), 1)},
  };
  out << '\n' << format_key_values(mem);
  return kExitOk;
}

// -------------------------------------------------------------------- mask

struct MaskGenArgs {
  std::size_t height = 0, width = 0, bands = 1, shift_step = 1;
  double density = 0.5;
  std::uint64_t seed = 0;
  bool full_rank = false;
  std::string out, dtype = "f64";
};

struct MaskCropArgs {
  std::string in, out, dtype;
  std::size_t size = 0, bands = 1, shift_step = 1;
  std::uint64_t seed = 0;
  bool full_rank = false;
  CLI::Option* o_dtype = nullptr;
};

CodedAperture maybe_full_rank(CodedAperture mask, bool full_rank, std::size_t bands,
                              std::size_t d) {
  if (!full_rank) return mask;
  return ensure_full_rank(mask, SceneConfig::make(mask.height(), mask.width(), bands, d));
}

int cmd_mask_gen(const MaskGenArgs& a, std::ostream&) {
  const DType dtype = parse_dtype(a.dtype);
  const CodedAperture m = maybe_full_rank(gen_mask(a.height, a.width, a.density, a.seed),
                                          a.full_rank, a.bands, a.shift_step);
  write_cube_file(a.out, m, dtype);
  return kExitOk;
}

int cmd_mask_crop(const MaskCropArgs& a, std::ostream&) {
  const CubeFile in = read_cube_file(a.in);
  const CodedAperture src = to_mask(in.grid, a.in);
  const DType dtype = a.o_dtype->count() > 0 ? parse_dtype(a.dtype) : in.dtype;
  const CodedAperture m =
      maybe_full_rank(crop_mask(src, a.size, a.seed), a.full_rank, a.bands, a.shift_step);
  write_cube_file(a.out, m, dtype);
  return kExitOk;
}

// ------------------------------------------------------------------- scene

struct SceneArgs {
  std::size_t height = 0, width = 0, bands = 0, complexity = 6;
  std::uint64_t seed = 0;
  std::string out, dtype = "f64";
};

int cmd_scene(const SceneArgs& a, std::ostream&) {
  const DType dtype = parse_dtype(a.dtype);
  const SceneConfig sc = SceneConfig::make(a.height, a.width, a.bands, 1);
  write_cube_file(a.out, gen_scene(sc, a.complexity, a.seed), dtype);
  return kExitOk;
}

// ------------------------------------------------------------------ export

struct ExportArgs {
  std::string in, out_dir, prefix = "band";
  bool normalize = false;
};

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const Grid g = read_cube_file(a.in).grid;
  std::filesystem::create_directories(a.out_dir);
  double scale = 1.0;
  if (a.normalize) {
    const double peak = *std::max_element(g.values().begin(), g.values().end());
    if (peak > 0.0) scale = 1.0 / peak;
  }
  for (std::size_t b = 0; b < g.bands(); ++b) {
    std::string header =
        "P5\n" + std::to_string(g.cols()) + " " + std::to_string(g.rows()) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    for (double v : g.band(b)) {
      const double c = std::clamp(v * scale, 0.0, 1.0);
      bytes.push_back(static_cast<std::uint8_t>(std::lround(c * 255.0)));
    }
    char name[32];
    std::snprintf(name, sizeof(name), "_%03zu.pgm", b);
    const std::filesystem::path path = std::filesystem::path(a.out_dir) / (a.prefix + name);
    write_file_atomic(path, bytes);
    out << path.string() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- ablation

struct AblationArgs {
  std::size_t height = 48, width = 48, bands = 16, shift_step = 2, scenes = 10, complexity = 6;
  double density = 0.5;
  std::uint64_t seed = 2023;
  std::size_t iters = 60, tv_iters = 20;
  double tv_weight = suite_solver_config().tv_weight;
  std::string mask;
  unsigned bits = 11;
  CLI::Option* o_bits = nullptr;
};

int cmd_ablation(const AblationArgs& a, std::ostream& out) {
  SuiteSpec spec;
  spec.config = SceneConfig::make(a.height, a.width, a.bands, a.shift_step);
  spec.scenes = a.scenes;
  spec.complexity = a.complexity;
  spec.mask_density = a.density;
  spec.seed = a.seed;
  if (a.o_bits->count() > 0) spec.noise = NoiseSpec{a.bits, a.seed, std::nullopt};
  std::optional<CodedAperture> mask;
  if (!a.mask.empty()) mask = to_mask(read_cube_file(a.mask).grid, a.mask);
  const Suite suite = make_suite(spec, mask);

  SolverConfig cfg = suite_solver_config();
  cfg.iterations = a.iters;
  cfg.tv_inner_iterations = a.tv_iters;
  cfg.tv_weight = a.tv_weight;
  cfg.check();

  out << "crop,init,rnd,mean_psnr_db,mean_ssim,mean_residual_rel_inf,"
         "denoised_pixels_per_iteration\n";
  for (const AblationRow& row : run_ablation(suite, cfg)) {
    out << (row.crop ? "true" : "false") << ',' << to_string(row.init) << ','
        << (row.rnd ? "true" : "false") << ',' << format_double(row.score.mean_psnr) << ','
        << format_double(row.score.mean_ssim) << ',' << format_double(row.score.mean_residual)
        << ',' << row.score.denoised_pixels_per_iteration << '\n';
  }
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MaskDegenerate: return kExitMaskDegenerate;
    case ErrorKind::Diverged: return kExitDiverged;
    default: return kExitUsage;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coded aperture snapshot spectral imaging toolkit", "cassi"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  std::vector<std::pair<CLI::App*, std::function<int()>>> commands;

  auto sim = std::make_shared<SimulateArgs>();
  {
    auto* c = app.add_subcommand("simulate", "Forward model: cube + mask -> measurement");
    c->add_option("--cube", sim->cube, "Input cube file (H x W x C)")->required();
    c->add_option("--mask", sim->mask, "Mask file (H x W x 1)")->required();
    c->add_option("--out", sim->out, "Output measurement file")->required();
    sim->o_shift = c->add_option("--shift-step", sim->shift_step, "Dispersion shift per band");
    sim->o_bits = c->add_option("--shot-noise-bits", sim->bits, "Enable shot noise at this bit depth");
    sim->o_seed = c->add_option("--seed", sim->seed, "Noise seed");
    sim->o_scale = c->add_option("--full-scale", sim->full_scale, "Signal level mapped to full scale");
    sim->o_dtype = c->add_option("--dtype", sim->dtype, "Output dtype f32|f64 (default: input's)");
    c->add_option("--config", sim->config, "Key-value config file; flags take precedence");
    commands.emplace_back(c, [sim, &out] { return cmd_simulate(*sim, out); });
  }

  auto rec = std::make_shared<ReconstructArgs>();
  {
    auto* c = app.add_subcommand("reconstruct", "Recover a cube from a measurement");
    c->add_option("--meas", rec->meas, "Measurement file(s); several are processed as a batch")
        ->required();
    c->add_option("--mask", rec->mask, "Mask file")->required();
    c->add_option("--out", rec->out, "Output cube file, one per --meas")->required();
    c->add_option("--report", rec->report, "Key-value report file, one per --meas");
    rec->o_shift = c->add_option("--shift-step", rec->shift_step, "Dispersion shift per band");
    rec->o_bands = c->add_option("--bands", rec->bands, "Expected band count (checked)");
    rec->o_method = c->add_option("--method", rec->method, "pinv | gap-tv | rnd-gap-tv");
    rec->o_iters = c->add_option("--iters", rec->iters, "GAP iterations (default 60)");
    rec->o_tv_weight = c->add_option("--tv-weight", rec->tv_weight, "TV strength (default 0.1)");
    rec->o_tv_iters = c->add_option("--tv-iters", rec->tv_iters, "Inner TV iterations (default 20)");
    rec->o_init = c->add_option("--init", rec->init, "shift | repeat | roll (default roll)");
    rec->o_no_crop = c->add_flag("--no-crop", rec->no_crop, "Denoise the full detector-width cube");
    rec->o_tol = c->add_option("--tol", rec->tol, "Relative-change stop tolerance (0 = off)");
    rec->o_dtype = c->add_option("--dtype", rec->dtype, "Output dtype f32|f64 (default: input's)");
    c->add_option("--config", rec->config, "Key-value config file; flags take precedence");
    commands.emplace_back(c, [rec, &out] { return cmd_reconstruct(*rec, out); });
  }

  auto met = std::make_shared<MetricsArgs>();
  {
    auto* c = app.add_subcommand("metrics", "PSNR / SSIM / MSE between two cubes");
    c->add_option("--ref", met->ref, "Reference cube")->required();
    c->add_option("--test", met->test, "Test cube")->required();
    c->add_option("--format", met->format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    commands.emplace_back(c, [met, &out] { return cmd_metrics(*met, out); });
  }

  auto orc = std::make_shared<OracleArgs>();
  {
    auto* c = app.add_subcommand("oracle-check", "Compare matrix-free operators to a dense SVD");
    c->add_option("--height", orc->height)->required();
    c->add_option("--width", orc->width)->required();
    c->add_option("--bands", orc->bands)->required();
    c->add_option("--shift-step", orc->shift_step)->required();
    c->add_option("--seed", orc->seed)->required();
    c->add_option("--density", orc->density, "Mask density (default 0.7)");
    c->add_flag("--corrupt-sigma", orc->corrupt_sigma, "Perturb one Sigma entry (test hook)");
    commands.emplace_back(c, [orc, &out, &err] { return cmd_oracle_check(*orc, out, err); });
  }

  auto ben = std::make_shared<BenchArgs>();
  {
    auto* c = app.add_subcommand("bench", "Time the core kernels and report operator memory");
    c->add_option("--height", ben->height, "default 256");
    c->add_option("--width", ben->width, "default 256");
    c->add_option("--bands", ben->bands, "default 28");
    c->add_option("--shift-step", ben->shift_step, "default 2");
    c->add_option("--reps", ben->reps, "default 10");
    c->add_option("--seed", ben->seed);
    commands.emplace_back(c, [ben, &out] { return cmd_bench(*ben, out); });
  }

  auto mgen = std::make_shared<MaskGenArgs>();
  auto mcrop = std::make_shared<MaskCropArgs>();
  {
    auto* m = app.add_subcommand("mask", "Generate or crop coded apertures");
    m->require_subcommand(1);
    auto* g = m->add_subcommand("gen", "Bernoulli mask");
    g->add_option("--height", mgen->height)->required();
    g->add_option("--width", mgen->width)->required();
    g->add_option("--density", mgen->density, "default 0.5");
    g->add_option("--seed", mgen->seed);
    g->add_flag("--full-rank", mgen->full_rank, "Open pixels so no detector column is dark");
    g->add_option("--bands", mgen->bands, "Band count for --full-rank");
    g->add_option("--shift-step", mgen->shift_step, "Shift step for --full-rank");
    g->add_option("--dtype", mgen->dtype, "f32 | f64 (default f64)");
    g->add_option("--out", mgen->out)->required();
    commands.emplace_back(g, [mgen, &out] { return cmd_mask_gen(*mgen, out); });

    auto* cr = m->add_subcommand("crop", "Random square window of a mask");
    cr->add_option("--in", mcrop->in)->required();
    cr->add_option("--size", mcrop->size)->required();
    cr->add_option("--seed", mcrop->seed);
    cr->add_flag("--full-rank", mcrop->full_rank, "Open pixels so no detector column is dark");
    cr->add_option("--bands", mcrop->bands, "Band count for --full-rank");
    cr->add_option("--shift-step", mcrop->shift_step, "Shift step for --full-rank");
    mcrop->o_dtype = cr->add_option("--dtype", mcrop->dtype, "f32 | f64 (default: input's)");
    cr->add_option("--out", mcrop->out)->required();
    commands.emplace_back(cr, [mcrop, &out] { return cmd_mask_crop(*mcrop, out); });
  }

  auto scn = std::make_shared<SceneArgs>();
  {
    auto* c = app.add_subcommand("scene", "Synthetic piecewise-smooth cube");
    c->add_option("--height", scn->height)->required();
    c->add_option("--width", scn->width)->required();
    c->add_option("--bands", scn->bands)->required();
    c->add_option("--complexity", scn->complexity, "Rectangle count (default 6)");
    c->add_option("--seed", scn->seed);
    c->add_option("--dtype", scn->dtype, "f32 | f64 (default f64)");
    c->add_option("--out", scn->out)->required();
    commands.emplace_back(c, [scn, &out] { return cmd_scene(*scn, out); });
  }

  auto exp = std::make_shared<ExportArgs>();
  {
    auto* c = app.add_subcommand("export", "Write each band as an 8-bit PGM image");
    c->add_option("--in", exp->in)->required();
    c->add_option("--out-dir", exp->out_dir)->required();
    c->add_option("--prefix", exp->prefix, "File name prefix (default band)");
    c->add_flag("--normalize", exp->normalize, "Scale by the cube maximum instead of 1");
    commands.emplace_back(c, [exp, &out] { return cmd_export(*exp, out); });
  }

  auto abl = std::make_shared<AblationArgs>();
  {
    auto* c = app.add_subcommand("ablation", "crop x init x RND grid on the synthetic suite");
    c->add_option("--height", abl->height, "default 48");
    c->add_option("--width", abl->width, "default 48");
    c->add_option("--bands", abl->bands, "default 16");
    c->add_option("--shift-step", abl->shift_step, "default 2");
    c->add_option("--scenes", abl->scenes, "default 10");
    c->add_option("--complexity", abl->complexity, "default 6");
    c->add_option("--density", abl->density, "default 0.5");
    c->add_option("--seed", abl->seed, "default 2023");
    c->add_option("--iters", abl->iters, "default 60");
    c->add_option("--tv-iters", abl->tv_iters, "default 20");
    c->add_option("--tv-weight", abl->tv_weight, "default 0.02");
    c->add_option("--mask", abl->mask, "Use this mask instead of a generated one");
    abl->o_bits = c->add_option("--shot-noise-bits", abl->bits, "Add shot noise to the suite");
    commands.emplace_back(c, [abl, &out] { return cmd_ablation(*abl, out); });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (auto& [sub, run] : commands) {
      if (sub->parsed()) return run();
    }
    err << "error: no command given\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace cassi::cli
