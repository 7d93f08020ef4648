#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cassi/recon.hpp"
#include "cassi/scene_sim.hpp"
#include "cassi/sensing_operator.hpp"

namespace cassi::cli {

enum class Method { Pinv, GapTv, RndGapTv };

std::string_view to_string(Method m) noexcept;
/// Accepts "pinv", "gap-tv", "rnd-gap-tv".
Method parse_method(std::string_view name);

/// Runs one reconstruction method with a TV prior configured from `cfg`.
HSICube run_method(Method method, const SensingOperator& op, const Measurement& meas,
                   const SolverConfig& cfg, SolveTrace* trace = nullptr);

/// The bundled synthetic benchmark: piecewise-smooth scenes seen through a
/// single full-rank Bernoulli mask, noiseless unless `noise` is set.
struct SuiteSpec {
  SceneConfig config = SceneConfig::make(48, 48, 16, 2);
  std::size_t scenes = 10;
  std::size_t complexity = 6;
  double mask_density = 0.5;
  std::uint64_t seed = 2023;
  std::optional<NoiseSpec> noise;
};

/// Solver settings the suite's regression numbers are recorded with.
SolverConfig suite_solver_config();

struct SuiteCase {
  HSICube truth;
  Measurement meas;
};

struct Suite {
  SuiteSpec spec;
  CodedAperture mask;
  SensingOperator op;
  std::vector<SuiteCase> cases;
};

/// Builds the suite. `mask` overrides the generated one (it is still made
/// full rank for the suite geometry).
Suite make_suite(const SuiteSpec& spec, const std::optional<CodedAperture>& mask = std::nullopt);

struct SuiteScore {
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  /// Mean over scenes of ||Phi x - y||_inf / ||y||_inf.
  double mean_residual = 0.0;
  std::vector<double> psnr;
  std::size_t denoised_pixels_per_iteration = 0;
};

SuiteScore score_method(const Suite& suite, Method method, const SolverConfig& cfg);

struct AblationRow {
  bool crop = true;
  InitStrategy init = InitStrategy::Roll;
  bool rnd = false;
  SuiteScore score;
};

/// Full crop x init x RND grid (2 x 3 x 2 rows). The RND rows reuse the
/// q of the matching non-RND rows.
std::vector<AblationRow> run_ablation(const Suite& suite, const SolverConfig& base);

/// ||Phi x - y||_inf / ||y||_inf (absolute when y is zero).
double relative_residual(const SensingOperator& op, const HSICube& x, const Measurement& y);

}  // namespace cassi::cli
