#include "cassi/cli/suite.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cassi/metrics.hpp"

namespace cassi::cli {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::Pinv: return "pinv";
    case Method::GapTv: return "gap-tv";
    case Method::RndGapTv: return "rnd-gap-tv";
  }
  return "pinv";
}

Method parse_method(std::string_view name) {
  if (name == "pinv") return Method::Pinv;
  if (name == "gap-tv") return Method::GapTv;
  if (name == "rnd-gap-tv") return Method::RndGapTv;
  fail(ErrorKind::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

HSICube run_method(Method method, const SensingOperator& op, const Measurement& meas,
                   const SolverConfig& cfg, SolveTrace* trace) {
  const TvPrior prior(cfg.tv_inner_iterations);
  switch (method) {
    case Method::Pinv: return pinv_apply(op, meas);
    case Method::GapTv: return gap_solve(op, meas, prior, cfg, trace);
    case Method::RndGapTv: return rnd_reconstruct(op, meas, prior, cfg, trace);
  }
  return pinv_apply(op, meas);
}

SolverConfig suite_solver_config() {
  SolverConfig cfg;
  cfg.tv_weight = 0.02;
  return cfg;
}

Suite make_suite(const SuiteSpec& spec, const std::optional<CodedAperture>& mask) {
  const SceneConfig& sc = spec.config;
  CodedAperture raw = mask ? *mask : gen_mask(sc.height, sc.width, spec.mask_density, spec.seed);
  CodedAperture full = ensure_full_rank(raw, sc);
  SensingOperator op = build_operator(full, sc);

  std::vector<SuiteCase> cases;
  cases.reserve(spec.scenes);
  for (std::size_t i = 0; i < spec.scenes; ++i) {
    HSICube truth = gen_scene(sc, spec.complexity, mix64(spec.seed + 1 + i));
    Measurement meas = phi_apply(op, truth);
    if (spec.noise) {
      NoiseSpec ns = *spec.noise;
      ns.seed = mix64(ns.seed + i);
      meas = add_shot_noise(meas, ns);
    }
    cases.push_back({std::move(truth), std::move(meas)});
  }
  return Suite{spec, std::move(full), std::move(op), std::move(cases)};
}

double relative_residual(const SensingOperator& op, const HSICube& x, const Measurement& y) {
  const Measurement fx = phi_apply(op, x);
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < fx.size(); ++i) {
    diff = std::max(diff, std::fabs(fx.values()[i] - y.values()[i]));
    scale = std::max(scale, std::fabs(y.values()[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

namespace {

void accumulate(SuiteScore& score, const SuiteCase& c, const SensingOperator& op,
                const HSICube& x) {
  const double p = psnr(c.truth, x).psnr_db;
  score.psnr.push_back(p);
  score.mean_psnr += p;
  score.mean_ssim += ssim(c.truth, x).ssim;
  score.mean_residual += relative_residual(op, x, c.meas);
}

void finish(SuiteScore& score, std::size_t n) {
  const double denom = static_cast<double>(std::max<std::size_t>(n, 1));
  score.mean_psnr /= denom;
  score.mean_ssim /= denom;
  score.mean_residual /= denom;
}

}  // namespace

SuiteScore score_method(const Suite& suite, Method method, const SolverConfig& cfg) {
  SuiteScore score;
  for (const SuiteCase& c : suite.cases) {
    SolveTrace trace;
    const HSICube x = run_method(method, suite.op, c.meas, cfg, &trace);
    score.denoised_pixels_per_iteration = trace.denoised_pixels_per_iteration;
    accumulate(score, c, suite.op, x);
  }
  finish(score, suite.cases.size());
  return score;
}

std::vector<AblationRow> run_ablation(const Suite& suite, const SolverConfig& base) {
  std::vector<AblationRow> rows;
  for (bool crop : {false, true}) {
    for (InitStrategy init : {InitStrategy::Shift, InitStrategy::Repeat, InitStrategy::Roll}) {
      SolverConfig cfg = base;
      cfg.crop_denoiser_input = crop;
      cfg.init = init;
      AblationRow plain{crop, init, false, {}};
      AblationRow wrapped{crop, init, true, {}};
      const TvPrior prior(cfg.tv_inner_iterations);
      for (const SuiteCase& c : suite.cases) {
        SolveTrace trace;
        const HSICube q = gap_solve(suite.op, c.meas, prior, cfg, &trace);
        plain.score.denoised_pixels_per_iteration = trace.denoised_pixels_per_iteration;
        wrapped.score.denoised_pixels_per_iteration = trace.denoised_pixels_per_iteration;
        accumulate(plain.score, c, suite.op, q);
        accumulate(wrapped.score, c, suite.op, rnd_combine(suite.op, c.meas, q));
      }
      finish(plain.score, suite.cases.size());
      finish(wrapped.score, suite.cases.size());
      rows.push_back(std::move(plain));
      rows.push_back(std::move(wrapped));
    }
  }
  return rows;
}

}  // namespace cassi::cli
