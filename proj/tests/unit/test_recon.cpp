#include <doctest.h>

#include <limits>
#include <numeric>

#include "test_support.hpp"

using namespace cassi;
using cassi::testing::Gen;
using cassi::testing::thrown_kind;

namespace {

std::vector<double> as_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

// Row [1, 2, 3] seen as a 1x2 scene with two bands and d = 1.
const SceneConfig k122 = SceneConfig::make(1, 2, 2, 1);
const Measurement kRow(k122, {1, 2, 3});

class ConstantPrior final : public Prior {
 public:
  explicit ConstantPrior(HSICube value) : value_(std::move(value)) {}
  HSICube denoise(const HSICube&, double) const override { return value_; }

 private:
  HSICube value_;
};

class NanPrior final : public Prior {
 public:
  HSICube denoise(const HSICube& cube, double) const override {
    HSICube out = cube;
    out.values()[0] = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
};

class ShrinkingPrior final : public Prior {
 public:
  HSICube denoise(const HSICube&, double) const override {
    return HSICube(SceneConfig::make(1, 1, 1, 1));
  }
};

struct Instance {
  SceneConfig sc;
  SensingOperator op;
  HSICube truth;
  Measurement y;
};

Instance make_instance(Gen& g, const SceneConfig& sc, double density = 0.5) {
  const SensingOperator op = build_operator(testing::random_full_rank_mask(sc, g, density), sc);
  HSICube truth = gen_scene(sc, 4, g.range(0, 1u << 30));
  Measurement y = phi_apply(op, truth);
  return {sc, op, std::move(truth), std::move(y)};
}

}  // namespace

TEST_CASE("init strategies on a single row") {
  const ShiftedCube s = init_shift(kRow, k122);
  CHECK(as_vec(s.band(0)) == std::vector<double>{1, 2, 3});
  CHECK(as_vec(s.band(1)) == std::vector<double>{0, 1, 2});

  const ShiftedCube r = init_repeat(kRow, k122);
  CHECK(as_vec(r.band(0)) == std::vector<double>{1, 2, 3});
  CHECK(as_vec(r.band(1)) == std::vector<double>{1, 2, 3});

  const ShiftedCube o = init_roll(kRow, k122);
  CHECK(as_vec(o.band(0)) == std::vector<double>{1, 2, 3});
  CHECK(as_vec(o.band(1)) == std::vector<double>{3, 1, 2});

  CHECK(make_initial(InitStrategy::Roll, kRow, k122) == o);
  CHECK(make_initial(InitStrategy::Shift, kRow, k122) == s);
  CHECK(make_initial(InitStrategy::Repeat, kRow, k122) == r);
}

TEST_CASE("init strategies with one band or zero input") {
  const SceneConfig c1 = SceneConfig::make(2, 3, 1, 1);
  const Measurement y(c1, {1, 2, 3, 4, 5, 6});
  for (auto s : {InitStrategy::Shift, InitStrategy::Repeat, InitStrategy::Roll}) {
    CHECK(as_vec(make_initial(s, y, c1).values()) == as_vec(y.values()));
    for (double v : testing::values_of(make_initial(s, Measurement(k122), k122))) CHECK(v == 0.0);
  }
  CHECK(thrown_kind([&] { init_roll(y, k122); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("init invariants on random measurements") {
  Gen g(41);
  for (int trial = 0; trial < 100; ++trial) {
    const SceneConfig sc = testing::random_config(g, 9, 6, 3, 1);
    Measurement y(sc);
    for (double& v : y.values()) v = g.real(0.1, 1.0);  // strictly positive
    const double total = std::accumulate(y.values().begin(), y.values().end(), 0.0);
    std::vector<double> sorted_y = as_vec(y.values());
    std::sort(sorted_y.begin(), sorted_y.end());

    const ShiftedCube roll = init_roll(y, sc);
    const ShiftedCube shift = init_shift(y, sc);
    const ShiftedCube rep = init_repeat(y, sc);
    double rep_sum = 0.0;
    for (double v : rep.values()) rep_sum += v;
    CHECK(rep_sum == doctest::Approx(sc.bands * total));

    for (std::size_t c = 0; c < sc.bands; ++c) {
      std::vector<double> band = as_vec(roll.band(c));
      std::sort(band.begin(), band.end());
      CHECK(band == sorted_y);

      const auto sb = shift.band(c);
      const auto zeros = static_cast<std::size_t>(std::count(sb.begin(), sb.end(), 0.0));
      CHECK(zeros == sc.height * sc.shift_step * c);
    }
  }
}

TEST_CASE("crop_to_scene drops the dispersed margin") {
  Gen g(42);
  for (int trial = 0; trial < 30; ++trial) {
    const SceneConfig sc = testing::random_config(g, 8, 5, 3, 1);
    const HSICube x = testing::random_cube(sc, g);
    const HSICube cropped = crop_to_scene(shift_cube(x));
    CHECK(cropped == x);
    CHECK(cropped.cols() == sc.width);
  }
}

TEST_CASE("crop shrinks the denoised pixel count by W / W'") {
  const SceneConfig sc = SceneConfig::make(256, 256, 28, 2);
  const SensingOperator op = build_operator(CodedAperture(256, 256, 1.0), sc);
  const Measurement y(sc, std::vector<double>(sc.detector_size(), 1.0));
  SolverConfig cfg;
  cfg.iterations = 1;
  SolveTrace cropped, full;
  cfg.crop_denoiser_input = true;
  gap_solve(op, y, IdentityPrior{}, cfg, &cropped);
  cfg.crop_denoiser_input = false;
  gap_solve(op, y, IdentityPrior{}, cfg, &full);
  CHECK(cropped.denoised_pixels_per_iteration == 256u * 256u * 28u);
  CHECK(full.denoised_pixels_per_iteration == 256u * 310u * 28u);
  // 256 / 310 exactly.
  CHECK(cropped.denoised_pixels_per_iteration * 310 == full.denoised_pixels_per_iteration * 256);
}

TEST_CASE("identity prior: residual is non-increasing") {
  Gen g(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance in = make_instance(g, testing::random_config(g, 8, 4, 2));
    for (bool crop : {true, false}) {
      for (auto init : {InitStrategy::Shift, InitStrategy::Repeat, InitStrategy::Roll}) {
        SolverConfig cfg;
        cfg.iterations = 8;
        cfg.crop_denoiser_input = crop;
        cfg.init = init;
        SolveTrace trace;
        const HSICube x = gap_solve(in.op, in.y, IdentityPrior{}, cfg, &trace);
        REQUIRE(trace.residual_norms.size() == 8);
        for (std::size_t k = 1; k < trace.residual_norms.size(); ++k) {
          CHECK(trace.residual_norms[k] <= trace.residual_norms[k - 1] + 1e-12);
        }
        CHECK(trace.residual_norms.back() <= 1e-10 * testing::l2(in.y.values()));
      }
    }
  }
}

TEST_CASE("starting from the pseudo-inverse with the identity prior is a fixed point") {
  Gen g(44);
  const Instance in = make_instance(g, SceneConfig::make(4, 4, 2, 1));
  const HSICube x0 = pinv_apply(in.op, in.y);
  SolverConfig cfg;
  cfg.iterations = 10;
  const HSICube x = gap_solve(in.op, in.y, IdentityPrior{}, cfg, shift_cube(x0));
  CHECK(testing::max_abs_diff(x.values(), x0.values()) <= 1e-12);
}

TEST_CASE("divergence and bad priors are reported") {
  Gen g(45);
  const Instance in = make_instance(g, SceneConfig::make(4, 4, 2, 1));
  SolverConfig cfg;
  cfg.iterations = 3;
  CHECK(thrown_kind([&] { gap_solve(in.op, in.y, NanPrior{}, cfg); }) == ErrorKind::Diverged);
  CHECK(thrown_kind([&] { gap_solve(in.op, in.y, ShrinkingPrior{}, cfg); }) ==
        ErrorKind::DimensionMismatch);
  cfg.crop_denoiser_input = false;
  CHECK(thrown_kind([&] { gap_solve(in.op, in.y, NanPrior{}, cfg); }) == ErrorKind::Diverged);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.check());
  CHECK(cfg.iterations == 60);
  CHECK(cfg.tv_weight == 0.1);
  CHECK(cfg.tv_inner_iterations == 20);
  CHECK(cfg.init == InitStrategy::Roll);
  CHECK(cfg.crop_denoiser_input);
  CHECK(cfg.convergence_tol == 0.0);

  SolverConfig bad = cfg;
  bad.iterations = 0;
  CHECK(thrown_kind([&] { bad.check(); }) == ErrorKind::InvalidArgument);
  bad = cfg;
  bad.tv_weight = -1.0;
  CHECK(thrown_kind([&] { bad.check(); }) == ErrorKind::InvalidArgument);
  bad = cfg;
  bad.tv_inner_iterations = 0;
  CHECK(thrown_kind([&] { bad.check(); }) == ErrorKind::InvalidArgument);
  bad = cfg;
  bad.convergence_tol = -1e-3;
  CHECK(thrown_kind([&] { bad.check(); }) == ErrorKind::InvalidArgument);

  CHECK(parse_init_strategy("shift") == InitStrategy::Shift);
  CHECK(parse_init_strategy("repeat") == InitStrategy::Repeat);
  CHECK(parse_init_strategy("roll") == InitStrategy::Roll);
  CHECK(to_string(InitStrategy::Repeat) == "repeat");
  CHECK(thrown_kind([] { parse_init_strategy("spiral"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("convergence tolerance stops early") {
  Gen g(46);
  const Instance in = make_instance(g, SceneConfig::make(6, 6, 3, 1));
  SolverConfig cfg;
  cfg.iterations = 50;
  cfg.convergence_tol = 1e-9;
  SolveTrace trace;
  gap_solve(in.op, in.y, IdentityPrior{}, cfg, &trace);
  CHECK(trace.iterations < 50);
  CHECK(trace.iterations >= 1);
}

TEST_CASE("rnd_reconstruct with an oracle, a zero and a TV prior") {
  Gen g(47);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance in = make_instance(g, testing::random_config(g, 10, 5, 2, 3));
    SolverConfig cfg;
    cfg.iterations = 5;

    const HSICube exact = rnd_reconstruct(in.op, in.y, ConstantPrior(in.truth), cfg);
    CHECK(testing::rel_l2(exact.values(), in.truth.values()) <= 1e-10);

    const HSICube zero = rnd_reconstruct(in.op, in.y, ConstantPrior(HSICube(in.sc)), cfg);
    CHECK(testing::max_abs_diff(zero.values(), pinv_apply(in.op, in.y).values()) <= 1e-15);

    const HSICube q = gap_solve(in.op, in.y, TvPrior{}, cfg);
    const HSICube tv = rnd_reconstruct(in.op, in.y, TvPrior{}, cfg);
    const double yinf = testing::max_abs(in.y.values());
    const auto fq = phi_apply(in.op, q);
    const auto ft = phi_apply(in.op, tv);
    CHECK(testing::max_abs_diff(ft.values(), in.y.values()) <= 1e-8 * yinf);
    CHECK(testing::max_abs_diff(ft.values(), in.y.values()) <
          testing::max_abs_diff(fq.values(), in.y.values()));
  }
}

TEST_CASE("GAP-TV beats the pseudo-inverse on piecewise-smooth scenes") {
  Gen g(48);
  const SceneConfig sc = SceneConfig::make(32, 32, 8, 2);
  const SensingOperator op = build_operator(testing::random_full_rank_mask(sc, g, 0.5), sc);
  SolverConfig cfg;
  cfg.tv_weight = 0.02;
  cfg.iterations = 40;
  double gain = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const HSICube truth = gen_scene(sc, 5, seed);
    const Measurement y = phi_apply(op, truth);
    gain += psnr(truth, gap_solve(op, y, TvPrior{}, cfg)).psnr_db -
            psnr(truth, pinv_apply(op, y)).psnr_db;
  }
  CHECK(gain / 3.0 > 1.0);
}

TEST_CASE("reconstruction is deterministic and thread-count independent") {
  Gen g(49);
  const Instance in = make_instance(g, SceneConfig::make(12, 14, 6, 2));
  SolverConfig cfg;
  cfg.iterations = 6;
  set_thread_count(1);
  const HSICube a = rnd_reconstruct(in.op, in.y, TvPrior{}, cfg);
  const HSICube b = rnd_reconstruct(in.op, in.y, TvPrior{}, cfg);
  set_thread_count(3);
  const HSICube c = rnd_reconstruct(in.op, in.y, TvPrior{}, cfg);
  cfg.crop_denoiser_input = false;
  const HSICube d3 = rnd_reconstruct(in.op, in.y, TvPrior{}, cfg);
  set_thread_count(1);
  const HSICube d1 = rnd_reconstruct(in.op, in.y, TvPrior{}, cfg);
  set_thread_count(0);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(d1 == d3);
}
