#include <doctest.h>

#include <Eigen/Dense>

#include "test_support.hpp"

using namespace cassi;
using namespace cassi::oracle;
using cassi::testing::Gen;
using cassi::testing::thrown_kind;

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

double frob_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

// The four Moore-Penrose conditions, each as a relative Frobenius error.
void check_penrose(const Eigen::MatrixXd& a, const Eigen::MatrixXd& p, double tol) {
  CHECK(frob_rel(a * p * a, a) <= tol);
  CHECK(frob_rel(p * a * p, p) <= tol);
  const Eigen::MatrixXd ap = a * p;
  const Eigen::MatrixXd pa = p * a;
  CHECK(frob_rel(ap.transpose(), ap) <= tol);
  CHECK(frob_rel(pa.transpose(), pa) <= tol);
}

}  // namespace

TEST_CASE("build_dense on the 2x2x2 worked instance") {
  const SceneConfig sc = SceneConfig::make(2, 2, 2, 1);
  const SensingOperator op = build_operator(CodedAperture(2, 2, 1.0), sc);
  const DenseMatrix phi = build_dense(op);
  REQUIRE(phi.rows() == 6);
  REQUIRE(phi.cols() == 12);

  // Column-major detector order: (u, v) -> u + 2 v. Band 0 covers v in {0,1},
  // band 1 covers v in {1,2}.
  const std::vector<double> band0 = {1, 1, 1, 1, 0, 0};
  const std::vector<double> band1 = {0, 0, 1, 1, 1, 1};
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 12; ++c) {
      double want = 0.0;
      if (c == r) want = band0[r];
      if (c == r + 6) want = band1[r];
      CHECK(phi(r, c) == want);
    }
  }

  const HSICube x(sc, {1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(dense_apply(phi, vectorize(x)) == vectorize(phi_apply(op, x)));

  const DenseMatrix pinv = dense_pinv(phi);
  check_penrose(to_eigen(phi), to_eigen(pinv), 1e-10);
}

TEST_CASE("build_dense with one band is diag(vec(mask))") {
  const SceneConfig sc = SceneConfig::make(2, 3, 1, 1);
  const CodedAperture mask(2, 3, {1, 0.5, 2, 3, 1, 0.25});
  const DenseMatrix phi = build_dense(build_operator(mask, sc));
  REQUIRE(phi.rows() == 6);
  REQUIRE(phi.cols() == 6);
  for (std::size_t v = 0; v < 3; ++v) {
    for (std::size_t u = 0; u < 2; ++u) {
      const std::size_t i = u + 2 * v;
      for (std::size_t j = 0; j < 6; ++j) CHECK(phi(i, j) == (i == j ? mask(u, v) : 0.0));
    }
  }
}

TEST_CASE("entry cap") {
  CHECK(thrown_kind([] { DenseMatrix(2049, 2048); }) == ErrorKind::InstanceTooLarge);
  CHECK_NOTHROW(DenseMatrix(2048, 2048));

  const SceneConfig sc = SceneConfig::make(256, 256, 28, 2);
  const SensingOperator op = build_operator(CodedAperture(256, 256, 1.0), sc);
  CHECK(thrown_kind([&] { build_dense(op); }) == ErrorKind::InstanceTooLarge);
}

TEST_CASE("dense_pinv trivial cases") {
  const DenseMatrix eye = DenseMatrix::identity(5);
  const DenseMatrix p = dense_pinv(eye);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) CHECK(p(r, c) == doctest::Approx(r == c ? 1.0 : 0.0));

  DenseMatrix two(1, 1);
  two(0, 0) = 2.0;
  CHECK(dense_pinv(two)(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

  // Rank-deficient input: small singular values are dropped, not inverted.
  DenseMatrix rd(2, 2);
  rd(0, 0) = 1.0;
  rd(0, 1) = 1.0;
  rd(1, 0) = 1.0;
  rd(1, 1) = 1.0;
  const DenseMatrix rp = dense_pinv(rd);
  for (double v : rp.values()) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("dense_apply plumbing") {
  const std::vector<double> v = {1, -2, 3};
  CHECK(dense_apply(DenseMatrix::identity(3), v) == v);
  CHECK(dense_apply(DenseMatrix(2, 3), v) == std::vector<double>{0, 0});
  CHECK(thrown_kind([&] { dense_apply(DenseMatrix(2, 2), v); }) == ErrorKind::DimensionMismatch);

  DenseMatrix a(2, 3);
  a(0, 0) = 1;
  a(0, 2) = 2;
  a(1, 1) = 3;
  const DenseMatrix at = transpose(a);
  CHECK(at.rows() == 3);
  CHECK(at(2, 0) == 2.0);
  const DenseMatrix aat = multiply(a, at);
  CHECK(aat(0, 0) == 5.0);
  CHECK(aat(1, 1) == 9.0);
  CHECK(aat(0, 1) == 0.0);
  CHECK(relative_difference(a, a) == 0.0);
}

TEST_CASE("vector conversions round-trip") {
  Gen g(4);
  const SceneConfig sc = SceneConfig::make(3, 4, 3, 2);
  const HSICube x = testing::random_cube(sc, g);
  CHECK(cube_from_vector(sc, vectorize(x)) == x);
  const Measurement y = testing::random_measurement(sc, g);
  CHECK(measurement_from_vector(sc, vectorize(y)) == y);
  const ShiftedCube s = shift_cube(x);
  CHECK(shifted_from_vector(sc, vectorize(s)) == s);
  CHECK(vectorize(x).size() == sc.detector_size() * sc.bands);
  CHECK(vectorize(x)[flatten_index(1, 2 + 2 * 2, 2, sc)] == x(1, 2, 2));
}

TEST_CASE("matrix-free operators agree with the dense oracle") {
  Gen g(77);
  for (int i = 0; i < 100; ++i) {
    const SceneConfig sc = testing::random_config(g);
    const CodedAperture mask = testing::random_full_rank_mask(sc, g, 0.7, i % 3 != 0);
    const SensingOperator op = build_operator(mask, sc);
    const DenseMatrix phi = build_dense(op);
    const DenseMatrix pinv = dense_pinv(phi);

    const HSICube x = testing::random_cube(sc, g);
    const Measurement y = testing::random_measurement(sc, g);
    const auto xv = vectorize(x);
    const auto yv = vectorize(y);

    CHECK(testing::rel_l2(vectorize(phi_apply(op, x)), dense_apply(phi, xv)) <= 1e-12);
    CHECK(testing::rel_l2(vectorize(phi_t_apply(op, y)), dense_apply(transpose(phi), yv)) <=
          1e-12);
    CHECK(testing::rel_l2(vectorize(pinv_apply(op, y)), dense_apply(pinv, yv)) <= 1e-10);

    // Second, algorithmically different pseudo-inverse as a cross-check.
    const Eigen::MatrixXd cod =
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(to_eigen(phi)).pseudoInverse();
    CHECK(frob_rel(to_eigen(pinv), cod) <= 1e-10);
  }
}

TEST_CASE("Gram matrix is diagonal with diagonal sigma") {
  Gen g(78);
  for (int i = 0; i < 60; ++i) {
    const SceneConfig sc = testing::random_config(g);
    const bool binary = i % 2 == 0;
    const SensingOperator op = build_operator(testing::random_full_rank_mask(sc, g, 0.6, binary), sc);
    const DenseMatrix phi = build_dense(op);
    const DenseMatrix gram = multiply(phi, transpose(phi));
    const auto sigma = vectorize(op.sigma());
    for (std::size_t r = 0; r < gram.rows(); ++r) {
      for (std::size_t c = 0; c < gram.cols(); ++c) {
        if (r != c) {
          CHECK(gram(r, c) == 0.0);
        } else if (binary) {
          CHECK(gram(r, c) == sigma[r]);
        } else {
          CHECK(std::fabs(gram(r, c) - sigma[r]) <= 1e-14 * sigma[r]);
        }
      }
    }
  }
}

TEST_CASE("Phi Phi^+ Phi = Phi with Phi^+ applied column by column") {
  Gen g(79);
  for (int i = 0; i < 30; ++i) {
    const SceneConfig sc = testing::random_config(g, 6, 3, 2);
    const SensingOperator op = build_operator(testing::random_full_rank_mask(sc, g, 0.7, false), sc);
    const DenseMatrix phi = build_dense(op);
    const std::size_t n = phi.rows();

    // Column j of Phi^+ is pinv_apply(e_j).
    DenseMatrix pinv(phi.cols(), n);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      const auto col = vectorize(pinv_apply(op, measurement_from_vector(sc, e)));
      for (std::size_t r = 0; r < col.size(); ++r) pinv(r, j) = col[r];
    }
    const DenseMatrix back = multiply(multiply(phi, pinv), phi);
    CHECK(relative_difference(back, phi) <= 1e-10);
    check_penrose(to_eigen(phi), to_eigen(pinv), 1e-10);
  }
}
