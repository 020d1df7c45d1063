#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "tailframe/numeric.hpp"
#include "tailframe/oracles.hpp"
#include "tailframe/random.hpp"

#include "test_util.hpp"

using namespace tailframe;
using test_util::make_vec;
using test_util::unit;
using Complex = std::complex<double>;

namespace {
const ToleranceConfig kTol{};
}

TEST_CASE("inner product on the standard basis") {
  const auto e1 = unit<double>(3, 0);
  const auto e2 = unit<double>(3, 1);
  CHECK(inner<double>(e1, e1) == 1.0);
  CHECK(inner<double>(e1, e2) == 0.0);
  CHECK_THROWS_AS(inner<double>(e1, unit<double>(2, 0)),
                  std::invalid_argument);
}

TEST_CASE("inner product is conjugate-linear in the first slot") {
  Vec<Complex> u(2), v(2);
  u << Complex(0, 1), Complex(0, 0);
  v << Complex(1, 0), Complex(0, 0);
  CHECK(inner<Complex>(u, v) == Complex(0, -1));
}

TEMPLATE_TEST_CASE("conjugate symmetry of the inner product", "[numeric]",
                   double, Complex) {
  Rng rng(101);
  for (int i = 0; i < 200; ++i) {
    const auto u = gaussian_vector<TestType>(rng, 5);
    const auto v = gaussian_vector<TestType>(rng, 5);
    const auto lhs = Complex(inner<TestType>(u, v));
    const auto rhs = std::conj(Complex(inner<TestType>(v, u)));
    CHECK(std::abs(lhs - rhs) <= kTol.residual_tol);
  }
}

TEST_CASE("rank-one application") {
  const auto e1 = unit<double>(2, 0);
  const auto e2 = unit<double>(2, 1);
  CHECK(rank_one_apply<double>(e1, e2, e2) == e1);
  CHECK(rank_one_apply<double>(e1, e2, e1).isZero(0.0));
  const auto a = make_vec<double>({2, 0});
  const auto b = make_vec<double>({0, 3});
  const auto x = make_vec<double>({0, 1});
  CHECK(rank_one_apply<double>(a, b, x) == make_vec<double>({6, 0}));
}

TEMPLATE_TEST_CASE("rank-one norm identity", "[numeric]", double, Complex) {
  Rng rng(37);
  for (int i = 0; i < 100; ++i) {
    const auto a = gaussian_vector<TestType>(rng, 4);
    const auto b = gaussian_vector<TestType>(rng, 4);
    const auto x = gaussian_vector<TestType>(rng, 4);
    const double expected =
        a.norm() * std::abs(Complex(inner<TestType>(b, x)));
    CHECK(rank_one_apply<TestType>(a, b, x).norm() ==
          Catch::Approx(expected).margin(1e-12));
  }
}

TEST_CASE("orthonormalize drops dependent vectors") {
  const std::vector<Vec<double>> in = {
      unit<double>(3, 0), unit<double>(3, 1),
      make_vec<double>({1, 1, 0})};
  const auto basis = orthonormalize<double>(in, 3, kTol);
  REQUIRE(basis.dim() == 2);
  // spans the e1-e2 plane
  CHECK(project(basis, make_vec<double>({2, -3, 0})).isApprox(
      make_vec<double>({2, -3, 0}), 1e-12));
  CHECK(project(basis, unit<double>(3, 2)).norm() <= 1e-12);
}

TEST_CASE("orthonormalize of nothing is the zero subspace") {
  const auto basis = orthonormalize<double>({}, 4, kTol);
  CHECK(basis.dim() == 0);
  CHECK(basis.ambient_dim() == 4);
}

TEST_CASE("near-dependent vector is absorbed at the rank tolerance") {
  const std::vector<Vec<double>> in = {make_vec<double>({1, 1, 0}),
                                       make_vec<double>({1, -1, 0}),
                                       make_vec<double>({1e-14, 0, 0})};
  ToleranceConfig tol;
  tol.rank_tol = 1e-10;
  const auto basis = orthonormalize<double>(in, 3, tol);
  const Index svd_rank = oracles::rank<double>(in, 3, tol.rank_tol);
  CHECK(basis.dim() == 2);
  CHECK(basis.dim() == svd_rank);
}

TEMPLATE_TEST_CASE("rank decision agrees with the singular-value oracle",
                   "[numeric]", double, Complex) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    std::vector<Vec<TestType>> in;
    const Index count = 1 + static_cast<Index>(rng.next_u64() % 8);
    for (Index i = 0; i < count; ++i) {
      if (i > 1 && rng.uniform01() < 0.3) {
        // deliberately dependent combination
        in.push_back(in[0] * TestType(2) + in[i - 1]);
      } else {
        in.push_back(gaussian_vector<TestType>(rng, 5));
      }
    }
    const auto basis = orthonormalize<TestType>(in, 5, kTol);
    CHECK(basis.dim() == oracles::rank<TestType>(in, 5, kTol.rank_tol));
    // Gram matrix is the identity
    const Mat<TestType> g = basis.columns.adjoint() * basis.columns;
    CHECK((g - Mat<TestType>::Identity(g.rows(), g.cols()))
              .cwiseAbs()
              .maxCoeff() <= kTol.residual_tol);
  }
}

TEST_CASE("projection onto coordinate subspaces") {
  const auto b1 = orthonormalize<double>({unit<double>(2, 0)}, 2, kTol);
  CHECK(project(b1, make_vec<double>({3, 4})) == make_vec<double>({3, 0}));

  const auto empty = orthonormalize<double>({}, 2, kTol);
  CHECK(project(empty, make_vec<double>({3, 4})).isZero(0.0));

  const auto plane = orthonormalize<double>(
      {unit<double>(3, 0), unit<double>(3, 1)}, 3, kTol);
  CHECK(project(plane, make_vec<double>({1, 2, 3})) ==
        make_vec<double>({1, 2, 0}));
}

TEMPLATE_TEST_CASE("projection is idempotent and Pythagorean", "[numeric]",
                   double, Complex) {
  Rng rng(11);
  std::vector<Vec<TestType>> gens;
  for (int i = 0; i < 3; ++i) gens.push_back(gaussian_vector<TestType>(rng, 6));
  const auto basis = orthonormalize<TestType>(gens, 6, kTol);
  for (int i = 0; i < 1000; ++i) {
    const auto x = gaussian_vector<TestType>(rng, 6);
    const auto px = project(basis, x);
    CHECK((project(basis, px) - px).norm() <=
          kTol.residual_tol * std::max(1.0, x.norm()));
    CHECK(std::abs(x.squaredNorm() - px.squaredNorm() -
                   (x - px).squaredNorm()) <=
          kTol.residual_tol * std::max(1.0, x.squaredNorm()));
    // residual is orthogonal to every column
    for (Index c = 0; c < basis.dim(); ++c) {
      const Vec<TestType> col = basis.columns.col(c);
      CHECK(std::abs(Complex(inner<TestType>(col, Vec<TestType>(x - px)))) <=
            kTol.residual_tol);
    }
  }
  // inputs are reproduced by projection onto their own span
  for (const auto& v : gens) {
    CHECK((v - project(basis, v)).norm() <=
          kTol.rank_tol * std::max(1.0, v.norm()));
  }
}

TEST_CASE("operator norm of simple matrices") {
  CHECK(operator_norm<double>(Mat<double>::Identity(3, 3)) ==
        Catch::Approx(1.0));
  CHECK(operator_norm<double>(Mat<double>::Zero(3, 3)) == 0.0);
  Mat<double> diag = Mat<double>::Zero(2, 2);
  diag(0, 0) = 0.3;
  diag(1, 1) = -0.7;
  CHECK(operator_norm<double>(diag) == Catch::Approx(0.7));
}

TEST_CASE("solving against the identity minus a contraction") {
  const Mat<double> zero = Mat<double>::Zero(2, 2);
  CHECK(solve_identity_minus<double>(zero, unit<double>(2, 0), kTol) ==
        unit<double>(2, 0));

  Mat<double> half = Mat<double>::Zero(2, 2);
  half(0, 0) = 0.5;
  const auto y =
      solve_identity_minus<double>(half, make_vec<double>({1, 1}), kTol);
  CHECK(y.isApprox(make_vec<double>({2, 1}), 1e-14));
}

TEMPLATE_TEST_CASE("direct solve agrees with geometric partial sums",
                   "[numeric]", double, Complex) {
  Rng rng(77);
  Mat<TestType> T(4, 4);
  for (Index i = 0; i < 4; ++i) {
    T.col(i) = gaussian_vector<TestType>(rng, 4);
  }
  T *= TestType(0.4 / operator_norm(T));
  REQUIRE(operator_norm(T) == Catch::Approx(0.4));
  const auto b = gaussian_vector<TestType>(rng, 4);
  const auto y = solve_identity_minus<TestType>(T, b, kTol);
  CHECK((Mat<TestType>(Mat<TestType>::Identity(4, 4) - T) * y - b).norm() <=
        1e-10);
  // independent evaluation: sum T^j b until the terms vanish
  Vec<TestType> sum = b, power = b;
  for (int j = 0; j < 120; ++j) {
    power = T * power;
    sum += power;
  }
  CHECK((y - sum).norm() <= 1e-11);
}

TEST_CASE("solve rejects non-contractions") {
  Mat<double> big = Mat<double>::Identity(2, 2) * 1.5;
  CHECK_THROWS_AS(solve_identity_minus<double>(big, unit<double>(2, 0), kTol),
                  ContractionError);
}

TEST_CASE("tolerance config rejects bad values") {
  ToleranceConfig bad;
  bad.rank_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = ToleranceConfig{};
  bad.rank_tol = 1e-6;  // above residual_tol
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_NOTHROW(ToleranceConfig{}.validate());
}
