#include <catch2/catch_amalgamated.hpp>

#include "tailframe/adapted_basis.hpp"
#include "tailframe/approximants.hpp"

#include "test_util.hpp"

using namespace tailframe;
using test_util::make_vec;
using test_util::random_sequence;
using test_util::unit;
using Complex = std::complex<double>;

namespace {
const ToleranceConfig kTol{};
}

TEST_CASE("geometric schedule hits the requested mass and ratio") {
  const auto sched = make_geometric_schedule(4, 0.5, 0.25);
  REQUIRE(sched.count() == 4);
  CHECK(sched.sum_sq == Catch::Approx(0.25).epsilon(1e-14));
  for (Index n = 1; n < 4; ++n) {
    CHECK(sched.at(n + 1) / sched.at(n) == Catch::Approx(0.5));
  }
  // independently recomputed mass
  double mass = 0.0;
  for (double e : sched.values) mass += e * e;
  CHECK(mass == Catch::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("geometric schedule with a slower decay") {
  const auto sched = make_geometric_schedule(10, 0.7, 0.5);
  double mass = 0.0;
  for (double e : sched.values) mass += e * e;
  CHECK(std::abs(mass - 0.5) <= 1e-12);
}

TEST_CASE("explicit schedule validation") {
  CHECK_THROWS_AS(make_explicit_schedule({0.9, 0.5}), ValidationError);
  CHECK_THROWS_AS(make_explicit_schedule({0.2, -0.1}), ValidationError);
  CHECK_THROWS_AS(make_explicit_schedule({}), ValidationError);
  const auto ok = make_explicit_schedule({0.5, 0.5});
  CHECK(ok.sum_sq == Catch::Approx(0.5));
}

TEST_CASE("schedule parameter validation") {
  CHECK_THROWS_AS(make_geometric_schedule(0, 0.5, 0.25), ValidationError);
  CHECK_THROWS_AS(make_geometric_schedule(4, 1.0, 0.25), ValidationError);
  CHECK_THROWS_AS(make_geometric_schedule(4, 0.5, 1.0), ValidationError);
}

TEST_CASE("zero placeholders get empty approximants") {
  TailSequence<double> seq;
  seq.dim = 2;
  seq.prefix = {unit<double>(2, 0), unit<double>(2, 1)};
  const auto z = build_z(Vec<double>::Zero(2), 2, seq, 0.3, kTol, 2);
  CHECK(z.coeffs.empty());
  CHECK(z.err == 0.0);
  CHECK(z.err < 0.3);
}

TEST_CASE("a tail vector approximates itself exactly") {
  TailSequence<double> seq;
  seq.dim = 3;
  for (Index i = 0; i < 3; ++i) seq.prefix.push_back(unit<double>(3, i));
  const auto z = build_z(unit<double>(3, 0), 1, seq, 0.5, kTol, 3);
  REQUIRE(z.coeffs.size() == 1);
  CHECK(z.coeffs[0].first == 1);
  CHECK(z.coeffs[0].second == Catch::Approx(1.0));
  CHECK(z.err <= 1e-14);
  CHECK(z.last_index() == 1);
}

TEST_CASE("the window grows until the accuracy target is met") {
  // u needs both tail vectors; a single-column window cannot reach err < eps
  TailSequence<double> seq;
  seq.dim = 2;
  seq.prefix = {make_vec<double>({1, 1}), make_vec<double>({1, -1})};
  const Vec<double> u = unit<double>(2, 0);
  const auto z = build_z(u, 1, seq, 0.1, kTol, 2);
  CHECK(z.last_index() == 2);
  CHECK(z.err <= 1e-14);
  // with a generous budget the first window already qualifies
  const auto loose = build_z(u, 1, seq, 0.9, kTol, 2);
  CHECK(loose.last_index() == 1);
  CHECK(loose.err > 0.0);
  CHECK(loose.err < 0.9 * kAccuracySafety + 1e-15);
}

TEST_CASE("infeasible window cap is a hard error") {
  TailSequence<double> seq;
  seq.dim = 2;
  seq.prefix = {unit<double>(2, 0), unit<double>(2, 1)};
  CHECK_THROWS_AS(build_z(unit<double>(2, 1), 1, seq, 1e-6, kTol, 1),
                  ValidationError);
  CHECK_THROWS_AS(build_z(unit<double>(2, 0), 4, seq, 0.5, kTol, 1),
                  ValidationError);
}

TEMPLATE_TEST_CASE("approximant laws on seeded random instances", "[approx]",
                   double, Complex) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    Rng meta(mix_seed(seed, 0xAB01));
    const Index d = 2 + static_cast<Index>(meta.next_u64() % 4);
    const Index m = d + static_cast<Index>(meta.next_u64() % 3);
    const Index p = static_cast<Index>(meta.next_u64() % 3);
    auto seq = random_sequence<TestType>(d, m, p, mix_seed(seed, 0xAB02));
    TailTower<TestType> tower;
    try {
      tower = build_tower(seq, kTol);
    } catch (const TotalityError&) {
      continue;
    }
    const auto sys = interleave(canonical_x(seq, tower, kTol), tower.h_inf);
    const auto sched = make_geometric_schedule(sys.size(), 0.5, 0.25);
    const Index max_tail = default_max_tail(seq, tower.h_inf.dim());

    for (Index n = 1; n <= sys.size(); ++n) {
      const double eps_n = sched.at(n);
      const auto z = build_z(sys.u_at(n), n, seq, eps_n, kTol, max_tail);

      // strict accuracy and the tail constraint
      CHECK(z.err < eps_n);
      CHECK(z.start == AdaptedSystem<TestType>::tail_start(n));
      for (const auto& [k, g] : z.coeffs) CHECK(k >= z.start);

      // stored error equals a direct recomputation
      const double recomputed =
          (sys.u_at(n) - z.reconstruct(seq)).norm();
      CHECK(std::abs(recomputed - z.err) <= 1e-12);

      if (sys.u_is_zero(n)) continue;

      // minimality: one column fewer misses the safety target
      if (z.last_index() > z.start) {
        const auto shorter = detail::tail_least_squares(
            sys.u_at(n), seq, z.start, z.last_index() - 1, kTol.rank_tol);
        CHECK(shorter.second >= kAccuracySafety * eps_n);
      }

      // errors are monotone in the window length
      double prev = std::numeric_limits<double>::infinity();
      for (Index last = z.start; last <= max_tail; ++last) {
        const auto fit = detail::tail_least_squares(sys.u_at(n), seq, z.start,
                                                    last, kTol.rank_tol);
        CHECK(fit.second <= prev + kTol.residual_tol);
        prev = fit.second;
      }
    }
  }
}
