#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "tailframe/numeric.hpp"

namespace tailframe {

// splitmix64 step; used to derive independent per-stream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded generator with a fixed uniform/gaussian construction, so sampled
// values do not depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Box-Muller with a cached second value.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

template <typename Scalar>
Vec<Scalar> gaussian_vector(Rng& rng, Index d) {
  Vec<Scalar> v(d);
  for (Index i = 0; i < d; ++i) {
    if constexpr (is_complex_v<Scalar>) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      v(i) = Scalar(re, im);
    } else {
      v(i) = rng.gaussian();
    }
  }
  return v;
}

template <typename Scalar>
Vec<Scalar> random_unit_vector(Rng& rng, Index d) {
  for (;;) {
    Vec<Scalar> v = gaussian_vector<Scalar>(rng, d);
    const double norm = v.norm();
    if (norm > 1e-6) return v / norm;
  }
}

// Worker cap: TAILFRAME_THREADS when set, otherwise hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("TAILFRAME_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(std::min(v, 256L));
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

// Order-independent max reduction over fn(0..count-1). Each index must seed
// its own generator, so chunking across workers cannot change the result.
template <typename Fn>
double parallel_max(Index count, Fn&& fn) {
  const int workers =
      static_cast<int>(std::min<Index>(worker_count(), std::max<Index>(count / 64, 1)));
  if (workers <= 1) {
    double best = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < count; ++i) best = std::max(best, fn(i));
    return best;
  }
  std::vector<double> partial(static_cast<std::size_t>(workers),
                              -std::numeric_limits<double>::infinity());
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      double best = -std::numeric_limits<double>::infinity();
      for (Index i = t; i < count; i += workers) best = std::max(best, fn(i));
      partial[static_cast<std::size_t>(t)] = best;
    });
  }
  for (auto& th : pool) th.join();
  double best = -std::numeric_limits<double>::infinity();
  for (double p : partial) best = std::max(best, p);
  return best;
}

template <typename Fn>
double parallel_min(Index count, Fn&& fn) {
  return -parallel_max(count, [&](Index i) { return -fn(i); });
}

}  // namespace tailframe
