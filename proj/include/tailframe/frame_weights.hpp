#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "tailframe/approximants.hpp"
#include "tailframe/random.hpp"
#include "tailframe/resolution.hpp"

namespace tailframe {

enum class WeightKind { dyadic, explicit_list };

// Positive weights a_k, k = 1..k_max, with k_max covering every tail index
// that carries an approximant coefficient.
struct WeightSequence {
  WeightKind kind = WeightKind::dyadic;
  std::vector<double> values;

  Index k_max() const { return static_cast<Index>(values.size()); }
  double at(Index k) const {
    if (k < 1 || k > k_max()) {
      throw std::out_of_range("WeightSequence::at: index out of range");
    }
    return values[static_cast<std::size_t>(k - 1)];
  }
};

// a_k = 2^k.
inline WeightSequence make_dyadic_weights(Index k_max) {
  if (k_max < 1) throw ValidationError("weights need at least one entry");
  WeightSequence a{WeightKind::dyadic, {}};
  a.values.reserve(static_cast<std::size_t>(k_max));
  for (Index k = 1; k <= k_max; ++k) {
    a.values.push_back(std::ldexp(1.0, static_cast<int>(k)));
  }
  return a;
}

inline WeightSequence make_explicit_weights(std::vector<double> values) {
  if (values.empty()) throw ValidationError("weights need at least one entry");
  for (double v : values) {
    if (!(v > 0.0)) {
      throw ValidationError("weights must be strictly positive");
    }
  }
  return WeightSequence{WeightKind::explicit_list, std::move(values)};
}

// Largest tail index that carries a stored coefficient; at least 1.
template <typename Scalar>
Index max_used_tail_index(const std::vector<Approximant<Scalar>>& zs) {
  Index k = 1;
  for (const auto& z : zs) {
    if (!z.coeffs.empty()) k = std::max(k, z.coeffs.back().first);
  }
  return k;
}

// C(a) = sum_n 2^n ||w_n||^2 sum_k |gamma_k^(n)|^2 / a_k over the stored,
// finite coefficient lists; placeholder indices contribute nothing.
template <typename Scalar>
double constant_C(const WeightSequence& a, const DualSystem<Scalar>& duals,
                  const std::vector<Approximant<Scalar>>& zs) {
  double c = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const auto& z = zs[i];
    if (z.coeffs.empty()) continue;
    const Index n = z.n;
    double inner_sum = 0.0;
    for (const auto& [k, g] : z.coeffs) {
      inner_sum += std::norm(std::complex<double>(g)) / a.at(k);
    }
    const double wn2 = duals.w_at(n).squaredNorm();
    c += std::ldexp(1.0, static_cast<int>(n)) * wn2 * inner_sum;
  }
  if (!(c > 0.0)) {
    throw ValidationError("constant_C: certificate constant is not positive");
  }
  return c;
}

// Worst ratio ||x||^2 / (C(a) * sum_{k<=k_max} a_k |<v_k,x>|^2) over seeded
// unit samples; at most 1 (plus tolerance) when the certificate holds.
// Truncating the sum at k_max only shrinks the denominator, so a passing
// truncated check implies the untruncated inequality.
template <typename Scalar>
double weighted_frame_check(const WeightSequence& a, double C_a,
                            const TailSequence<Scalar>& seq, Index samples,
                            std::uint64_t seed) {
  std::vector<Vec<Scalar>> tail;
  tail.reserve(static_cast<std::size_t>(a.k_max()));
  for (Index k = 1; k <= a.k_max(); ++k) tail.push_back(seq.at(k));
  const double worst = parallel_max(samples, [&](Index i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    const Vec<Scalar> x = random_unit_vector<Scalar>(rng, seq.dim);
    double rhs = 0.0;
    for (Index k = 1; k <= a.k_max(); ++k) {
      rhs += a.at(k) * std::norm(std::complex<double>(
                           inner<Scalar>(tail[static_cast<std::size_t>(k - 1)], x)));
    }
    if (!(rhs > 0.0)) return std::numeric_limits<double>::infinity();
    return 1.0 / (C_a * rhs);
  });
  if (std::isinf(worst)) {
    throw TotalityError(
        "weighted_frame_check: a sample is orthogonal to every tail vector");
  }
  return worst;
}

// Tail-localized weights and their relaxed-exponent majorant. Indices where
// no stored coefficient contributes keep lambda = 0 and are flagged.
struct LambdaCertificate {
  std::vector<double> lambda;
  std::vector<double> bound;
  std::vector<bool> contributing;
};

// lambda_k = sum over n with ceil(n/2) <= k of
//   2^(n + k - ceil(n/2) + 1) ||w_n||^2 |gamma_k^(n)|^2,
// bound_k uses the relaxed exponent k + n/2 + 1.
template <typename Scalar>
LambdaCertificate explicit_lambda(const DualSystem<Scalar>& duals,
                                  const std::vector<Approximant<Scalar>>& zs,
                                  Index k_max) {
  LambdaCertificate cert;
  cert.lambda.assign(static_cast<std::size_t>(k_max), 0.0);
  cert.bound.assign(static_cast<std::size_t>(k_max), 0.0);
  cert.contributing.assign(static_cast<std::size_t>(k_max), false);
  for (const auto& z : zs) {
    if (z.coeffs.empty()) continue;
    const Index n = z.n;
    const double wn2 = duals.w_at(n).squaredNorm();
    for (const auto& [k, g] : z.coeffs) {
      const double g2 = std::norm(std::complex<double>(g));
      const int exponent = static_cast<int>(n + k - z.start + 1);
      const std::size_t idx = static_cast<std::size_t>(k - 1);
      cert.lambda[idx] += std::ldexp(wn2 * g2, exponent);
      cert.bound[idx] +=
          wn2 * g2 *
          std::pow(2.0, static_cast<double>(k) + static_cast<double>(n) / 2.0 +
                            1.0);
      cert.contributing[idx] = true;
    }
  }
  return cert;
}

// lambda_min(sum_k lambda_k v_k v_k^*) - 1. The lower frame inequality for
// every x is equivalent to a nonnegative slack once k_max covers all stored
// coefficients (extra indices only add positive semidefinite terms).
template <typename Scalar>
double frame_operator_eig_check(const std::vector<double>& lambda,
                                const TailSequence<Scalar>& seq) {
  const Index d = seq.dim;
  Mat<Scalar> S = Mat<Scalar>::Zero(d, d);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const Vec<Scalar> v = seq.at(static_cast<Index>(i) + 1);
    S += lambda[i] * (v * v.adjoint());
  }
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(S,
                                                Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() - 1.0;
}

}  // namespace tailframe
