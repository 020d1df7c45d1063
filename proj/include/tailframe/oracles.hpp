#pragma once

// Reference routes used only for verification. These are deliberately
// different algorithms from the construction path: singular-value and
// eigenvalue decompositions instead of Gram-Schmidt, naive double loops
// instead of skip-zero sums, reversed summation orders. Agreement between
// the two routes is the evidence the certificates rest on.

#include <vector>

#include "tailframe/frame_weights.hpp"
#include "tailframe/random.hpp"
#include "tailframe/resolution.hpp"

namespace tailframe::oracles {

// Rank by singular-value thresholding of the stacked column matrix.
template <typename Scalar>
Index rank(const std::vector<Vec<Scalar>>& vectors, Index ambient_dim,
           double rank_tol) {
  if (vectors.empty()) return 0;
  Mat<Scalar> stacked(ambient_dim, static_cast<Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    stacked.col(static_cast<Index>(j)) = vectors[j];
  }
  Eigen::JacobiSVD<Mat<Scalar>> svd(stacked);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rank_tol * sv(0)) ++r;
  }
  return r;
}

// Largest singular value via the top eigenvalue of M^H M.
template <typename Scalar>
double operator_norm(const Mat<Scalar>& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  const Mat<Scalar> gram = M.adjoint() * M;
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(gram, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(top, 0.0));
}

// Naive double loop over every (index, tail index) pair, zero terms included.
template <typename Scalar>
std::vector<double> lambda(const DualSystem<Scalar>& duals,
                           const std::vector<Approximant<Scalar>>& zs,
                           Index k_max) {
  std::vector<double> lam(static_cast<std::size_t>(k_max), 0.0);
  for (Index k = 1; k <= k_max; ++k) {
    double acc = 0.0;
    for (const auto& z : zs) {
      const Index n = z.n;
      const Index start = AdaptedSystem<Scalar>::tail_start(n);
      if (start > k) continue;
      const double g2 = std::norm(std::complex<double>(z.gamma_at(k)));
      const double wn2 = duals.w_at(n).squaredNorm();
      acc += std::ldexp(wn2 * g2, static_cast<int>(n + k - start + 1));
    }
    lam[static_cast<std::size_t>(k - 1)] = acc;
  }
  return lam;
}

// C(a) recomputed with both loops reversed.
template <typename Scalar>
double constant_C_reversed(const WeightSequence& a,
                           const DualSystem<Scalar>& duals,
                           const std::vector<Approximant<Scalar>>& zs) {
  double c = 0.0;
  for (auto it = zs.rbegin(); it != zs.rend(); ++it) {
    const auto& z = *it;
    if (z.coeffs.empty()) continue;
    double inner_sum = 0.0;
    for (auto ct = z.coeffs.rbegin(); ct != z.coeffs.rend(); ++ct) {
      inner_sum += std::norm(std::complex<double>(ct->second)) / a.at(ct->first);
    }
    c += std::ldexp(1.0, static_cast<int>(z.n)) *
         duals.w_at(z.n).squaredNorm() * inner_sum;
  }
  return c;
}

// min over seeded unit samples of sum_k lambda_k |<v_k,x>|^2 - 1; an upper
// bound on the exact eigenvalue slack.
template <typename Scalar>
double sampled_frame_slack(const std::vector<double>& lambda,
                           const TailSequence<Scalar>& seq, Index samples,
                           std::uint64_t seed) {
  std::vector<Vec<Scalar>> tail;
  tail.reserve(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    tail.push_back(seq.at(static_cast<Index>(i) + 1));
  }
  return parallel_min(samples, [&](Index i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    const Vec<Scalar> x = random_unit_vector<Scalar>(rng, seq.dim);
    double quad = 0.0;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
      quad += lambda[k] *
              std::norm(std::complex<double>(inner<Scalar>(tail[k], x)));
    }
    return quad - 1.0;
  });
}

}  // namespace tailframe::oracles
