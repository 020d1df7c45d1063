#pragma once

#include <utility>
#include <vector>

#include "tailframe/adapted_basis.hpp"
#include "tailframe/approximants.hpp"

namespace tailframe {

// T = sum over nonzero u_n of the rank-one term u_n (u_n - z_n)^*, a strict
// contraction whenever the accuracy budget satisfies sum eps_n^2 < 1.
template <typename Scalar>
struct PerturbationOperator {
  Mat<Scalar> T;
  double norm = 0.0;
  double bound = 0.0;  // sqrt(sum eps_n^2)
};

template <typename Scalar>
PerturbationOperator<Scalar> assemble_T(
    const AdaptedSystem<Scalar>& sys,
    const std::vector<Approximant<Scalar>>& zs, const TailSequence<Scalar>& seq,
    const EpsilonSchedule& eps) {
  const Index count = sys.size();
  if (static_cast<Index>(zs.size()) != count || eps.count() != count) {
    throw ValidationError("assemble_T: approximants not aligned with system");
  }
  const Index d = sys.ambient_dim();
  Mat<Scalar> T = Mat<Scalar>::Zero(d, d);
  for (Index n = 1; n <= count; ++n) {
    if (sys.u_is_zero(n)) continue;
    const auto& z = zs[static_cast<std::size_t>(n - 1)];
    if (!(z.err < eps.at(n))) {
      throw ValidationError("assemble_T: approximant " + std::to_string(n) +
                            " misses its accuracy target");
    }
    const Vec<Scalar>& un = sys.u_at(n);
    const Vec<Scalar> diff = un - z.reconstruct(seq);
    T += un * diff.adjoint();
  }
  PerturbationOperator<Scalar> pert{std::move(T), 0.0,
                                    std::sqrt(eps.sum_sq)};
  pert.norm = operator_norm(pert.T);
  if (pert.norm >= 1.0) {
    throw ContractionError("perturbation operator norm " +
                           detail::fmt_value(pert.norm) +
                           " >= 1; the accuracy schedule is broken");
  }
  return pert;
}

// || sum_n u_n z_n^* - (I - T) ||, exact algebra up to roundoff: the mixed
// sum differs from the pure projection sum exactly by T.
template <typename Scalar>
double mixed_series_check(const AdaptedSystem<Scalar>& sys,
                          const std::vector<Approximant<Scalar>>& zs,
                          const TailSequence<Scalar>& seq,
                          const PerturbationOperator<Scalar>& pert) {
  const Index d = sys.ambient_dim();
  Mat<Scalar> mixed = Mat<Scalar>::Zero(d, d);
  for (Index n = 1; n <= sys.size(); ++n) {
    if (sys.u_is_zero(n)) continue;
    const Vec<Scalar> z = zs[static_cast<std::size_t>(n - 1)].reconstruct(seq);
    mixed += sys.u_at(n) * z.adjoint();
  }
  const Mat<Scalar> expected =
      Mat<Scalar>::Identity(d, d) - pert.T;
  return operator_norm<Scalar>(mixed - expected);
}

// Truncated geometric series sum_{j<=M} T^j b, with M chosen from the
// a-priori tail bound norm^{M+1} / (1 - norm) * ||b|| <= tail_tol.
template <typename Scalar>
Vec<Scalar> neumann_inverse_apply(const Mat<Scalar>& T, double norm,
                                  const Vec<Scalar>& b, double tail_tol) {
  if (norm >= 1.0) {
    throw ContractionError("neumann_inverse_apply: norm >= 1");
  }
  Vec<Scalar> sum = b;
  if (norm <= 0.0 || b.norm() == 0.0) return sum;
  Index terms = 0;
  double tail = norm / (1.0 - norm) * b.norm();
  while (tail > tail_tol) {
    tail *= norm;
    ++terms;
  }
  Vec<Scalar> power = b;
  for (Index j = 1; j <= terms; ++j) {
    power = T * power;
    sum += power;
  }
  return sum;
}

// Dual family w_n = (I - T)^{-1} u_n, aligned with u including placeholders.
// resolution_residual measures || sum_n w_n z_n^* - I || in operator norm;
// neumann_gap is the worst disagreement between the direct solve and the
// truncated series evaluation of the same w_n.
template <typename Scalar>
struct DualSystem {
  std::vector<Vec<Scalar>> w;
  double resolution_residual = 0.0;
  double neumann_gap = 0.0;

  const Vec<Scalar>& w_at(Index n) const {
    if (n < 1 || n > static_cast<Index>(w.size())) {
      throw std::out_of_range("DualSystem::w_at: index out of range");
    }
    return w[static_cast<std::size_t>(n - 1)];
  }
};

template <typename Scalar>
DualSystem<Scalar> dual_vectors(const PerturbationOperator<Scalar>& pert,
                                const AdaptedSystem<Scalar>& sys,
                                const std::vector<Approximant<Scalar>>& zs,
                                const TailSequence<Scalar>& seq,
                                const ToleranceConfig& tol) {
  const Index d = sys.ambient_dim();
  DualSystem<Scalar> duals;
  duals.w.reserve(static_cast<std::size_t>(sys.size()));
  for (Index n = 1; n <= sys.size(); ++n) {
    if (sys.u_is_zero(n)) {
      duals.w.push_back(Vec<Scalar>::Zero(d));
      continue;
    }
    const Vec<Scalar>& un = sys.u_at(n);
    Vec<Scalar> w =
        detail::solve_identity_minus_impl(pert.T, un, pert.norm, tol);
    const Vec<Scalar> series =
        neumann_inverse_apply(pert.T, pert.norm, un, tol.neumann_tol);
    const double gap = (w - series).norm();
    if (gap > 10.0 * tol.neumann_tol) {
      throw OracleError("dual_vectors: series evaluation and direct solve "
                        "disagree by " +
                        detail::fmt_value(gap));
    }
    duals.neumann_gap = std::max(duals.neumann_gap, gap);
    duals.w.push_back(std::move(w));
  }
  Mat<Scalar> resolution = Mat<Scalar>::Zero(d, d);
  for (Index n = 1; n <= sys.size(); ++n) {
    if (sys.u_is_zero(n)) continue;
    const Vec<Scalar> z = zs[static_cast<std::size_t>(n - 1)].reconstruct(seq);
    resolution += duals.w_at(n) * z.adjoint();
  }
  duals.resolution_residual = operator_norm<Scalar>(
      Mat<Scalar>(resolution - Mat<Scalar>::Identity(d, d)));
  return duals;
}

// ||x - S_N x|| for S_N = sum_{n<=N} u_n u_n^*, checked on the fly against
// the tail identity ||x - S_N x||^2 = sum_{n>N} |<u_n,x>|^2.
template <typename Scalar>
double parseval_partial(const AdaptedSystem<Scalar>& sys, Index N,
                        const Vec<Scalar>& x, const ToleranceConfig& tol) {
  detail::require(N >= 0, "parseval_partial: N must be >= 0");
  Vec<Scalar> acc = Vec<Scalar>::Zero(x.size());
  for (Index n = 1; n <= std::min(N, sys.size()); ++n) {
    const Vec<Scalar>& un = sys.u_at(n);
    acc += un * inner<Scalar>(un, x);
  }
  const double resid = (x - acc).norm();
  double tail_sq = 0.0;
  for (Index n = N + 1; n <= sys.size(); ++n) {
    tail_sq += std::norm(std::complex<double>(inner<Scalar>(sys.u_at(n), x)));
  }
  const double tail = std::sqrt(tail_sq);
  if (std::abs(resid - tail) > tol.residual_tol * std::max(1.0, x.norm())) {
    throw OracleError(
        "parseval_partial: residual and tail sum disagree at N = " +
        std::to_string(N));
  }
  return resid;
}

}  // namespace tailframe
