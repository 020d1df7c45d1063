#pragma once

#include <utility>
#include <vector>

#include "tailframe/tail_tower.hpp"
#include "tailframe/adapted_basis.hpp"

namespace tailframe {

enum class ScheduleKind { geometric, explicit_list };

// Per-index accuracy targets eps_n with sum of squares strictly below 1.
struct EpsilonSchedule {
  ScheduleKind kind = ScheduleKind::geometric;
  std::vector<double> values;
  double sum_sq = 0.0;

  double at(Index n) const {
    if (n < 1 || n > static_cast<Index>(values.size())) {
      throw std::out_of_range("EpsilonSchedule::at: index out of range");
    }
    return values[static_cast<std::size_t>(n - 1)];
  }
  Index count() const { return static_cast<Index>(values.size()); }
};

// eps_n = c * ratio^n with c chosen so the squares sum to `mass`.
inline EpsilonSchedule make_geometric_schedule(Index count, double ratio,
                                               double mass) {
  if (count < 1) throw ValidationError("schedule needs at least one entry");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError("geometric schedule ratio must lie in (0,1)");
  }
  if (!(mass > 0.0 && mass < 1.0)) {
    throw ValidationError(
        "geometric schedule mass (sum of squared accuracies) must lie in "
        "(0,1)");
  }
  double q = 0.0;
  double r2n = 1.0;
  for (Index n = 1; n <= count; ++n) {
    r2n *= ratio * ratio;
    q += r2n;
  }
  const double c = std::sqrt(mass / q);
  EpsilonSchedule sched;
  sched.kind = ScheduleKind::geometric;
  sched.values.reserve(static_cast<std::size_t>(count));
  double rn = 1.0;
  for (Index n = 1; n <= count; ++n) {
    rn *= ratio;
    sched.values.push_back(c * rn);
  }
  for (double e : sched.values) sched.sum_sq += e * e;
  return sched;
}

inline EpsilonSchedule make_explicit_schedule(std::vector<double> values) {
  if (values.empty()) throw ValidationError("schedule needs at least one entry");
  double sum_sq = 0.0;
  for (double e : values) {
    if (!(e > 0.0)) {
      throw ValidationError("accuracy values must be strictly positive");
    }
    sum_sq += e * e;
  }
  if (!(sum_sq < 1.0)) {
    throw ValidationError("sum of squared accuracies must be < 1, got " +
                          detail::fmt_value(sum_sq));
  }
  return EpsilonSchedule{ScheduleKind::explicit_list, std::move(values),
                         sum_sq};
}

// Keeps the realized error strictly inside the accuracy budget so the strict
// inequality err_n < eps_n survives roundoff.
inline constexpr double kAccuracySafety = 0.9;

// Tail-supported finite combination z_n = sum_{k in [start, K]} gamma_k v_k
// with realized error ||u_n - z_n|| recorded exactly.
template <typename Scalar>
struct Approximant {
  Index n = 0;
  Index start = 0;
  std::vector<std::pair<Index, Scalar>> coeffs;
  double err = 0.0;

  Vec<Scalar> reconstruct(const TailSequence<Scalar>& seq) const {
    Vec<Scalar> z = Vec<Scalar>::Zero(seq.dim);
    for (const auto& [k, g] : coeffs) z += g * seq.at(k);
    return z;
  }

  Scalar gamma_at(Index k) const {
    for (const auto& [kk, g] : coeffs) {
      if (kk == k) return g;
    }
    return Scalar(0);
  }

  // K(n); start - 1 when no coefficients are stored.
  Index last_index() const {
    return coeffs.empty() ? start - 1 : coeffs.back().first;
  }
};

namespace detail {

template <typename Scalar>
std::pair<Vec<Scalar>, double> tail_least_squares(const Vec<Scalar>& target,
                                                  const TailSequence<Scalar>& seq,
                                                  Index start, Index last,
                                                  double rank_tol) {
  Mat<Scalar> window(seq.dim, last - start + 1);
  for (Index k = start; k <= last; ++k) {
    window.col(k - start) = seq.at(k);
  }
  Eigen::JacobiSVD<Mat<Scalar>> svd(window,
                                    Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rank_tol);
  Vec<Scalar> gamma = svd.solve(target);
  const double err = (target - window * gamma).norm();
  return {std::move(gamma), err};
}

}  // namespace detail

// Finds the shortest tail window [start, K] whose minimum-norm least-squares
// fit of u_n lands under kAccuracySafety * eps_n. The minimum-norm solution
// fixes gamma uniquely even when the window repeats cycle vectors.
template <typename Scalar>
Approximant<Scalar> build_z(const Vec<Scalar>& u_n, Index n,
                            const TailSequence<Scalar>& seq, double eps_n,
                            const ToleranceConfig& tol, Index max_tail) {
  const Index start = AdaptedSystem<Scalar>::tail_start(n);
  if (is_zero_vector(u_n)) {
    return Approximant<Scalar>{n, start, {}, 0.0};
  }
  if (max_tail < start) {
    throw ValidationError("build_z: tail window cap " +
                          std::to_string(max_tail) +
                          " is below the first admissible index " +
                          std::to_string(start));
  }
  for (Index last = start; last <= max_tail; ++last) {
    auto [gamma, err] =
        detail::tail_least_squares(u_n, seq, start, last, tol.rank_tol);
    if (err < kAccuracySafety * eps_n) {
      Approximant<Scalar> z{n, start, {}, err};
      z.coeffs.reserve(static_cast<std::size_t>(gamma.size()));
      for (Index i = 0; i < gamma.size(); ++i) {
        z.coeffs.emplace_back(start + i, gamma(i));
      }
      return z;
    }
  }
  throw ValidationError(
      "build_z: no tail window up to " + std::to_string(max_tail) +
      " reaches the accuracy target " + detail::fmt_value(eps_n));
}

// Tail window cap large enough that every admissible start index sees a full
// cycle period: spans stop growing one period past max(prefix, pair count).
template <typename Scalar>
Index default_max_tail(const TailSequence<Scalar>& seq, Index y_dim) {
  return std::max(seq.prefix_len(), y_dim) + seq.cycle_len();
}

}  // namespace tailframe
