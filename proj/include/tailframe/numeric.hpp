#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "tailframe/errors.hpp"

namespace tailframe {

template <typename T>
inline constexpr bool is_complex_v = false;
template <typename R>
inline constexpr bool is_complex_v<std::complex<R>> = true;

template <typename Scalar>
using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

// Thresholds for every rank decision and identity check in the construction.
// rank_tol decides when a residual counts as zero (relative to the candidate),
// residual_tol is the slack allowed when asserting exact identities, and
// neumann_tol bounds the truncation error of the geometric series evaluation.
struct ToleranceConfig {
  double rank_tol = 1e-10;
  double residual_tol = 1e-8;
  double neumann_tol = 1e-12;

  void validate() const {
    if (!(rank_tol > 0.0) || !(residual_tol > 0.0) || !(neumann_tol > 0.0)) {
      throw ValidationError("tolerances must be strictly positive");
    }
    if (rank_tol > residual_tol) {
      throw ValidationError("rank_tol must not exceed residual_tol");
    }
  }
};

namespace detail {

inline void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

inline std::string fmt_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace detail

// <u,v>, conjugate-linear in u and linear in v. Every coefficient formula in
// this library follows that convention.
template <typename Scalar>
Scalar inner(const Vec<Scalar>& u, const Vec<Scalar>& v) {
  detail::require(u.size() == v.size(), "inner: dimension mismatch");
  return u.dot(v);
}

// (a b^*) x = a <b, x>.
template <typename Scalar>
Vec<Scalar> rank_one_apply(const Vec<Scalar>& a, const Vec<Scalar>& b,
                           const Vec<Scalar>& x) {
  detail::require(a.size() == b.size() && b.size() == x.size(),
                  "rank_one_apply: dimension mismatch");
  return a * inner<Scalar>(b, x);
}

// Orthonormal spanning set of a subspace, stored column-wise together with
// the tolerances that produced it. An empty basis keeps its ambient
// dimension in the row count.
template <typename Scalar>
struct SubspaceBasis {
  Mat<Scalar> columns;
  ToleranceConfig built_with;

  Index ambient_dim() const { return columns.rows(); }
  Index dim() const { return columns.cols(); }
};

// Column Gram-Schmidt with a second orthogonalization pass per candidate.
// A candidate is dropped when its residual against the accepted columns is
// <= rank_tol * max(1, ||candidate||), so the rank decision is deterministic
// for a fixed input order and tolerance config.
template <typename Scalar>
SubspaceBasis<Scalar> orthonormalize(const std::vector<Vec<Scalar>>& vectors,
                                     Index ambient_dim,
                                     const ToleranceConfig& tol) {
  Mat<Scalar> basis(ambient_dim, 0);
  for (const auto& v : vectors) {
    detail::require(v.size() == ambient_dim,
                    "orthonormalize: dimension mismatch");
    Vec<Scalar> w = v;
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0) w -= (basis * (basis.adjoint() * w)).eval();
    }
    const double cutoff = tol.rank_tol * std::max(1.0, v.norm());
    if (w.norm() > cutoff) {
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = w / w.norm();
    }
  }
  return SubspaceBasis<Scalar>{std::move(basis), tol};
}

// P_S x = sum_j b_j <b_j, x>.
template <typename Scalar>
Vec<Scalar> project(const SubspaceBasis<Scalar>& basis, const Vec<Scalar>& x) {
  detail::require(x.size() == basis.ambient_dim(),
                  "project: dimension mismatch");
  if (basis.dim() == 0) return Vec<Scalar>::Zero(x.size());
  return basis.columns * (basis.columns.adjoint() * x);
}

// Largest singular value.
template <typename Scalar>
double operator_norm(const Mat<Scalar>& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat<Scalar>> svd(M);
  return svd.singularValues()(0);
}

namespace detail {

template <typename Scalar>
Vec<Scalar> solve_identity_minus_impl(const Mat<Scalar>& T,
                                      const Vec<Scalar>& b, double t_norm,
                                      const ToleranceConfig& tol) {
  if (t_norm >= 1.0) {
    throw ContractionError("solve_identity_minus: operator norm " +
                           fmt_value(t_norm) + " >= 1");
  }
  const Mat<Scalar> A =
      Mat<Scalar>::Identity(T.rows(), T.cols()) - T;
  Vec<Scalar> y = A.partialPivLu().solve(b);
  const double resid = (A * y - b).norm();
  if (resid > tol.residual_tol * std::max(1.0, b.norm())) {
    throw OracleError("solve_identity_minus: residual " + fmt_value(resid) +
                      " exceeds tolerance");
  }
  return y;
}

}  // namespace detail

// Solves (I - T) y = b by a direct factorization, rejecting T with norm >= 1
// so that the geometric-series route stays applicable to the same operator.
// This is the reference side of the two-route inversion check.
template <typename Scalar>
Vec<Scalar> solve_identity_minus(const Mat<Scalar>& T, const Vec<Scalar>& b,
                                 const ToleranceConfig& tol) {
  detail::require(T.rows() == T.cols() && T.rows() == b.size(),
                  "solve_identity_minus: dimension mismatch");
  return detail::solve_identity_minus_impl(T, b, operator_norm(T), tol);
}

}  // namespace tailframe
