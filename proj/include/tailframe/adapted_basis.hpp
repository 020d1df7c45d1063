#pragma once

#include <utility>
#include <vector>

#include "tailframe/tail_tower.hpp"

namespace tailframe {

template <typename Scalar>
bool is_zero_vector(const Vec<Scalar>& v) {
  return v.isZero(0.0);
}

// Interleaving u of the normalized tail residuals x_n with an orthonormal
// basis y of the stable tail space: u_{2j-1} = x_j, u_{2j} = y_j, with exact
// zero placeholders where either side runs out. Placeholders are kept so the
// index map n -> ceil(n/2) stays intact; downstream sums skip them.
template <typename Scalar>
struct AdaptedSystem {
  std::vector<Vec<Scalar>> x;
  SubspaceBasis<Scalar> y;
  std::vector<Vec<Scalar>> u;

  static Index tail_start(Index n) { return (n + 1) / 2; }

  Index size() const { return static_cast<Index>(u.size()); }
  Index ambient_dim() const { return y.ambient_dim(); }

  const Vec<Scalar>& u_at(Index n) const {
    if (n < 1 || n > size()) {
      throw std::out_of_range("AdaptedSystem::u_at: index out of range");
    }
    return u[static_cast<std::size_t>(n - 1)];
  }

  bool u_is_zero(Index n) const { return is_zero_vector(u_at(n)); }

  Index nonzero_count() const {
    Index c = 0;
    for (const auto& v : u) {
      if (!is_zero_vector(v)) ++c;
    }
    return c;
  }
};

// x_n = normalized residual of v_n against H_{n+1}, or an exact zero when the
// residual falls under the rank cutoff. The nonzero x_n are an orthonormal
// basis of the orthogonal complement of the stable tail space.
template <typename Scalar>
std::vector<Vec<Scalar>> canonical_x(const TailSequence<Scalar>& seq,
                                     const TailTower<Scalar>& tower,
                                     const ToleranceConfig& tol) {
  const Index m = seq.prefix_len();
  std::vector<Vec<Scalar>> xs;
  xs.reserve(static_cast<std::size_t>(m));
  for (Index n = 1; n <= m; ++n) {
    const Vec<Scalar> v = seq.at(n);
    const Vec<Scalar> r = v - project(tower.at(n + 1), v);
    const double cutoff = tol.rank_tol * std::max(1.0, v.norm());
    if (r.norm() > cutoff) {
      xs.push_back(r / r.norm());
    } else {
      xs.push_back(Vec<Scalar>::Zero(seq.dim));
    }
  }
  return xs;
}

template <typename Scalar>
AdaptedSystem<Scalar> interleave(std::vector<Vec<Scalar>> x,
                                 SubspaceBasis<Scalar> y) {
  const Index m = static_cast<Index>(x.size());
  const Index q = y.dim();
  const Index d = y.ambient_dim();
  const Index pairs = std::max(m, q);
  AdaptedSystem<Scalar> sys{std::move(x), std::move(y), {}};
  sys.u.reserve(static_cast<std::size_t>(2 * pairs));
  for (Index j = 1; j <= pairs; ++j) {
    sys.u.push_back(j <= m ? sys.x[static_cast<std::size_t>(j - 1)]
                           : Vec<Scalar>::Zero(d));
    sys.u.push_back(j <= q ? Vec<Scalar>(sys.y.columns.col(j - 1))
                           : Vec<Scalar>::Zero(d));
  }
  return sys;
}

// ||u_n - P_{H_{ceil(n/2)}} u_n||; zero within residual_tol on every valid
// system, since each u_n lives in its tail space by construction.
template <typename Scalar>
double membership_residual(const AdaptedSystem<Scalar>& sys,
                           const TailTower<Scalar>& tower, Index n) {
  const Vec<Scalar>& un = sys.u_at(n);
  return (un - project(tower.at(AdaptedSystem<Scalar>::tail_start(n)), un))
      .norm();
}

}  // namespace tailframe
