#pragma once

#include <utility>
#include <vector>

#include "tailframe/numeric.hpp"

namespace tailframe {

// A vector family given as a finite prefix followed by a block that repeats
// forever. An empty cycle encodes a finite family padded with zeros, so the
// tail spaces eventually hit {0}; a nonempty cycle makes them stabilize at
// the span of the block.
template <typename Scalar>
struct TailSequence {
  Index dim = 0;
  std::vector<Vec<Scalar>> prefix;
  std::vector<Vec<Scalar>> cycle;

  Index prefix_len() const { return static_cast<Index>(prefix.size()); }
  Index cycle_len() const { return static_cast<Index>(cycle.size()); }

  // v_k, 1-based.
  Vec<Scalar> at(Index k) const {
    detail::require(k >= 1, "TailSequence::at: index must be >= 1");
    const Index m = prefix_len();
    if (k <= m) return prefix[static_cast<std::size_t>(k - 1)];
    if (!cycle.empty()) {
      return cycle[static_cast<std::size_t>((k - m - 1) % cycle_len())];
    }
    return Vec<Scalar>::Zero(dim);
  }

  // prefix followed by the cycle block, the generating set of H_1.
  std::vector<Vec<Scalar>> generators() const {
    std::vector<Vec<Scalar>> all = prefix;
    all.insert(all.end(), cycle.begin(), cycle.end());
    return all;
  }
};

template <typename Scalar>
Vec<Scalar> vector_at(const TailSequence<Scalar>& seq, Index k) {
  return seq.at(k);
}

// The decreasing tower H_n = span{v_k : k >= n} for n = 1..m+1, plus the
// stable tail space H_inf = span(cycle). Tails beyond m+1 equal H_inf.
template <typename Scalar>
struct TailTower {
  std::vector<SubspaceBasis<Scalar>> bases;
  SubspaceBasis<Scalar> h_inf;
  Index stab_index = 1;

  const SubspaceBasis<Scalar>& at(Index n) const {
    detail::require(n >= 1, "TailTower::at: index must be >= 1");
    if (n <= static_cast<Index>(bases.size())) {
      return bases[static_cast<std::size_t>(n - 1)];
    }
    return h_inf;
  }

  std::vector<Index> dims() const {
    std::vector<Index> d;
    d.reserve(bases.size());
    for (const auto& b : bases) d.push_back(b.dim());
    return d;
  }
};

template <typename Scalar>
TailTower<Scalar> build_tower(const TailSequence<Scalar>& seq,
                              const ToleranceConfig& tol) {
  tol.validate();
  const Index m = seq.prefix_len();
  TailTower<Scalar> tower;
  tower.bases.reserve(static_cast<std::size_t>(m) + 1);
  for (Index n = 1; n <= m + 1; ++n) {
    std::vector<Vec<Scalar>> gens;
    gens.reserve(static_cast<std::size_t>(m - n + 1) + seq.cycle.size());
    for (Index k = n; k <= m; ++k) gens.push_back(seq.at(k));
    gens.insert(gens.end(), seq.cycle.begin(), seq.cycle.end());
    tower.bases.push_back(orthonormalize<Scalar>(gens, seq.dim, tol));
  }
  tower.h_inf = tower.bases.back();
  if (tower.bases.front().dim() != seq.dim) {
    throw TotalityError("sequence is not total: rank " +
                        std::to_string(tower.bases.front().dim()) +
                        " < ambient dimension " + std::to_string(seq.dim));
  }
  tower.stab_index = m + 1;
  for (Index n = 1; n <= m + 1; ++n) {
    if (tower.at(n).dim() == tower.h_inf.dim()) {
      tower.stab_index = n;
      break;
    }
  }
  return tower;
}

// dim(H_n) - dim(H_{n+1}), always 0 or 1; equals 1 exactly when v_n leaves a
// nonzero residual against the next tail space.
template <typename Scalar>
Index succ_diff_dim(const TailTower<Scalar>& tower, Index n) {
  if (n < 1 || n + 1 > static_cast<Index>(tower.bases.size())) {
    throw std::out_of_range("succ_diff_dim: index out of range");
  }
  return tower.at(n).dim() - tower.at(n + 1).dim();
}

}  // namespace tailframe
