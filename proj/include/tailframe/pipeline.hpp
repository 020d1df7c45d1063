#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tailframe/adapted_basis.hpp"
#include "tailframe/approximants.hpp"
#include "tailframe/frame_weights.hpp"
#include "tailframe/instance.hpp"
#include "tailframe/oracles.hpp"
#include "tailframe/resolution.hpp"
#include "tailframe/tail_tower.hpp"

namespace tailframe {

// One measured property: pass/fail is always derived from the stored value
// and threshold, never asserted separately.
struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string cmp;  // "le", "ge", "lt", "gt", "eq"
  bool pass = false;
  bool oracle = false;  // two-route agreement check
};

struct CheckList {
  std::vector<CheckResult> items;

  void add(std::string name, double measured, double threshold,
           std::string cmp, bool oracle = false) {
    bool pass = false;
    if (cmp == "le") pass = measured <= threshold;
    else if (cmp == "ge") pass = measured >= threshold;
    else if (cmp == "lt") pass = measured < threshold;
    else if (cmp == "gt") pass = measured > threshold;
    else if (cmp == "eq") pass = measured == threshold;
    else throw std::invalid_argument("CheckList: unknown comparison");
    items.push_back(CheckResult{std::move(name), measured, threshold,
                                std::move(cmp), pass, oracle});
  }

  bool all_pass() const {
    for (const auto& c : items) {
      if (!c.pass) return false;
    }
    return true;
  }

  bool oracle_failure() const {
    for (const auto& c : items) {
      if (c.oracle && !c.pass) return true;
    }
    return false;
  }

  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : items) {
      if (!c.pass) out.push_back(c.name);
    }
    return out;
  }
};

struct BuildOptions {
  Index samples = 1000;
  std::optional<std::uint64_t> seed_override;
};

template <typename Scalar>
struct PipelineResult {
  TailSequence<Scalar> seq;
  TailTower<Scalar> tower;
  AdaptedSystem<Scalar> sys;
  EpsilonSchedule eps;
  std::vector<Approximant<Scalar>> zs;
  Index max_tail = 0;
  PerturbationOperator<Scalar> pert;
  double mixed_residual = 0.0;
  double parseval_op_residual = 0.0;
  DualSystem<Scalar> duals;
  WeightSequence weights;
  Index k_used = 0;
  double C_a = 0.0;
  LambdaCertificate lam;
  double eig_slack = 0.0;         // tail-localized dyadic certificate
  double eig_slack_scaled = 0.0;  // C(a) * a_k certificate
  double worst_ratio = 0.0;
  Index samples = 0;
  std::uint64_t sample_seed = 0;
  double fubini_gap = 0.0;
  CheckList checks;
};

namespace detail {

inline double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

template <typename Scalar>
Mat<Scalar> stack_columns(const std::vector<Vec<Scalar>>& vectors, Index d) {
  Mat<Scalar> M(d, static_cast<Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    M.col(static_cast<Index>(j)) = vectors[j];
  }
  return M;
}

}  // namespace detail

template <typename Scalar>
PipelineResult<Scalar> run_pipeline(const Instance& inst,
                                    const BuildOptions& opt = {}) {
  PipelineResult<Scalar> r;
  const ToleranceConfig tol = inst.tol;
  r.seq = inst.sequence<Scalar>();
  r.sample_seed = opt.seed_override.value_or(inst.seed);
  r.samples = opt.samples;

  // Tail tower and its laws.
  r.tower = build_tower(r.seq, tol);
  const Index m = r.seq.prefix_len();
  {
    Index drop_violations = 0;
    double nesting = 0.0;
    for (Index n = 1; n <= m; ++n) {
      const Index drop = succ_diff_dim(r.tower, n);
      if (drop < 0 || drop > 1) ++drop_violations;
      const auto& next = r.tower.at(n + 1);
      for (Index c = 0; c < next.dim(); ++c) {
        const Vec<Scalar> col = next.columns.col(c);
        nesting = std::max(nesting, (col - project(r.tower.at(n), col)).norm());
      }
    }
    double containment = 0.0;
    for (Index n = 1; n <= m + 1; ++n) {
      for (Index c = 0; c < r.tower.h_inf.dim(); ++c) {
        const Vec<Scalar> col = r.tower.h_inf.columns.col(c);
        containment =
            std::max(containment, (col - project(r.tower.at(n), col)).norm());
      }
    }
    double stab = 0.0;
    for (Index n = r.tower.stab_index; n <= m + 1; ++n) {
      const auto& basis = r.tower.at(n);
      for (Index c = 0; c < basis.dim(); ++c) {
        const Vec<Scalar> col = basis.columns.col(c);
        stab = std::max(stab, (col - project(r.tower.h_inf, col)).norm());
      }
    }
    Index rank_gap = 0;
    for (Index n = 1; n <= m + 1; ++n) {
      std::vector<Vec<Scalar>> gens;
      for (Index k = n; k <= m; ++k) gens.push_back(r.seq.at(k));
      gens.insert(gens.end(), r.seq.cycle.begin(), r.seq.cycle.end());
      const Index oracle_rank =
          oracles::rank<Scalar>(gens, r.seq.dim, tol.rank_tol);
      rank_gap = std::max(
          rank_gap, std::abs(oracle_rank - r.tower.at(n).dim()));
    }
    r.checks.add("tower.dim_drop_range", static_cast<double>(drop_violations),
                 0.0, "eq");
    r.checks.add("tower.nesting_residual", nesting, tol.residual_tol, "le");
    r.checks.add("tower.h_inf_containment", containment, tol.residual_tol,
                 "le");
    r.checks.add("tower.stabilization_residual", stab, tol.residual_tol, "le");
    r.checks.add("tower.rank_oracle_agreement", static_cast<double>(rank_gap),
                 0.0, "eq", /*oracle=*/true);
  }

  // Adapted orthonormal system.
  r.sys = interleave(canonical_x(r.seq, r.tower, tol), r.tower.h_inf);
  {
    std::vector<Vec<Scalar>> nonzero;
    for (Index n = 1; n <= r.sys.size(); ++n) {
      if (!r.sys.u_is_zero(n)) nonzero.push_back(r.sys.u_at(n));
    }
    const Mat<Scalar> U = detail::stack_columns(nonzero, r.seq.dim);
    const Mat<Scalar> G = U.adjoint() * U;
    const double gram_gap =
        (G - Mat<Scalar>::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
    double membership = 0.0;
    for (Index n = 1; n <= r.sys.size(); ++n) {
      membership = std::max(membership, membership_residual(r.sys, r.tower, n));
    }
    r.checks.add("adapted.gram_identity", gram_gap, tol.residual_tol, "le");
    r.checks.add("adapted.nonzero_count",
                 static_cast<double>(r.sys.nonzero_count()),
                 static_cast<double>(r.seq.dim), "eq");
    r.checks.add("adapted.membership_residual", membership, tol.residual_tol,
                 "le");
  }

  // Accuracy schedule.
  const Index count = r.sys.size();
  if (inst.epsilon.kind == ScheduleKind::geometric) {
    r.eps = make_geometric_schedule(count, inst.epsilon.ratio,
                                    inst.epsilon.mass);
  } else {
    if (static_cast<Index>(inst.epsilon.values.size()) != count) {
      throw ValidationError(
          "epsilon: explicit schedule must provide exactly " +
          std::to_string(count) + " values (one per adapted index), got " +
          std::to_string(inst.epsilon.values.size()));
    }
    r.eps = make_explicit_schedule(inst.epsilon.values);
  }

  // Tail-supported approximants.
  r.max_tail = default_max_tail(r.seq, r.tower.h_inf.dim());
  r.zs.reserve(static_cast<std::size_t>(count));
  for (Index n = 1; n <= count; ++n) {
    r.zs.push_back(
        build_z(r.sys.u_at(n), n, r.seq, r.eps.at(n), tol, r.max_tail));
  }
  {
    double margin = std::numeric_limits<double>::infinity();
    double recompute_gap = 0.0;
    Index tail_violations = 0;
    for (Index n = 1; n <= count; ++n) {
      const auto& z = r.zs[static_cast<std::size_t>(n - 1)];
      margin = std::min(margin, r.eps.at(n) - z.err);
      recompute_gap = std::max(
          recompute_gap,
          std::abs((r.sys.u_at(n) - z.reconstruct(r.seq)).norm() - z.err));
      for (const auto& [k, g] : z.coeffs) {
        if (k < z.start) ++tail_violations;
      }
    }
    r.checks.add("approx.strict_margin", margin, 0.0, "gt");
    r.checks.add("approx.tail_constraint",
                 static_cast<double>(tail_violations), 0.0, "eq");
    r.checks.add("approx.err_recompute_gap", recompute_gap, 1e-12, "le");
  }

  // Perturbation operator and mixed series.
  r.pert = assemble_T(r.sys, r.zs, r.seq, r.eps);
  r.mixed_residual = mixed_series_check(r.sys, r.zs, r.seq, r.pert);
  {
    const Index d = r.seq.dim;
    Mat<Scalar> S = Mat<Scalar>::Zero(d, d);
    for (Index n = 1; n <= count; ++n) {
      if (r.sys.u_is_zero(n)) continue;
      const Vec<Scalar>& un = r.sys.u_at(n);
      S += un * un.adjoint();
    }
    r.parseval_op_residual =
        operator_norm<Scalar>(S - Mat<Scalar>::Identity(d, d));
    r.checks.add("perturbation.norm_within_bound", r.pert.norm,
                 r.pert.bound + 1e-10, "le");
    r.checks.add("perturbation.contraction", r.pert.norm, 1.0, "lt");
    r.checks.add("perturbation.norm_oracle_gap",
                 std::abs(r.pert.norm - oracles::operator_norm(r.pert.T)),
                 1e-10, "le", /*oracle=*/true);
    r.checks.add("resolution.mixed_series_residual", r.mixed_residual,
                 tol.residual_tol, "le");
    r.checks.add("resolution.parseval_operator_residual",
                 r.parseval_op_residual, tol.residual_tol, "le");
  }

  // Dual vectors and the rank-one resolution.
  r.duals = dual_vectors(r.pert, r.sys, r.zs, r.seq, tol);
  r.checks.add("resolution.neumann_solve_gap", r.duals.neumann_gap,
               10.0 * tol.neumann_tol, "le", /*oracle=*/true);
  r.checks.add("resolution.residual", r.duals.resolution_residual,
               tol.residual_tol, "le");

  // Frame weights and both certificates.
  r.k_used = max_used_tail_index(r.zs);
  if (inst.weights.kind == WeightKind::dyadic) {
    r.weights = make_dyadic_weights(r.k_used);
  } else {
    r.weights = make_explicit_weights(inst.weights.values);
    if (r.weights.k_max() < r.k_used) {
      throw ValidationError(
          "weights: explicit weights must cover every used tail index (need " +
          std::to_string(r.k_used) + ", got " +
          std::to_string(r.weights.k_max()) + ")");
    }
  }
  r.C_a = constant_C(r.weights, r.duals, r.zs);
  r.lam = explicit_lambda(r.duals, r.zs, r.k_used);
  {
    const double c_rev =
        oracles::constant_C_reversed(r.weights, r.duals, r.zs);
    const auto lam_oracle = oracles::lambda(r.duals, r.zs, r.k_used);
    double lam_gap = 0.0;
    double bound_excess = -std::numeric_limits<double>::infinity();
    double min_contributing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.lam.lambda.size(); ++i) {
      lam_gap = std::max(lam_gap,
                         detail::rel_gap(r.lam.lambda[i], lam_oracle[i]));
      bound_excess = std::max(
          bound_excess, (r.lam.lambda[i] - r.lam.bound[i]) /
                            std::max(1.0, std::abs(r.lam.bound[i])));
      if (r.lam.contributing[i]) {
        min_contributing = std::min(min_contributing, r.lam.lambda[i]);
      }
    }
    // Fubini check: the double sum grouped by adapted index against the
    // same terms grouped by tail index.
    double by_n = 0.0;
    for (const auto& z : r.zs) {
      if (z.coeffs.empty()) continue;
      const double wn2 = r.duals.w_at(z.n).squaredNorm();
      double inner_sum = 0.0;
      for (const auto& [k, g] : z.coeffs) {
        inner_sum += std::ldexp(std::norm(std::complex<double>(g)),
                                static_cast<int>(z.n + k - z.start + 1)) *
                     wn2;
      }
      by_n += inner_sum;
    }
    double by_k = 0.0;
    for (double lk : r.lam.lambda) by_k += lk;
    r.fubini_gap = detail::rel_gap(by_n, by_k);

    r.checks.add("frame.c_reversed_gap", detail::rel_gap(r.C_a, c_rev), 1e-12,
                 "le", /*oracle=*/true);
    r.checks.add("frame.lambda_oracle_gap", lam_gap, 1e-12, "le",
                 /*oracle=*/true);
    r.checks.add("frame.lambda_within_bound", bound_excess, tol.residual_tol,
                 "le");
    r.checks.add("frame.lambda_contributing_positive",
                 std::isfinite(min_contributing) ? min_contributing : 1.0, 0.0,
                 "gt");
    r.checks.add("frame.fubini_gap", r.fubini_gap, 1e-12, "le");
  }
  r.eig_slack = frame_operator_eig_check(r.lam.lambda, r.seq);
  {
    std::vector<double> scaled;
    scaled.reserve(static_cast<std::size_t>(r.weights.k_max()));
    for (Index k = 1; k <= r.weights.k_max(); ++k) {
      scaled.push_back(r.C_a * r.weights.at(k));
    }
    r.eig_slack_scaled = frame_operator_eig_check(scaled, r.seq);
  }
  r.worst_ratio = weighted_frame_check(r.weights, r.C_a, r.seq, r.samples,
                                       r.sample_seed);
  r.checks.add("frame.eig_slack", r.eig_slack, -tol.residual_tol, "ge");
  r.checks.add("frame.eig_slack_scaled", r.eig_slack_scaled,
               -tol.residual_tol, "ge");
  r.checks.add("frame.sampling_worst_ratio", r.worst_ratio,
               1.0 + tol.residual_tol, "le");
  return r;
}

// The full property suite on top of the construction: sweeps and sampled
// invariants that are too heavy to run on every build.
template <typename Scalar>
PipelineResult<Scalar> run_verify(const Instance& inst, Index samples,
                                  std::optional<std::uint64_t> seed_override) {
  BuildOptions opt;
  opt.samples = samples;
  opt.seed_override = seed_override;
  PipelineResult<Scalar> r = run_pipeline<Scalar>(inst, opt);
  const ToleranceConfig tol = inst.tol;
  const Index d = r.seq.dim;
  const Index count = r.sys.size();
  const std::uint64_t seed = r.sample_seed;

  // Tail drop is 1 exactly when v_n leaves a residual against the next tail.
  {
    Index violations = 0;
    for (Index n = 1; n <= r.seq.prefix_len(); ++n) {
      const Vec<Scalar> v = r.seq.at(n);
      const double resid = (v - project(r.tower.at(n + 1), v)).norm();
      const bool above = resid > tol.rank_tol * std::max(1.0, v.norm());
      if ((succ_diff_dim(r.tower, n) == 1) != above) ++violations;
    }
    r.checks.add("tower.drop_residual_iff", static_cast<double>(violations),
                 0.0, "eq");
  }

  // Orthonormalize-then-project reproduces the generators.
  {
    double worst = 0.0;
    for (const auto& v : r.seq.generators()) {
      worst = std::max(worst, (v - project(r.tower.at(1), v)).norm() /
                                  std::max(1.0, v.norm()));
    }
    r.checks.add("numeric.reproduce_inputs", worst, tol.rank_tol, "le");
  }

  // Projection laws on sampled vectors, cycling through the tower levels.
  {
    double idem = 0.0, pyth = 0.0, conj_gap = 0.0;
    Rng rng(mix_seed(seed, 0x9A01));
    for (Index i = 0; i < 200; ++i) {
      const auto& basis = r.tower.at(1 + (i % (r.seq.prefix_len() + 1)));
      const Vec<Scalar> x = gaussian_vector<Scalar>(rng, d);
      const Vec<Scalar> px = project(basis, x);
      idem = std::max(idem, (project(basis, px) - px).norm() /
                                std::max(1.0, x.norm()));
      pyth = std::max(
          pyth, std::abs(x.squaredNorm() - px.squaredNorm() -
                         (x - px).squaredNorm()) /
                    std::max(1.0, x.squaredNorm()));
      const Vec<Scalar> y = gaussian_vector<Scalar>(rng, d);
      const auto lhs = std::complex<double>(inner<Scalar>(x, y));
      const auto rhs = std::conj(std::complex<double>(inner<Scalar>(y, x)));
      conj_gap = std::max(conj_gap, std::abs(lhs - rhs));
    }
    r.checks.add("numeric.project_idempotent", idem, tol.residual_tol, "le");
    r.checks.add("numeric.pythagoras", pyth, tol.residual_tol, "le");
    r.checks.add("numeric.inner_conj_symmetry", conj_gap, tol.residual_tol,
                 "le");
  }

  // Cross-orthogonality of the split parts.
  {
    double cross = 0.0;
    for (const auto& xv : r.sys.x) {
      if (is_zero_vector(xv)) continue;
      for (Index c = 0; c < r.sys.y.dim(); ++c) {
        cross = std::max(cross,
                         std::abs(std::complex<double>(inner<Scalar>(
                             xv, Vec<Scalar>(r.sys.y.columns.col(c))))));
      }
    }
    r.checks.add("adapted.cross_orthogonality", cross, tol.residual_tol, "le");
  }

  // Parseval partial-sum sweep: tail identity and monotonicity for each
  // sampled vector across every truncation point.
  {
    double identity_gap = 0.0;
    Index monotone_violations = 0;
    const Index sweep_samples = std::min<Index>(samples, 100);
    for (Index s = 0; s < sweep_samples; ++s) {
      Rng rng(mix_seed(seed, 0x9A02 + static_cast<std::uint64_t>(s)));
      const Vec<Scalar> x = gaussian_vector<Scalar>(rng, d);
      const double x2 = x.squaredNorm();
      std::vector<double> coeff_sq(static_cast<std::size_t>(count));
      for (Index n = 1; n <= count; ++n) {
        coeff_sq[static_cast<std::size_t>(n - 1)] = std::norm(
            std::complex<double>(inner<Scalar>(r.sys.u_at(n), x)));
      }
      Vec<Scalar> acc = Vec<Scalar>::Zero(d);
      double prev = (x - acc).norm();
      for (Index N = 0; N <= count; ++N) {
        if (N > 0) {
          const Vec<Scalar>& un = r.sys.u_at(N);
          acc += un * inner<Scalar>(un, x);
        }
        const double resid = (x - acc).norm();
        double tail_sq = 0.0;
        for (Index n = N + 1; n <= count; ++n) {
          tail_sq += coeff_sq[static_cast<std::size_t>(n - 1)];
        }
        identity_gap =
            std::max(identity_gap,
                     std::abs(resid * resid - tail_sq) / std::max(1.0, x2));
        if (N > 0 && resid > prev + 1e-12 * std::max(1.0, x.norm())) {
          ++monotone_violations;
        }
        prev = resid;
      }
    }
    r.checks.add("resolution.parseval_sweep_gap", identity_gap,
                 tol.residual_tol, "le");
    r.checks.add("resolution.parseval_monotone",
                 static_cast<double>(monotone_violations), 0.0, "eq");
  }

  // Partial projection sums are projections: idempotent and self-adjoint.
  {
    double idem = 0.0, selfadj = 0.0;
    Mat<Scalar> S = Mat<Scalar>::Zero(d, d);
    for (Index N = 1; N <= count; ++N) {
      if (!r.sys.u_is_zero(N)) {
        const Vec<Scalar>& un = r.sys.u_at(N);
        S += un * un.adjoint();
      }
      idem = std::max(idem, operator_norm<Scalar>(Mat<Scalar>(S * S - S)));
      selfadj = std::max(
          selfadj,
          operator_norm<Scalar>(Mat<Scalar>(S - S.adjoint().eval())));
    }
    r.checks.add("resolution.partial_sum_idempotent", idem, tol.residual_tol,
                 "le");
    r.checks.add("resolution.partial_sum_selfadjoint", selfadj,
                 tol.residual_tol, "le");
  }

  // Vector-level resolution: (I - T) applied to the resolved identity.
  {
    Mat<Scalar> R = Mat<Scalar>::Zero(d, d);
    for (Index n = 1; n <= count; ++n) {
      if (r.sys.u_is_zero(n)) continue;
      R += r.duals.w_at(n) *
           r.zs[static_cast<std::size_t>(n - 1)].reconstruct(r.seq).adjoint();
    }
    const Mat<Scalar> A = Mat<Scalar>::Identity(d, d) - r.pert.T;
    const double worst = parallel_max(1000, [&](Index i) {
      Rng rng(mix_seed(seed, 0x9A03 + static_cast<std::uint64_t>(i)));
      const Vec<Scalar> x = gaussian_vector<Scalar>(rng, d);
      return (A * (R * x) - A * x).norm() / std::max(1.0, x.norm());
    });
    r.checks.add("resolution.identity_vector_level", worst, tol.residual_tol,
                 "le");
  }

  // Pointwise inequality chain behind the dyadic certificate.
  {
    std::vector<Vec<Scalar>> zvecs;
    zvecs.reserve(static_cast<std::size_t>(count));
    for (const auto& z : r.zs) zvecs.push_back(z.reconstruct(r.seq));
    double min_slack = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < std::min<Index>(samples, 200); ++i) {
      Rng rng(mix_seed(seed, 0x9A04 + static_cast<std::uint64_t>(i)));
      const Vec<Scalar> x = random_unit_vector<Scalar>(rng, d);
      double chain1 = 0.0, chain2 = 0.0;
      for (Index n = 1; n <= count; ++n) {
        const auto& z = r.zs[static_cast<std::size_t>(n - 1)];
        if (z.coeffs.empty()) continue;
        const double wn2 = r.duals.w_at(n).squaredNorm();
        const double zx = std::norm(std::complex<double>(
            inner<Scalar>(zvecs[static_cast<std::size_t>(n - 1)], x)));
        chain1 += std::ldexp(wn2 * zx, static_cast<int>(n));
        double dyadic_sum = 0.0;
        for (const auto& [k, g] : z.coeffs) {
          dyadic_sum += std::ldexp(std::norm(std::complex<double>(g)) *
                                       std::norm(std::complex<double>(
                                           inner<Scalar>(r.seq.at(k), x))),
                                   static_cast<int>(k));
        }
        chain2 += std::ldexp(wn2 * dyadic_sum,
                             static_cast<int>(n + 1 - z.start));
      }
      min_slack = std::min(min_slack, chain1 - 1.0);
      min_slack =
          std::min(min_slack, (chain2 - chain1) / std::max(1.0, chain1));
    }
    r.checks.add("frame.chain_pointwise_slack", min_slack, -tol.residual_tol,
                 "ge");
  }

  // Sampled quadratic form against the exact eigenvalue slack.
  {
    const double sampled =
        oracles::sampled_frame_slack(r.lam.lambda, r.seq, 100000,
                                     mix_seed(seed, 0x9A05));
    r.checks.add("frame.eig_sampling_cross", sampled - r.eig_slack, -1e-6,
                 "ge", /*oracle=*/true);
  }

  // Extending the weight window can only help the rescaled certificate.
  {
    std::vector<double> extended;
    extended.reserve(static_cast<std::size_t>(r.weights.k_max()) + 3);
    for (Index k = 1; k <= r.weights.k_max(); ++k) {
      extended.push_back(r.C_a * r.weights.at(k));
    }
    for (Index k = r.weights.k_max() + 1; k <= r.weights.k_max() + 3; ++k) {
      extended.push_back(r.C_a * std::ldexp(1.0, static_cast<int>(
                                                    std::min<Index>(k, 60))));
    }
    const double slack_ext = frame_operator_eig_check(extended, r.seq);
    r.checks.add("frame.truncation_monotone", slack_ext - r.eig_slack_scaled,
                 -tol.residual_tol, "ge");
  }

  return r;
}

}  // namespace tailframe
