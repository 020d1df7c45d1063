#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tailframe/pipeline.hpp"
#include "tailframe/version.hpp"

namespace tailframe {

// FNV-1a over the raw instance bytes; ties a report to its input file.
inline std::string digest_bytes(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace detail {

template <typename Scalar>
ordered_json vector_to_json(const Vec<Scalar>& v) {
  ordered_json arr = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) {
    if constexpr (is_complex_v<Scalar>) {
      arr.push_back(ordered_json::array({v(i).real(), v(i).imag()}));
    } else {
      arr.push_back(v(i));
    }
  }
  return arr;
}

template <typename Scalar>
Vec<Scalar> vector_from_json(const json& arr, Index d, const char* where) {
  if (!arr.is_array() || static_cast<Index>(arr.size()) != d) {
    throw ValidationError(std::string(where) + ": bad vector length");
  }
  Vec<Scalar> v(d);
  for (Index i = 0; i < d; ++i) {
    const auto c =
        parse_entry(arr[static_cast<std::size_t>(i)], is_complex_v<Scalar>,
                    where);
    if constexpr (is_complex_v<Scalar>) {
      v(i) = Scalar(c.real(), c.imag());
    } else {
      v(i) = c.real();
    }
  }
  return v;
}

template <typename Scalar>
ordered_json scalar_to_json(const Scalar& s) {
  if constexpr (is_complex_v<Scalar>) {
    return ordered_json::array({s.real(), s.imag()});
  } else {
    return ordered_json(s);
  }
}

}  // namespace detail

template <typename Scalar>
nlohmann::ordered_json build_report(const Instance& inst,
                                    const std::string& digest,
                                    const PipelineResult<Scalar>& r) {
  using detail::ordered_json;
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["generator"] = {{"name", "tailframe"}, {"version", std::string(kVersion)}};
  j["instance"] = {{"digest", digest},
                   {"field", inst.field},
                   {"dim", inst.dim},
                   {"prefix_len", static_cast<Index>(inst.prefix.size())},
                   {"cycle_len", static_cast<Index>(inst.cycle.size())},
                   {"seed", inst.seed}};
  j["tolerances"] = {{"rank_tol", inst.tol.rank_tol},
                     {"residual_tol", inst.tol.residual_tol},
                     {"neumann_tol", inst.tol.neumann_tol}};
  j["tower"] = {{"dims", r.tower.dims()},
                {"h_inf_dim", r.tower.h_inf.dim()},
                {"stab_index", r.tower.stab_index}};
  j["adapted"] = {{"length", r.sys.size()},
                  {"nonzero_count", r.sys.nonzero_count()}};
  j["schedule"] = {
      {"kind",
       r.eps.kind == ScheduleKind::geometric ? "geometric" : "explicit"},
      {"sum_sq", r.eps.sum_sq},
      {"values", r.eps.values}};
  ordered_json approx = ordered_json::array();
  for (const auto& z : r.zs) {
    ordered_json a;
    a["n"] = z.n;
    a["start"] = z.start;
    a["err"] = z.err;
    a["K"] = z.last_index();
    ordered_json gamma = ordered_json::array();
    for (const auto& [k, g] : z.coeffs) {
      gamma.push_back(
          ordered_json::array({ordered_json(k), detail::scalar_to_json(g)}));
    }
    a["gamma"] = std::move(gamma);
    approx.push_back(std::move(a));
  }
  j["approximants"] = std::move(approx);
  j["max_tail"] = r.max_tail;
  j["perturbation"] = {{"norm", r.pert.norm}, {"bound", r.pert.bound}};
  j["mixed_series_residual"] = r.mixed_residual;
  j["parseval_operator_residual"] = r.parseval_op_residual;
  ordered_json wlist = ordered_json::array();
  for (const auto& w : r.duals.w) wlist.push_back(detail::vector_to_json(w));
  j["duals"] = {{"w", std::move(wlist)},
                {"resolution_residual", r.duals.resolution_residual},
                {"neumann_gap", r.duals.neumann_gap}};
  j["weights"] = {
      {"kind", r.weights.kind == WeightKind::dyadic ? "dyadic" : "explicit"},
      {"k_max", r.weights.k_max()},
      {"values", r.weights.values}};
  j["frame"] = {{"C_a", r.C_a},
                {"k_used", r.k_used},
                {"lambda", r.lam.lambda},
                {"lambda_bound", r.lam.bound},
                {"contributing", r.lam.contributing},
                {"eig_slack", r.eig_slack},
                {"eig_slack_rescaled", r.eig_slack_scaled},
                {"sampling_worst_ratio", r.worst_ratio},
                {"samples", r.samples},
                {"sample_seed", r.sample_seed},
                {"fubini_gap", r.fubini_gap}};
  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks.items) {
    checks.push_back({{"name", c.name},
                      {"measured", c.measured},
                      {"threshold", c.threshold},
                      {"cmp", c.cmp},
                      {"oracle", c.oracle},
                      {"pass", c.pass}});
  }
  j["checks"] = std::move(checks);
  j["status"] = r.checks.all_pass() ? "pass" : "fail";
  return j;
}

inline void write_report(const nlohmann::ordered_json& report,
                         const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write report file: " + path);
  out << report.dump(2) << "\n";
}

inline nlohmann::json load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open report file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report parse error: ") + e.what());
  }
  return j;
}

// Re-derives the certificate checks from the coefficients and dual vectors
// STORED in a report, against the instance's own vectors. A corrupted
// stored coefficient surfaces here as a failed resolution-of-identity
// residual, independently of the construction path.
template <typename Scalar>
CheckList verify_stored_report(const Instance& inst, const nlohmann::json& rep,
                               const std::string& digest) {
  CheckList checks;
  const ToleranceConfig tol = inst.tol;
  const TailSequence<Scalar> seq = inst.sequence<Scalar>();
  const Index d = seq.dim;

  checks.add("report.schema",
             rep.value("schema", -1) == kSchemaVersion ? 0.0 : 1.0, 0.0, "eq");
  const std::string stored_digest =
      rep.contains("instance") ? rep["instance"].value("digest", "") : "";
  checks.add("report.instance_digest", stored_digest == digest ? 0.0 : 1.0,
             0.0, "eq");

  std::vector<Approximant<Scalar>> zs;
  std::vector<Vec<Scalar>> ws;
  try {
    for (const auto& a : rep.at("approximants")) {
      Approximant<Scalar> z;
      z.n = a.at("n").get<Index>();
      z.start = a.at("start").get<Index>();
      z.err = a.at("err").get<double>();
      for (const auto& pair : a.at("gamma")) {
        const Index k = pair.at(0).get<Index>();
        const auto c = detail::parse_entry(pair.at(1), is_complex_v<Scalar>,
                                           "report gamma");
        if constexpr (is_complex_v<Scalar>) {
          z.coeffs.emplace_back(k, Scalar(c.real(), c.imag()));
        } else {
          z.coeffs.emplace_back(k, c.real());
        }
      }
      zs.push_back(std::move(z));
    }
    for (const auto& wv : rep.at("duals").at("w")) {
      ws.push_back(detail::vector_from_json<Scalar>(wv, d, "report w"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report structure error: ") + e.what());
  }
  if (zs.size() != ws.size()) {
    throw ValidationError("report: approximants and duals are not aligned");
  }

  // Resolution of identity from stored data alone.
  Mat<Scalar> R = Mat<Scalar>::Zero(d, d);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    R += ws[i] * zs[i].reconstruct(seq).adjoint();
  }
  const double stored_resolution =
      operator_norm<Scalar>(Mat<Scalar>(R - Mat<Scalar>::Identity(d, d)));
  checks.add("report.resolution_residual_stored", stored_resolution,
             tol.residual_tol, "le");

  // Tail constraint on stored coefficients.
  Index tail_violations = 0;
  for (const auto& z : zs) {
    for (const auto& [k, g] : z.coeffs) {
      if (k < AdaptedSystem<Scalar>::tail_start(z.n)) ++tail_violations;
    }
  }
  checks.add("report.tail_constraint", static_cast<double>(tail_violations),
             0.0, "eq");

  // Frame weights recomputed from stored gamma and w.
  DualSystem<Scalar> duals;
  duals.w = ws;
  const Index k_used = rep.contains("frame")
                           ? rep["frame"].value("k_used", Index(1))
                           : Index(1);
  const auto lam = oracles::lambda(duals, zs, k_used);
  double lam_gap = 0.0;
  if (rep.contains("frame") && rep["frame"].contains("lambda")) {
    const auto stored = rep["frame"]["lambda"].get<std::vector<double>>();
    if (stored.size() != lam.size()) {
      lam_gap = std::numeric_limits<double>::infinity();
    } else {
      for (std::size_t i = 0; i < lam.size(); ++i) {
        lam_gap = std::max(lam_gap, detail::rel_gap(lam[i], stored[i]));
      }
    }
  } else {
    lam_gap = std::numeric_limits<double>::infinity();
  }
  checks.add("report.lambda_recompute_gap", lam_gap, 1e-12, "le",
             /*oracle=*/true);

  // Full reconstruction: the pipeline is deterministic, so recomputed
  // headline numbers must match the stored ones.
  BuildOptions opt;
  opt.samples = rep.contains("frame")
                    ? rep["frame"].value("samples", Index(1000))
                    : Index(1000);
  const PipelineResult<Scalar> fresh = run_pipeline<Scalar>(inst, opt);
  double headline_gap = 0.0;
  auto compare = [&](double stored, double computed) {
    headline_gap = std::max(headline_gap, detail::rel_gap(stored, computed));
  };
  try {
    compare(rep.at("perturbation").at("norm").get<double>(), fresh.pert.norm);
    compare(rep.at("frame").at("C_a").get<double>(), fresh.C_a);
    compare(rep.at("duals").at("resolution_residual").get<double>(),
            fresh.duals.resolution_residual);
    compare(rep.at("frame").at("eig_slack").get<double>(), fresh.eig_slack);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("report structure error: ") + e.what());
  }
  checks.add("report.pipeline_recompute_gap", headline_gap, 1e-12, "le",
             /*oracle=*/true);
  return checks;
}

}  // namespace tailframe
