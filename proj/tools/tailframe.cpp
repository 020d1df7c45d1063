// Command-line front end: build certificates, verify instances or stored
// reports, and generate demo instances.
//
// Exit codes: 0 success, 1 property failure, 2 parse/validation error,
// 3 totality failure, 4 contraction bound violation, 5 oracle disagreement.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tailframe/tailframe.hpp"

namespace {

using namespace tailframe;

constexpr int kExitCheckFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitTotality = 3;
constexpr int kExitContraction = 4;
constexpr int kExitOracle = 5;

void print_checks(const CheckList& checks) {
  for (const auto& c : checks.items) {
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << std::left
              << std::setw(40) << c.name << " measured="
              << std::setprecision(9) << std::scientific << c.measured
              << " " << c.cmp << " " << c.threshold << std::defaultfloat
              << "\n";
  }
}

int exit_code_for(const CheckList& checks) {
  if (checks.all_pass()) return 0;
  return checks.oracle_failure() ? kExitOracle : kExitCheckFailure;
}

template <typename Scalar>
int do_build(const Instance& inst, const std::string& digest,
             const std::string& out_path) {
  const auto start = std::chrono::steady_clock::now();
  const PipelineResult<Scalar> res = run_pipeline<Scalar>(inst);
  const auto report = build_report(inst, digest, res);
  write_report(report, out_path);
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);

  std::cout << "instance " << digest << " (" << inst.field << ", dim "
            << inst.dim << ")\n";
  std::cout << "tower dims:";
  for (auto d : res.tower.dims()) std::cout << " " << d;
  std::cout << "  stabilizes at n=" << res.tower.stab_index << "\n";
  std::cout << "adapted system: " << res.sys.nonzero_count() << " nonzero of "
            << res.sys.size() << " entries\n";
  std::cout << std::setprecision(9);
  std::cout << "perturbation norm " << res.pert.norm << " (bound "
            << res.pert.bound << ")\n";
  std::cout << "resolution residual " << res.duals.resolution_residual
            << ", C(a) = " << res.C_a << ", eig slack " << res.eig_slack
            << "\n";
  std::cout << "checks: " << res.checks.items.size() << " run, "
            << res.checks.failures().size() << " failed\n";
  for (const auto& name : res.checks.failures()) {
    std::cout << "  FAIL " << name << "\n";
  }
  std::cout << "wrote " << out_path << " in " << elapsed.count() << " ms\n";
  return exit_code_for(res.checks);
}

template <typename Scalar>
int do_verify(const Instance& inst, const std::string& digest, Index samples,
              std::optional<std::uint64_t> seed,
              const std::string& report_path) {
  if (!report_path.empty()) {
    const auto rep = load_report(report_path);
    const CheckList checks =
        verify_stored_report<Scalar>(inst, rep, digest);
    print_checks(checks);
    const auto failures = checks.failures();
    if (!failures.empty()) {
      std::cout << failures.size() << " stored-report check(s) failed\n";
    }
    return exit_code_for(checks);
  }
  const PipelineResult<Scalar> res = run_verify<Scalar>(inst, samples, seed);
  print_checks(res.checks);
  const auto failures = res.checks.failures();
  if (!failures.empty()) {
    std::cout << failures.size() << " propert"
              << (failures.size() == 1 ? "y" : "ies") << " failed\n";
  }
  return exit_code_for(res.checks);
}

int dispatch_errors(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const TotalityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTotality;
  } catch (const ContractionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitContraction;
  } catch (const OracleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOracle;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted lower-frame certificates for total vector families"};
  app.require_subcommand(1);

  std::string instance_path, out_path, report_path, demo_name;
  Index samples = 1000;
  std::optional<std::uint64_t> seed_override;
  std::uint64_t seed_value = 0;
  double tol_rank = -1.0, tol_res = -1.0, tol_neumann = -1.0;
  Index demo_dim = 3, demo_prefix = 0, demo_cycle = 0;
  std::uint64_t demo_seed = 0;
  std::string demo_field = "real";

  auto* build = app.add_subcommand("build", "run the construction and write a certificate report");
  build->add_option("instance", instance_path, "instance file")->required();
  build->add_option("-o,--output", out_path, "report output path")->required();
  build->add_option("--tol-rank", tol_rank, "rank tolerance override");
  build->add_option("--tol-res", tol_res, "residual tolerance override");
  build->add_option("--tol-neumann", tol_neumann, "series truncation tolerance override");

  auto* verify = app.add_subcommand("verify", "run the full property suite");
  verify->add_option("instance", instance_path, "instance file")->required();
  verify->add_option("--samples", samples, "sample count for randomized properties");
  auto* seed_opt = verify->add_option("--seed", seed_value, "sampling seed override");
  verify->add_option("--report", report_path, "verify a stored report against the instance");

  auto* demo = app.add_subcommand("demo", "write a ready-to-run instance");
  demo->add_option("name", demo_name, "standard_basis | redundant | cyclic | random")->required();
  demo->add_option("-o,--output", out_path, "instance output path")->required();
  demo->add_option("--dim", demo_dim, "ambient dimension (standard_basis, random)");
  demo->add_option("--prefix-len", demo_prefix, "prefix length (random)");
  demo->add_option("--cycle-len", demo_cycle, "cycle length (random)");
  demo->add_option("--seed", demo_seed, "generator seed (random)");
  demo->add_option("--field", demo_field, "real | complex (random)");

  CLI11_PARSE(app, argc, argv);

  if (build->parsed()) {
    return dispatch_errors([&]() -> int {
      const std::string bytes = read_file_bytes(instance_path);
      const std::string digest = digest_bytes(bytes);
      Instance inst = load_instance(instance_path);
      if (tol_rank > 0) inst.tol.rank_tol = tol_rank;
      if (tol_res > 0) inst.tol.residual_tol = tol_res;
      if (tol_neumann > 0) inst.tol.neumann_tol = tol_neumann;
      inst.tol.validate();
      return inst.complex_field()
                 ? do_build<std::complex<double>>(inst, digest, out_path)
                 : do_build<double>(inst, digest, out_path);
    });
  }

  if (verify->parsed()) {
    return dispatch_errors([&]() -> int {
      const std::string bytes = read_file_bytes(instance_path);
      const std::string digest = digest_bytes(bytes);
      const Instance inst = load_instance(instance_path);
      if (seed_opt->count() > 0) seed_override = seed_value;
      return inst.complex_field()
                 ? do_verify<std::complex<double>>(inst, digest, samples,
                                                   seed_override, report_path)
                 : do_verify<double>(inst, digest, samples, seed_override,
                                     report_path);
    });
  }

  return dispatch_errors([&]() -> int {
    Instance inst;
    if (demo_name == "standard_basis") {
      inst = demo_standard_basis(demo_dim);
    } else if (demo_name == "redundant") {
      inst = demo_redundant();
    } else if (demo_name == "cyclic") {
      inst = demo_cyclic();
    } else if (demo_name == "random") {
      if (demo_prefix == 0) demo_prefix = 2 * demo_dim;
      inst = demo_random(demo_dim, demo_prefix, demo_cycle, demo_seed,
                         demo_field == "complex");
    } else {
      throw ValidationError("unknown demo name \"" + demo_name +
                            "\" (expected standard_basis, redundant, cyclic "
                            "or random)");
    }
    save_instance(inst, out_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
  });
}
