#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "tailframe/instance.hpp"
#include "tailframe/pipeline.hpp"
#include "tailframe/report.hpp"

using namespace tailframe;
using nlohmann::json;

namespace {

json base_instance() {
  return json::parse(R"({
    "schema": 1,
    "field": "real",
    "dim": 2,
    "prefix": [[1, 0], [0, 1]],
    "cycle": [],
    "epsilon": {"kind": "geometric", "ratio": 0.5, "mass": 0.25},
    "weights": {"kind": "dyadic"},
    "seed": 7
  })");
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("tailframe_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("a well-formed instance parses") {
  const Instance inst = parse_instance(base_instance());
  CHECK(inst.dim == 2);
  CHECK(inst.field == "real");
  CHECK(inst.prefix.size() == 2);
  CHECK(inst.seed == 7);
  const auto seq = inst.sequence<double>();
  CHECK(seq.at(1)(0) == 1.0);
}

TEST_CASE("schema and field validation") {
  auto j = base_instance();
  j["schema"] = 99;
  CHECK_THROWS_AS(parse_instance(j), ValidationError);

  j = base_instance();
  j.erase("field");
  CHECK_THROWS_AS(parse_instance(j), ValidationError);

  j = base_instance();
  j["field"] = "quaternion";
  CHECK_THROWS_AS(parse_instance(j), ValidationError);

  j = base_instance();
  j["dim"] = 0;
  CHECK_THROWS_AS(parse_instance(j), ValidationError);
}

TEST_CASE("field mixing is rejected at load") {
  auto j = base_instance();
  // a [re, im] pair inside a real field
  j["prefix"] = json::parse("[[[1.0, 0.0], 0.0]]");
  CHECK_THROWS_AS(parse_instance(j), ValidationError);

  j = base_instance();
  j["field"] = "complex";
  // plain numbers inside a complex field
  CHECK_THROWS_AS(parse_instance(j), ValidationError);

  j = base_instance();
  j["field"] = "complex";
  j["prefix"] = json::parse(
      "[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]");
  CHECK_NOTHROW(parse_instance(j));
}

TEST_CASE("vector length must match the dimension") {
  auto j = base_instance();
  j["prefix"] = {{1.0, 0.0, 0.0}};
  CHECK_THROWS_AS(parse_instance(j), ValidationError);
}

TEST_CASE("schedule constraint is enforced at load") {
  auto j = base_instance();
  j["epsilon"] = {{"kind", "explicit"}, {"values", {0.9, 0.5}}};
  CHECK_THROWS_AS(parse_instance(j), ValidationError);
  j["epsilon"] = {{"kind", "geometric"}, {"ratio", 0.5}, {"mass", 1.2}};
  CHECK_THROWS_AS(parse_instance(j), ValidationError);
}

TEST_CASE("weights must be positive") {
  auto j = base_instance();
  j["weights"] = {{"kind", "explicit"}, {"values", {2.0, -1.0}}};
  CHECK_THROWS_AS(parse_instance(j), ValidationError);
}

TEST_CASE("instances round-trip through serialization") {
  const Instance inst = demo_random(3, 5, 2, 11, true);
  TempDir tmp;
  save_instance(inst, tmp.file("a.json"));
  const Instance back = load_instance(tmp.file("a.json"));
  CHECK(back.dim == inst.dim);
  CHECK(back.field == inst.field);
  REQUIRE(back.prefix.size() == inst.prefix.size());
  for (std::size_t i = 0; i < inst.prefix.size(); ++i) {
    CHECK(back.prefix[i] == inst.prefix[i]);
  }
  // identical bytes when saved again
  save_instance(back, tmp.file("b.json"));
  CHECK(read_file_bytes(tmp.file("a.json")) ==
        read_file_bytes(tmp.file("b.json")));
}

TEST_CASE("demo generators are deterministic") {
  const Instance a = demo_random(5, 7, 0, 42, false);
  const Instance b = demo_random(5, 7, 0, 42, false);
  CHECK(instance_to_json(a).dump() == instance_to_json(b).dump());
  CHECK_THROWS_AS(demo_random(5, 2, 1, 42, false), ValidationError);
}

TEST_CASE("demo shapes match their construction") {
  const Instance std3 = demo_standard_basis(3);
  CHECK(std3.prefix.size() == 3);
  CHECK(std3.cycle.empty());
  const Instance cyc = demo_cyclic();
  CHECK(cyc.prefix.size() == 1);
  CHECK(cyc.cycle.size() == 2);
  const Instance red = demo_redundant();
  CHECK(red.dim == 2);
  CHECK(red.prefix.size() == 3);
}

TEST_CASE("reports serialize deterministically and carry the checks") {
  const Instance inst = demo_cyclic();
  const auto res = run_pipeline<double>(inst);
  const auto rep1 = build_report(inst, "fnv1a64:test", res);
  const auto res2 = run_pipeline<double>(inst);
  const auto rep2 = build_report(inst, "fnv1a64:test", res2);
  CHECK(rep1.dump(2) == rep2.dump(2));
  CHECK(rep1["status"] == "pass");
  CHECK(rep1["checks"].size() == res.checks.items.size());
  for (const auto& c : rep1["checks"]) {
    CHECK(c.contains("measured"));
    CHECK(c.contains("threshold"));
  }
}

TEST_CASE("stored reports verify and corrupted coefficients surface") {
  const Instance inst = demo_cyclic();
  const auto res = run_pipeline<double>(inst);
  const auto rep = build_report(inst, "digest", res);
  const json as_plain = json::parse(rep.dump());
  const CheckList good = verify_stored_report<double>(inst, as_plain, "digest");
  CHECK(good.all_pass());

  json corrupted = as_plain;
  for (auto& a : corrupted["approximants"]) {
    if (!a["gamma"].empty()) {
      a["gamma"][0][1] = a["gamma"][0][1].get<double>() + 0.5;
      break;
    }
  }
  const CheckList bad = verify_stored_report<double>(inst, corrupted, "digest");
  CHECK_FALSE(bad.all_pass());
  bool resolution_failed = false;
  for (const auto& c : bad.items) {
    if (c.name == "report.resolution_residual_stored" && !c.pass) {
      resolution_failed = true;
    }
  }
  CHECK(resolution_failed);
}

TEST_CASE("explicit schedules must match the adapted length") {
  auto j = base_instance();
  // dim 2 standard basis: adapted length is 4
  j["epsilon"] = {{"kind", "explicit"}, {"values", {0.3, 0.3, 0.3}}};
  const Instance inst = parse_instance(j);
  CHECK_THROWS_AS(run_pipeline<double>(inst), ValidationError);
  j["epsilon"] = {{"kind", "explicit"}, {"values", {0.3, 0.3, 0.3, 0.3}}};
  CHECK_NOTHROW(run_pipeline<double>(parse_instance(j)));
}

TEST_CASE("explicit weights must cover the used tail window") {
  auto j = base_instance();
  j["weights"] = {{"kind", "explicit"}, {"values", {1.0}}};
  const Instance inst = parse_instance(j);
  CHECK_THROWS_AS(run_pipeline<double>(inst), ValidationError);
  j["weights"] = {{"kind", "explicit"}, {"values", {1.0, 1.0, 1.0}}};
  CHECK_NOTHROW(run_pipeline<double>(parse_instance(j)));
}

TEST_CASE("digest is stable and input-sensitive") {
  CHECK(digest_bytes("abc") == digest_bytes("abc"));
  CHECK(digest_bytes("abc") != digest_bytes("abd"));
  CHECK(digest_bytes("").rfind("fnv1a64:", 0) == 0);
}
