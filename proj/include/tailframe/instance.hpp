#pragma once

#include <complex>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tailframe/approximants.hpp"
#include "tailframe/frame_weights.hpp"
#include "tailframe/oracles.hpp"
#include "tailframe/random.hpp"
#include "tailframe/tail_tower.hpp"

namespace tailframe {

inline constexpr int kSchemaVersion = 1;

struct EpsilonSpec {
  ScheduleKind kind = ScheduleKind::geometric;
  double ratio = 0.5;
  double mass = 0.25;
  std::vector<double> values;  // explicit only
};

struct WeightSpec {
  WeightKind kind = WeightKind::dyadic;
  std::vector<double> values;  // explicit only
};

// One self-contained problem instance: the vector family, the accuracy
// schedule, the weight choice, tolerance overrides, and the sampling seed.
// Entries are stored as complex internally; a real-field instance must not
// carry imaginary parts.
struct Instance {
  std::string field = "real";
  Index dim = 0;
  std::vector<std::vector<std::complex<double>>> prefix;
  std::vector<std::vector<std::complex<double>>> cycle;
  EpsilonSpec epsilon;
  WeightSpec weights;
  ToleranceConfig tol;
  std::uint64_t seed = 0;

  bool complex_field() const { return field == "complex"; }

  template <typename Scalar>
  TailSequence<Scalar> sequence() const {
    TailSequence<Scalar> seq;
    seq.dim = dim;
    auto convert = [&](const std::vector<std::vector<std::complex<double>>>& rows,
                       std::vector<Vec<Scalar>>& out) {
      for (const auto& row : rows) {
        Vec<Scalar> v(dim);
        for (Index i = 0; i < dim; ++i) {
          const auto& c = row[static_cast<std::size_t>(i)];
          if constexpr (is_complex_v<Scalar>) {
            v(i) = Scalar(c.real(), c.imag());
          } else {
            v(i) = c.real();
          }
        }
        out.push_back(std::move(v));
      }
    };
    convert(prefix, seq.prefix);
    convert(cycle, seq.cycle);
    return seq;
  }
};

namespace detail {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::complex<double> parse_entry(const json& e, bool complex_field,
                                        const char* where) {
  if (complex_field) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
        !e[1].is_number()) {
      throw ValidationError(std::string(where) +
                            ": complex entries must be [re, im] pairs");
    }
    return {e[0].get<double>(), e[1].get<double>()};
  }
  if (!e.is_number()) {
    throw ValidationError(std::string(where) +
                          ": real entries must be plain numbers");
  }
  return {e.get<double>(), 0.0};
}

inline std::vector<std::vector<std::complex<double>>> parse_rows(
    const json& arr, Index dim, bool complex_field, const char* where) {
  if (!arr.is_array()) {
    throw ValidationError(std::string(where) + ": expected an array of vectors");
  }
  std::vector<std::vector<std::complex<double>>> rows;
  rows.reserve(arr.size());
  for (const auto& row : arr) {
    if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
      throw ValidationError(std::string(where) +
                            ": every vector must have length equal to dim");
    }
    std::vector<std::complex<double>> out;
    out.reserve(row.size());
    for (const auto& e : row) out.push_back(parse_entry(e, complex_field, where));
    rows.push_back(std::move(out));
  }
  return rows;
}

inline ordered_json entry_to_json(const std::complex<double>& c,
                                  bool complex_field) {
  if (complex_field) return ordered_json::array({c.real(), c.imag()});
  return ordered_json(c.real());
}

}  // namespace detail

inline Instance parse_instance(const nlohmann::json& j) {
  Instance inst;
  if (!j.is_object()) throw ValidationError("instance: expected a JSON object");
  if (!j.contains("schema") || !j["schema"].is_number_integer() ||
      j["schema"].get<int>() != kSchemaVersion) {
    throw ValidationError("instance: unsupported or missing schema version");
  }
  if (!j.contains("field") || !j["field"].is_string()) {
    throw ValidationError("instance: missing field");
  }
  inst.field = j["field"].get<std::string>();
  if (inst.field != "real" && inst.field != "complex") {
    throw ValidationError("instance: field must be \"real\" or \"complex\"");
  }
  if (!j.contains("dim") || !j["dim"].is_number_integer() ||
      j["dim"].get<long>() < 1) {
    throw ValidationError("instance: dim must be a positive integer");
  }
  inst.dim = j["dim"].get<Index>();
  const bool cf = inst.complex_field();
  inst.prefix = detail::parse_rows(j.value("prefix", nlohmann::json::array()),
                                   inst.dim, cf, "prefix");
  inst.cycle = detail::parse_rows(j.value("cycle", nlohmann::json::array()),
                                  inst.dim, cf, "cycle");

  if (j.contains("epsilon")) {
    const auto& e = j["epsilon"];
    if (!e.is_object() || !e.contains("kind")) {
      throw ValidationError("epsilon: expected an object with a kind");
    }
    const std::string kind = e["kind"].get<std::string>();
    if (kind == "geometric") {
      inst.epsilon.kind = ScheduleKind::geometric;
      inst.epsilon.ratio = e.value("ratio", 0.5);
      inst.epsilon.mass = e.value("mass", 0.25);
      if (!(inst.epsilon.ratio > 0.0 && inst.epsilon.ratio < 1.0)) {
        throw ValidationError("epsilon: geometric ratio must lie in (0,1)");
      }
      if (!(inst.epsilon.mass > 0.0 && inst.epsilon.mass < 1.0)) {
        throw ValidationError(
            "epsilon: sum of squared accuracies must be < 1");
      }
    } else if (kind == "explicit") {
      inst.epsilon.kind = ScheduleKind::explicit_list;
      if (!e.contains("values") || !e["values"].is_array()) {
        throw ValidationError("epsilon: explicit schedule needs values");
      }
      double sum_sq = 0.0;
      for (const auto& v : e["values"]) {
        const double ev = v.get<double>();
        if (!(ev > 0.0)) {
          throw ValidationError("epsilon: values must be strictly positive");
        }
        inst.epsilon.values.push_back(ev);
        sum_sq += ev * ev;
      }
      if (!(sum_sq < 1.0)) {
        throw ValidationError(
            "epsilon: sum of squared accuracies must be < 1, got " +
            detail::fmt_value(sum_sq));
      }
    } else {
      throw ValidationError("epsilon: unknown kind \"" + kind + "\"");
    }
  }

  if (j.contains("weights")) {
    const auto& w = j["weights"];
    if (!w.is_object() || !w.contains("kind")) {
      throw ValidationError("weights: expected an object with a kind");
    }
    const std::string kind = w["kind"].get<std::string>();
    if (kind == "dyadic") {
      inst.weights.kind = WeightKind::dyadic;
    } else if (kind == "explicit") {
      inst.weights.kind = WeightKind::explicit_list;
      if (!w.contains("values") || !w["values"].is_array()) {
        throw ValidationError("weights: explicit weights need values");
      }
      for (const auto& v : w["values"]) {
        const double wv = v.get<double>();
        if (!(wv > 0.0)) {
          throw ValidationError("weights: values must be strictly positive");
        }
        inst.weights.values.push_back(wv);
      }
    } else {
      throw ValidationError("weights: unknown kind \"" + kind + "\"");
    }
  }

  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    inst.tol.rank_tol = t.value("rank_tol", inst.tol.rank_tol);
    inst.tol.residual_tol = t.value("residual_tol", inst.tol.residual_tol);
    inst.tol.neumann_tol = t.value("neumann_tol", inst.tol.neumann_tol);
  }
  inst.tol.validate();

  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) {
      throw ValidationError("instance: seed must be an integer");
    }
    inst.seed = j["seed"].get<std::uint64_t>();
  }
  return inst;
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("instance parse error: ") + e.what());
  }
  return parse_instance(j);
}

inline nlohmann::ordered_json instance_to_json(const Instance& inst) {
  using detail::ordered_json;
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["field"] = inst.field;
  j["dim"] = inst.dim;
  const bool cf = inst.complex_field();
  auto rows_to_json = [&](const std::vector<std::vector<std::complex<double>>>& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json r = ordered_json::array();
      for (const auto& c : row) r.push_back(detail::entry_to_json(c, cf));
      arr.push_back(std::move(r));
    }
    return arr;
  };
  j["prefix"] = rows_to_json(inst.prefix);
  j["cycle"] = rows_to_json(inst.cycle);
  if (inst.epsilon.kind == ScheduleKind::geometric) {
    j["epsilon"] = {{"kind", "geometric"},
                    {"ratio", inst.epsilon.ratio},
                    {"mass", inst.epsilon.mass}};
  } else {
    j["epsilon"] = {{"kind", "explicit"}, {"values", inst.epsilon.values}};
  }
  if (inst.weights.kind == WeightKind::dyadic) {
    j["weights"] = {{"kind", "dyadic"}};
  } else {
    j["weights"] = {{"kind", "explicit"}, {"values", inst.weights.values}};
  }
  j["tolerances"] = {{"rank_tol", inst.tol.rank_tol},
                     {"residual_tol", inst.tol.residual_tol},
                     {"neumann_tol", inst.tol.neumann_tol}};
  j["seed"] = inst.seed;
  return j;
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write instance file: " + path);
  out << instance_to_json(inst).dump(2) << "\n";
}

// ---- demo instances ------------------------------------------------------

inline Instance demo_standard_basis(Index dim) {
  if (dim < 1) throw ValidationError("demo: dim must be positive");
  Instance inst;
  inst.dim = dim;
  for (Index i = 0; i < dim; ++i) {
    std::vector<std::complex<double>> row(static_cast<std::size_t>(dim),
                                          {0.0, 0.0});
    row[static_cast<std::size_t>(i)] = {1.0, 0.0};
    inst.prefix.push_back(std::move(row));
  }
  inst.seed = 42;
  return inst;
}

// A dependent leading vector: (e1, e1, e2) in the plane.
inline Instance demo_redundant() {
  Instance inst;
  inst.dim = 2;
  inst.prefix = {{{1.0, 0.0}, {0.0, 0.0}},
                 {{1.0, 0.0}, {0.0, 0.0}},
                 {{0.0, 0.0}, {1.0, 0.0}}};
  inst.seed = 42;
  return inst;
}

// Prefix (e1) with the cycle (e2, e3): the tail tower stabilizes at the
// e2-e3 plane instead of {0}.
inline Instance demo_cyclic() {
  Instance inst;
  inst.dim = 3;
  inst.prefix = {{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}};
  inst.cycle = {{{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}},
                {{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}}};
  inst.seed = 42;
  return inst;
}

inline Instance demo_random(Index dim, Index prefix_len, Index cycle_len,
                            std::uint64_t seed, bool complex_field) {
  if (dim < 1) throw ValidationError("demo: dim must be positive");
  if (prefix_len < 0 || cycle_len < 0) {
    throw ValidationError("demo: lengths must be nonnegative");
  }
  if (prefix_len + cycle_len < dim) {
    throw ValidationError(
        "demo: prefix and cycle together need at least dim vectors to be "
        "total");
  }
  Instance inst;
  inst.field = complex_field ? "complex" : "real";
  inst.dim = dim;
  inst.seed = seed;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Rng rng(mix_seed(seed, 0xD0E5 + static_cast<std::uint64_t>(attempt)));
    auto draw = [&](Index count) {
      std::vector<std::vector<std::complex<double>>> rows;
      for (Index i = 0; i < count; ++i) {
        std::vector<std::complex<double>> row;
        row.reserve(static_cast<std::size_t>(dim));
        for (Index c = 0; c < dim; ++c) {
          const double re = rng.gaussian();
          const double im = complex_field ? rng.gaussian() : 0.0;
          row.emplace_back(re, im);
        }
        rows.push_back(std::move(row));
      }
      return rows;
    };
    inst.prefix = draw(prefix_len);
    inst.cycle = draw(cycle_len);
    const auto check_rank = [&]() -> Index {
      if (complex_field) {
        auto seq = inst.sequence<std::complex<double>>();
        return oracles::rank<std::complex<double>>(seq.generators(), dim,
                                                   inst.tol.rank_tol);
      }
      auto seq = inst.sequence<double>();
      return oracles::rank<double>(seq.generators(), dim, inst.tol.rank_tol);
    };
    if (check_rank() == dim) return inst;
  }
  throw TotalityError("demo: could not draw a total random instance");
}

}  // namespace tailframe
