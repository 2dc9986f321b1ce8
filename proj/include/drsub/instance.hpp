#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "drsub/model.hpp"
#include "drsub/problems.hpp"

namespace drsub {

enum class InstanceKind { quadratic, uncap_covering, cap_covering, influence_max };

const char* kind_name(InstanceKind kind);
InstanceKind kind_from_name(const std::string& name);  // std::invalid_argument

/// A generated benchmark instance plus the metadata needed to reproduce it.
struct Instance {
  InstanceKind kind = InstanceKind::quadratic;
  std::uint64_t seed = 0;
  int n = 0;
  double budget = 0.0;
  std::variant<problems::QuadraticInstance, problems::CoveringInstance,
               problems::InfluenceInstance>
      payload;
};

Instance gen_instance(InstanceKind kind, int n, int size_param, double budget,
                      std::uint64_t seed);

/// Serialization is canonical: fixed key order, no whitespace, every float
/// printed with 17 significant digits so values round-trip exactly and two
/// runs with the same seed produce byte-identical files.
std::string to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);  // std::invalid_argument

std::string read_text_file(const std::string& path);   // std::runtime_error
void write_text_file(const std::string& path, const std::string& text);

/// Binds the instance to value/gradient oracles, the unit box, and its linear
/// constraints (Ax <= 1 for quadratics, the budget row otherwise). Derived
/// tables are built once here; the returned callables are pure and safe to
/// call concurrently.
OracleProblem make_oracle(const Instance& inst);

}  // namespace drsub
