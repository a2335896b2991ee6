#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "personas/feature_model.hpp"

namespace testing_util {

using namespace personas;

inline VariableDef likert_var(std::string id, int first, int last, double lo = 0.0, double hi = 1.0,
                              VariableSource source = VariableSource::closed_question) {
  VariableDef d;
  d.id = std::move(id);
  d.kind = VariableKind::likert;
  for (int t = first; t <= last; ++t) d.trait_levels.push_back(t);
  d.range_min = lo;
  d.range_max = hi;
  d.source = source;
  return d;
}

inline VariableDef binary_var(std::string id, int t) {
  VariableDef d;
  d.id = std::move(id);
  d.trait_levels = {t};
  return d;
}

// Two 3-level Likert variables (traits 1-6) and `binary` binary traits.
inline std::shared_ptr<const VariableSchema> toy_schema(int binary = 4) {
  std::vector<VariableDef> vars = {likert_var("l_a", 1, 3), likert_var("l_b", 4, 6, 0.0, 1.0,
                                                                       VariableSource::open_question)};
  for (int k = 0; k < binary; ++k) vars.push_back(binary_var("b_" + std::to_string(k + 1), 7 + k));
  return std::make_shared<const VariableSchema>(6 + binary, std::move(vars));
}

// Random valid trait vector.
inline TraitBits random_bits(const VariableSchema& s, std::mt19937_64& rng, double p_binary = 0.5) {
  TraitBits bits(s.trait_count(), 0);
  for (const auto& def : s.variables()) {
    if (def.kind == VariableKind::likert) {
      std::uniform_int_distribution<std::size_t> pick(0, def.level_count() - 1);
      bits[def.trait_levels[pick(rng)] - 1] = 1;
    } else {
      bits[def.trait_levels[0] - 1] = std::bernoulli_distribution(p_binary)(rng);
    }
  }
  return bits;
}

inline Dataset random_dataset(std::shared_ptr<const VariableSchema> s, int n, std::uint64_t seed,
                              double p_binary = 0.5) {
  std::mt19937_64 rng(seed);
  std::vector<ParticipantRecord> ps;
  for (int i = 0; i < n; ++i) {
    TraitBits bits = random_bits(*s, rng, p_binary);
    ExplanatoryVector ex = to_explanatory(*s, bits);
    ps.push_back({"p" + std::to_string(i), std::move(bits), std::move(ex)});
  }
  return Dataset(std::move(s), std::move(ps));
}

}  // namespace testing_util
