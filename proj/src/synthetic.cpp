#include "personas/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <string>

#include "personas/error.hpp"
#include "personas/rng.hpp"

namespace personas {

namespace {

VariableDef likert(std::string id, int first, int last, VariableSource source) {
  VariableDef def;
  def.id = std::move(id);
  def.kind = VariableKind::likert;
  for (int t = first; t <= last; ++t) def.trait_levels.push_back(t);
  def.source = source;
  return def;
}

// Extended Hamming [8,4,4] codewords for messages 1..8, extended with two
// extra bits so every closed question is used.
std::array<int, 10> codeword(int archetype) {
  const int m = archetype + 1;
  const int d[4] = {m & 1, (m >> 1) & 1, (m >> 2) & 1, (m >> 3) & 1};
  std::array<int, 10> c{};
  c[0] = d[0];
  c[1] = d[1];
  c[2] = d[2];
  c[3] = d[3];
  c[4] = d[0] ^ d[1] ^ d[3];
  c[5] = d[0] ^ d[2] ^ d[3];
  c[6] = d[1] ^ d[2] ^ d[3];
  c[7] = (c[0] + c[1] + c[2] + c[3] + c[4] + c[5] + c[6]) & 1;
  c[8] = d[0] ^ d[2];
  c[9] = d[1] ^ d[3];
  return c;
}

int jitter(std::mt19937_64& engine, int level, int levels, double p) {
  if (uniform_unit(engine) >= p) return level;
  if (level == 0) return 1;
  if (level == levels - 1) return levels - 2;
  return uniform_below(engine, 2) ? level + 1 : level - 1;
}

}  // namespace

std::shared_ptr<const VariableSchema> reference_schema() {
  using S = VariableSource;
  std::vector<VariableDef> vars = {
      likert("l_1", 1, 3, S::open_question),      likert("l_2", 4, 8, S::open_question),
      likert("l_3", 9, 13, S::closed_question),   likert("l_4", 14, 18, S::closed_question),
      likert("l_5", 19, 23, S::closed_question),  likert("l_6", 24, 26, S::closed_question),
      likert("l_7", 27, 29, S::closed_question),  likert("l_8", 30, 34, S::closed_question),
      likert("l_9", 35, 39, S::closed_question),  likert("l_10", 40, 42, S::closed_question),
      likert("l_11", 43, 47, S::closed_question), likert("l_12", 48, 52, S::closed_question),
      likert("l_13", 53, 59, S::composite),       likert("l_14", 60, 66, S::composite),
  };
  vars[12].derive = CompositeRule{"l_3", "l_12"};
  vars[13].derive = CompositeRule{"l_5", "l_9"};
  for (int t = 67; t <= 133; ++t) {
    VariableDef def;
    def.id = "b_" + std::to_string(t - 66);
    def.trait_levels = {t};
    vars.push_back(std::move(def));
  }
  return std::make_shared<const VariableSchema>(133, std::move(vars));
}

PlantedData generate_planted(const PlantedConfig& config) {
  const auto schema = reference_schema();
  const int k = static_cast<int>(config.sizes.size());
  if (k < 1 || k > 8) throw Error(ErrorCode::invalid_argument, "planted generator supports 1..8 archetypes");
  if (config.signature_traits < 0 || k * config.signature_traits > schema->binary_count())
    throw Error(ErrorCode::invalid_argument, "not enough binary traits for the signatures");
  for (int s : config.sizes)
    if (s < 1) throw Error(ErrorCode::invalid_argument, "archetype sizes must be positive");

  std::mt19937_64 engine(derive_seed(config.seed, 0x706c616e74ULL));
  const auto& likert_ids = schema->likert_variables();
  const auto& binary_ids = schema->binary_variables();

  std::vector<int> labels;
  for (int a = 0; a < k; ++a) labels.insert(labels.end(), config.sizes[a], a);
  for (std::size_t i = labels.size(); i > 1; --i)
    std::swap(labels[i - 1], labels[uniform_below(engine, i)]);

  std::vector<ParticipantRecord> records;
  records.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int a = labels[i];
    const auto code = codeword(a);
    TraitBits bits(schema->trait_count(), 0);
    for (std::size_t v = 0; v < likert_ids.size(); ++v) {
      const VariableDef& def = schema->variable(likert_ids[v]);
      if (def.source == VariableSource::composite) continue;
      const int levels = static_cast<int>(def.level_count());
      const bool closed = def.source == VariableSource::closed_question;
      int level = levels / 2;  // open questions sit mid-scale
      if (closed) level = code[v - 2] ? levels - 1 : 0;
      const double p = closed ? config.closed_noise : config.open_noise;
      bits[def.trait_levels[jitter(engine, level, levels, p)] - 1] = 1;
    }
    for (std::size_t b = 0; b < binary_ids.size(); ++b) {
      const int t = schema->variable(binary_ids[b]).trait_levels.front();
      const int owner = static_cast<int>(b) / std::max(config.signature_traits, 1);
      const bool signature = config.signature_traits > 0 && owner < k;
      if (signature) bits[t - 1] = owner == a;
      else bits[t - 1] = uniform_unit(engine) < config.binary_noise;
    }
    bits = fill_derived_composites(*schema, std::move(bits));
    char id[32];
    std::snprintf(id, sizeof id, "p%03zu", i + 1);
    ExplanatoryVector ex = to_explanatory(*schema, bits);
    records.push_back({id, std::move(bits), std::move(ex)});
  }
  return {Dataset(schema, std::move(records)), std::move(labels)};
}

}  // namespace personas
