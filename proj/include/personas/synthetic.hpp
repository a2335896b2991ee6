#pragma once

// Reference questionnaire schema and a planted-archetype data generator used
// for recovery tests, benchmarks and the `generate` subcommand.

#include <cstdint>
#include <memory>
#include <vector>

#include "personas/feature_model.hpp"

namespace personas {

// 133 traits: l_1..l_14 Likert (l_13, l_14 derived composites) and
// b_1..b_67 binary on traits 67..133. All Likert ranges are [0, 1].
std::shared_ptr<const VariableSchema> reference_schema();

struct PlantedConfig {
  std::vector<int> sizes = {14, 18, 11, 17, 18, 18, 11, 23};
  int signature_traits = 3;     // binary traits set for every member of an archetype
  double open_noise = 0.03;     // chance an open-question Likert answer moves one level
  double closed_noise = 0.0;    // same for closed questions
  double binary_noise = 0.08;   // chance a non-signature binary trait is set
  std::uint64_t seed = 1;
};

struct PlantedData {
  Dataset dataset;
  std::vector<int> labels;      // archetype per participant
};

// Archetypes answer the closed Likert questions at opposite extremes
// according to codewords at pairwise Hamming distance >= 4; participants
// are shuffled so archetypes are not contiguous. Requires at most 8
// archetypes on the reference schema.
PlantedData generate_planted(const PlantedConfig& config);

}  // namespace personas
