#pragma once

// Stability and saturation diagnostics.

#include <cstdint>
#include <string>
#include <vector>

#include "personas/divisive_clustering.hpp"
#include "personas/dissimilarity.hpp"
#include "personas/feature_model.hpp"

namespace personas {

// Pair-counting Fowlkes-Mallows index TP / sqrt((TP+FP)(TP+FN)).
// Returns 0 when TP = 0, except that two labelings with no co-clustered pairs
// at all (identical pair sets) score 1.
double fowlkes_mallows(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

// Hubert-Arabie adjusted Rand index; 1 for identical partitions.
double adjusted_rand_index(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

struct SensitivityConfig {
  std::vector<int> r_values{1, 2, 3, 4, 5, 6};
  std::vector<int> levels;      // cut sizes v
  int samples = 500;
  std::uint64_t seed = 0;
  SplitRule split_rule = SplitRule::diameter;
  bool keep_distributions = false;
};

struct FMReport {
  std::vector<int> r_values;
  std::vector<int> levels;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> mean_fm;  // [r][v]
  // [r][v][sample]; empty unless requested.
  std::vector<std::vector<std::vector<double>>> distributions;
};

// For each r and sample: drop r participants uniformly at random (seeded per
// (r, sample)), rebuild the dendrogram on the survivors and compare each cut
// with the full tree's cut restricted to the same survivors. Samples run in
// parallel; the report does not depend on the thread count.
FMReport sensitivity_analysis(const DistanceMatrix& dm, const SensitivityConfig& config);
// Reference implementation with the same per-sample seeds, single-threaded.
FMReport sensitivity_analysis_serial(const DistanceMatrix& dm, const SensitivityConfig& config);

enum class OutlierRule { tukey, zscore };

struct SaturationOptions {
  OutlierRule rule = OutlierRule::tukey;
  bool two_sided = false;        // also flag distances below the lower bound
  double z_threshold = 3.0;
};

struct SaturationReport {
  std::vector<double> d1;        // nearest-neighbour distance within the generation set
  std::vector<double> d2;        // nearest generation neighbour of each validation record
  double d1_mean = 0.0;
  double d1_std = 0.0;           // population standard deviation
  bool z_defined = false;
  std::vector<double> z_scores;  // of d2 against d1; empty when d1 has zero variance
  double q1 = 0.0;
  double q3 = 0.0;
  double fence_lo = 0.0;
  double fence_hi = 0.0;
  std::vector<int> outlier_indices;
  std::vector<std::string> outliers;  // validation participant ids
  SaturationOptions options;
};

// Linear-interpolation quantile of a sample (sorted internally).
double quantile(std::vector<double> values, double q);

// `within` is the generation matrix (its diagonal is ignored), `cross` is
// |gen| x |val|.
SaturationReport saturation_from_matrices(const DistanceMatrix& within, const Matrix& cross,
                                          const std::vector<std::string>& validation_ids,
                                          const SaturationOptions& options = {});

SaturationReport saturation_check(const Dataset& gen, const Dataset& val,
                                  const SaturationOptions& options = {});

}  // namespace personas
