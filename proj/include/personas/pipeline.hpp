#pragma once

// End-to-end persona elicitation and the independent soundness verifier.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "personas/divisive_clustering.hpp"
#include "personas/dissimilarity.hpp"
#include "personas/feature_model.hpp"
#include "personas/selection_pruning.hpp"

namespace personas {

struct RunConfig {
  std::filesystem::path schema_path;
  std::filesystem::path data_path;
  std::optional<std::filesystem::path> validation_data_path;
  double alpha = 0.05;
  double selection_threshold = 0.001;
  int selection_levels = 15;
  int boschloo_grid = 1000;
  int fm_samples = 500;
  int r_max = 6;
  std::uint64_t seed = 0;
  SplitRule split_rule = SplitRule::diameter;
  std::filesystem::path output_dir = "personas_out";
  int threads = 0;  // 0: OpenMP default
  bool drop_invalid = false;

  // Throws Error(invalid_argument) on out-of-range values.
  void validate() const;
  nlohmann::json to_json() const;
  // Keys present in `j` override the fields of `base`.
  static RunConfig from_json(const nlohmann::json& j, RunConfig base);
  static RunConfig from_json(const nlohmann::json& j) { return from_json(j, RunConfig{}); }
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  SelectionReport selection;
  std::vector<int> traits;         // retained traits S, ascending
  Dataset masked;
  Dendrogram initial;
  Dendrogram final_tree;           // descriptors over the unmasked data
  std::vector<int> step1_leaves;
  PersonaSet personas;
  PruneOptions prune;
  bool selection_given = false;    // retained set supplied instead of selected
  std::vector<StageTiming> timings;
};

// Runs every stage in memory on an already loaded dataset. With `retained`
// the initial dendrogram and selection are skipped.
PipelineResult run_pipeline(const Dataset& dataset, const RunConfig& config,
                            const std::set<int>* retained = nullptr);

// Writes dendrogram.json, dendrogram_initial.json, selection.json,
// personas.json, descriptors.csv, report.md and manifest.json into
// config.output_dir (the initial dendrogram and selection only when they were
// computed). Returns the written file names.
std::vector<std::string> export_pipeline(const PipelineResult& result, const Dataset& dataset,
                                         const RunConfig& config);

// Manifest inputs whose current SHA-256 differs from the recorded one.
std::vector<std::string> manifest_mismatches(const nlohmann::json& manifest);

struct VerifyReport {
  int personas = 0;
  int pairs_checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Re-checks an exported persona document against the data: personas must
// partition the participants, every pair needs a Holm rejection at the
// recorded alpha and family size and a pair of disjoint Agresti intervals.
// p-values are recomputed by direct enumeration, independently of the
// batched engine used by the pipeline.
VerifyReport verify_personas(const nlohmann::json& personas, const Dataset& dataset, int boschloo_grid = 1000);

}  // namespace personas
