#pragma once

// File formats. Every JSON document carries "format_version"; CSV data files
// may start with a "# format_version=1" comment line.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "personas/divisive_clustering.hpp"
#include "personas/dissimilarity.hpp"
#include "personas/error.hpp"
#include "personas/feature_model.hpp"
#include "personas/projections.hpp"
#include "personas/selection_pruning.hpp"
#include "personas/validation.hpp"

namespace personas::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

struct RecordDiagnostic {
  std::string participant;
  std::vector<Violation> violations;
};

// Thrown by load_dataset when records fail validation and dropping is off.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<RecordDiagnostic> diagnostics);
  const std::vector<RecordDiagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<RecordDiagnostic> diagnostics_;
};

struct LoadOptions {
  bool drop_invalid = false;       // drop invalid records instead of failing
  bool derive_composites = true;   // fill empty composite variables from their rule
  DatasetRole role = DatasetRole::generation;
};

struct LoadResult {
  Dataset dataset;
  std::vector<RecordDiagnostic> dropped;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

std::shared_ptr<const VariableSchema> schema_from_json(const json& j);
json schema_to_json(const VariableSchema& schema);
std::shared_ptr<const VariableSchema> load_schema(const std::filesystem::path& path);

struct RawRecord {
  std::string id;
  TraitBits traits;
};

// CSV (id column + T 0/1 columns) or JSON {format_version, participants:
// [{id, set_traits}]}; the format is detected from the first character.
std::vector<RawRecord> parse_data(const std::string& text, int trait_count);
std::string data_to_csv(const std::vector<RawRecord>& records, int trait_count);
json data_to_json(const std::vector<RawRecord>& records);

LoadResult build_dataset(std::shared_ptr<const VariableSchema> schema, std::vector<RawRecord> records,
                         const LoadOptions& options = {});
LoadResult load_dataset(const std::filesystem::path& schema_file, const std::filesystem::path& data_file,
                        const LoadOptions& options = {});
LoadResult load_dataset(std::shared_ptr<const VariableSchema> schema, const std::filesystem::path& data_file,
                        const LoadOptions& options = {});

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

std::string matrix_csv(const Matrix& m, const std::vector<std::string>& row_ids,
                       const std::vector<std::string>& col_ids);
std::string distance_matrix_csv(const DistanceMatrix& dm, const Dataset& dataset);

// Cached matrix: magic "PDMX", u32 version, u64 n, u8 diagonal policy, then
// n*n little-endian IEEE-754 doubles in row-major order.
std::string distance_matrix_binary(const DistanceMatrix& dm);
DistanceMatrix distance_matrix_from_binary(const std::string& bytes);

json dendrogram_to_json(const Dendrogram& tree, const Dataset& dataset);
std::string descriptors_csv(const Dendrogram& tree, const std::vector<int>& nodes, const VariableSchema& schema);

json selection_to_json(const SelectionReport& report, const VariableSchema& schema, double threshold);
std::set<int> retained_from_json(const json& j);

json personas_to_json(const PersonaSet& set, const Dendrogram& tree, const Dataset& dataset,
                      const PruneOptions& options);
std::string persona_markdown(const PersonaSet& set, const Dendrogram& tree, const Dataset& dataset);

std::string fm_csv(const FMReport& report);
std::string fm_samples_csv(const FMReport& report);
json saturation_to_json(const SaturationReport& report);

std::string projection_csv(const std::vector<ProjectedPoint>& points, const std::string& spec_name);
ProjectionSpec projection_spec_from_json(const json& j);

std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

}  // namespace personas::io
