#pragma once

// Trait-level and explanatory-variable-level views of questionnaire
// participants.
//
// A participant is annotated as a bit vector over T traits (1-based trait
// ids). Traits are grouped into explanatory variables:
//   - Likert variables: mutually exclusive ordered levels mapped onto a
//     numeric range by equal spacing;
//   - binary variables: a single open-ended trait.
// The explanatory form of a participant is the concatenation of the Likert
// values and the binary bits, in schema order.

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace personas {

enum class VariableKind { likert, binary };
enum class VariableSource { closed_question, open_question, composite };

const char* to_string(VariableKind kind) noexcept;
const char* to_string(VariableSource source) noexcept;

// Composite variables may be recomputed from two 5-level Likert variables:
// delta = level(to) - level(from).
struct CompositeRule {
  std::string from;
  std::string to;
};

struct VariableDef {
  std::string id;
  VariableKind kind = VariableKind::binary;
  std::vector<int> trait_levels;  // 1-based trait ids, ascending semantic order
  double range_min = 0.0;
  double range_max = 1.0;
  VariableSource source = VariableSource::open_question;
  std::optional<CompositeRule> derive;

  double range() const { return range_max - range_min; }
  std::size_t level_count() const { return trait_levels.size(); }
  // Numeric value of level j, equally spaced over [range_min, range_max].
  double level_value(std::size_t j) const;
};

class VariableSchema {
 public:
  VariableSchema() = default;
  // Throws Error(schema_error) unless the variables partition 1..trait_count.
  VariableSchema(int trait_count, std::vector<VariableDef> variables,
                 std::vector<std::string> trait_labels = {});

  int trait_count() const { return trait_count_; }
  int likert_count() const { return static_cast<int>(likert_.size()); }
  int binary_count() const { return static_cast<int>(binary_.size()); }
  int variable_count() const { return static_cast<int>(variables_.size()); }

  const std::vector<VariableDef>& variables() const { return variables_; }
  const VariableDef& variable(std::size_t i) const { return variables_.at(i); }
  // Positions (into variables()) of the Likert / binary variables, in order.
  const std::vector<int>& likert_variables() const { return likert_; }
  const std::vector<int>& binary_variables() const { return binary_; }

  // Variable index owning trait t (1-based), and the level position of t.
  int variable_of_trait(int t) const { return owner_.at(t - 1); }
  int level_of_trait(int t) const { return level_.at(t - 1); }

  std::optional<int> find(const std::string& id) const;
  const std::string& trait_label(int t) const { return labels_.at(t - 1); }

  double likert_range_sum() const;

 private:
  int trait_count_ = 0;
  std::vector<VariableDef> variables_;
  std::vector<std::string> labels_;
  std::vector<int> owner_;
  std::vector<int> level_;
  std::vector<int> likert_;
  std::vector<int> binary_;
};

using TraitBits = std::vector<std::uint8_t>;  // index t-1 holds trait t

struct ExplanatoryVector {
  std::vector<double> likert;
  std::vector<std::uint8_t> binary;

  bool operator==(const ExplanatoryVector&) const = default;
};

struct ParticipantRecord {
  std::string id;
  TraitBits traits;
  ExplanatoryVector explanatory;
};

struct Violation {
  std::string variable;
  int count = 0;

  bool operator==(const Violation&) const = default;
};

enum class DatasetRole { generation, validation };

// Traits kept after masking. Empty `active` means nothing is masked.
struct TraitMask {
  std::vector<bool> active;

  bool is_active(int t) const { return active.empty() || active.at(t - 1); }
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::shared_ptr<const VariableSchema> schema,
          std::vector<ParticipantRecord> participants,
          DatasetRole role = DatasetRole::generation, TraitMask mask = {});

  const VariableSchema& schema() const { return *schema_; }
  const std::shared_ptr<const VariableSchema>& schema_ptr() const { return schema_; }
  const std::vector<ParticipantRecord>& participants() const { return participants_; }
  const ParticipantRecord& participant(std::size_t i) const { return participants_.at(i); }
  std::size_t size() const { return participants_.size(); }
  bool empty() const { return participants_.empty(); }
  DatasetRole role() const { return role_; }
  const TraitMask& mask() const { return mask_; }

  // Normalizers of the dissimilarity, restricted to unmasked variables.
  double active_likert_range_sum() const;
  int active_binary_count() const;
  bool likert_active(int variable_index) const;

  Dataset subset(const std::vector<int>& indices) const;

 private:
  std::shared_ptr<const VariableSchema> schema_;
  std::vector<ParticipantRecord> participants_;
  DatasetRole role_ = DatasetRole::generation;
  TraitMask mask_;
};

// Empty iff every Likert variable has exactly one set level.
// Throws Error(invalid_argument) on a length mismatch.
std::vector<Violation> validate_record(const VariableSchema& schema, const TraitBits& traits);

// Throws Error(validation_failed) if the record does not validate.
ExplanatoryVector to_explanatory(const VariableSchema& schema, const TraitBits& traits);

// Seven ordered change categories: 0..2 decrease (drastic, significant,
// slight), 3 none, 4..6 increase (slight, significant, drastic).
enum class ChangeCategory : int {
  drastic_decrease = 0,
  significant_decrease,
  slight_decrease,
  none,
  slight_increase,
  significant_increase,
  drastic_increase,
};

const char* to_string(ChangeCategory c) noexcept;

// Bins a signed level difference in -4..4 into a 7-level category.
ChangeCategory bin_difference(int delta);

struct Composites {
  ChangeCategory delta_importance;
  ChangeCategory control_mismatch;
};

// Inputs are 0..4 level indices of 5-level variables. Importance change is
// end - initial; control mismatch is perceived - desired (negative means
// less control than wanted).
Composites derive_composites(int importance_initial, int importance_end, int control_desired,
                             int control_perceived);

// Fills composite variables declaring a `derive` rule when the record has no
// level set for them. Returns the updated bits.
TraitBits fill_derived_composites(const VariableSchema& schema, TraitBits traits);

// Zeroes every trait outside `keep` (intersected with any existing mask).
// A Likert variable stays active iff at least one of its levels is kept.
Dataset mask_traits(const Dataset& dataset, const std::set<int>& keep);

}  // namespace personas
