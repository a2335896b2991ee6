#include "personas/feature_model.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_set>

#include "personas/error.hpp"

namespace personas {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::schema_error: return "schema_error";
    case ErrorCode::data_error: return "data_error";
    case ErrorCode::validation_failed: return "validation_failed";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

const char* to_string(VariableKind kind) noexcept {
  return kind == VariableKind::likert ? "likert" : "binary";
}

const char* to_string(VariableSource source) noexcept {
  switch (source) {
    case VariableSource::closed_question: return "closed_question";
    case VariableSource::open_question: return "open_question";
    case VariableSource::composite: return "composite";
  }
  return "unknown";
}

const char* to_string(ChangeCategory c) noexcept {
  switch (c) {
    case ChangeCategory::drastic_decrease: return "drastic decrease";
    case ChangeCategory::significant_decrease: return "significant decrease";
    case ChangeCategory::slight_decrease: return "slight decrease";
    case ChangeCategory::none: return "no change";
    case ChangeCategory::slight_increase: return "slight increase";
    case ChangeCategory::significant_increase: return "significant increase";
    case ChangeCategory::drastic_increase: return "drastic increase";
  }
  return "unknown";
}

double VariableDef::level_value(std::size_t j) const {
  const std::size_t m = trait_levels.size();
  if (m < 2) return range_min;
  return range_min + static_cast<double>(j) * (range_max - range_min) / static_cast<double>(m - 1);
}

VariableSchema::VariableSchema(int trait_count, std::vector<VariableDef> variables,
                               std::vector<std::string> trait_labels)
    : trait_count_(trait_count), variables_(std::move(variables)), labels_(std::move(trait_labels)) {
  if (trait_count_ < 1) throw Error(ErrorCode::schema_error, "trait_count must be positive");
  if (labels_.empty()) {
    labels_.reserve(trait_count_);
    for (int t = 1; t <= trait_count_; ++t) labels_.push_back("t_" + std::to_string(t));
  }
  if (static_cast<int>(labels_.size()) != trait_count_)
    throw Error(ErrorCode::schema_error, "trait label count does not match trait_count");

  owner_.assign(trait_count_, -1);
  level_.assign(trait_count_, -1);
  std::unordered_set<std::string> ids;
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    const VariableDef& def = variables_[v];
    if (def.id.empty()) throw Error(ErrorCode::schema_error, "variable with empty id");
    if (!ids.insert(def.id).second)
      throw Error(ErrorCode::schema_error, "duplicate variable id " + def.id);
    if (def.kind == VariableKind::likert) {
      if (def.trait_levels.size() < 2)
        throw Error(ErrorCode::schema_error, "Likert variable " + def.id + " needs >= 2 levels");
      if (!(def.range_max > def.range_min))
        throw Error(ErrorCode::schema_error, "Likert variable " + def.id + " has an empty range");
      likert_.push_back(static_cast<int>(v));
    } else {
      if (def.trait_levels.size() != 1)
        throw Error(ErrorCode::schema_error, "binary variable " + def.id + " must have one trait");
      binary_.push_back(static_cast<int>(v));
    }
    for (std::size_t j = 0; j < def.trait_levels.size(); ++j) {
      const int t = def.trait_levels[j];
      if (t < 1 || t > trait_count_)
        throw Error(ErrorCode::schema_error,
                    "variable " + def.id + " references unknown trait " + std::to_string(t));
      if (owner_[t - 1] != -1)
        throw Error(ErrorCode::schema_error,
                    "trait " + std::to_string(t) + " belongs to more than one variable");
      owner_[t - 1] = static_cast<int>(v);
      level_[t - 1] = static_cast<int>(j);
    }
  }
  for (int t = 1; t <= trait_count_; ++t)
    if (owner_[t - 1] == -1)
      throw Error(ErrorCode::schema_error, "trait " + std::to_string(t) + " has no variable");

  for (const VariableDef& def : variables_) {
    if (!def.derive) continue;
    for (const std::string& ref : {def.derive->from, def.derive->to}) {
      const auto idx = find(ref);
      if (!idx || variables_[*idx].kind != VariableKind::likert ||
          variables_[*idx].level_count() != 5)
        throw Error(ErrorCode::schema_error,
                    "composite " + def.id + " must derive from 5-level Likert variables");
    }
    if (def.kind != VariableKind::likert || def.level_count() != 7)
      throw Error(ErrorCode::schema_error, "derived composite " + def.id + " must have 7 levels");
  }
}

std::optional<int> VariableSchema::find(const std::string& id) const {
  for (std::size_t v = 0; v < variables_.size(); ++v)
    if (variables_[v].id == id) return static_cast<int>(v);
  return std::nullopt;
}

double VariableSchema::likert_range_sum() const {
  double sum = 0.0;
  for (int v : likert_) sum += variables_[v].range();
  return sum;
}

namespace {

// Position of the single set level, or -1 when zero or several are set.
int set_level(const VariableDef& def, const TraitBits& traits, int* count) {
  int found = -1;
  int n = 0;
  for (std::size_t j = 0; j < def.trait_levels.size(); ++j) {
    if (traits[def.trait_levels[j] - 1]) {
      ++n;
      found = static_cast<int>(j);
    }
  }
  if (count) *count = n;
  return n == 1 ? found : -1;
}

void check_length(const VariableSchema& schema, const TraitBits& traits) {
  if (static_cast<int>(traits.size()) != schema.trait_count())
    throw Error(ErrorCode::invalid_argument,
                "trait vector has length " + std::to_string(traits.size()) + ", expected " +
                    std::to_string(schema.trait_count()));
}

}  // namespace

std::vector<Violation> validate_record(const VariableSchema& schema, const TraitBits& traits) {
  check_length(schema, traits);
  std::vector<Violation> out;
  for (int v : schema.likert_variables()) {
    int count = 0;
    set_level(schema.variable(v), traits, &count);
    if (count != 1) out.push_back({schema.variable(v).id, count});
  }
  return out;
}

ExplanatoryVector to_explanatory(const VariableSchema& schema, const TraitBits& traits) {
  const auto violations = validate_record(schema, traits);
  if (!violations.empty())
    throw Error(ErrorCode::validation_failed,
                "record violates Likert exclusivity in " + violations.front().variable);
  ExplanatoryVector out;
  out.likert.reserve(schema.likert_count());
  for (int v : schema.likert_variables()) {
    const VariableDef& def = schema.variable(v);
    out.likert.push_back(def.level_value(set_level(def, traits, nullptr)));
  }
  out.binary.reserve(schema.binary_count());
  for (int v : schema.binary_variables())
    out.binary.push_back(traits[schema.variable(v).trait_levels.front() - 1] ? 1 : 0);
  return out;
}

ChangeCategory bin_difference(int delta) {
  if (delta < -4 || delta > 4)
    throw Error(ErrorCode::invalid_argument, "level difference out of range: " + std::to_string(delta));
  const int magnitude = std::abs(delta);
  int step = 0;
  if (magnitude == 4) step = 3;
  else if (magnitude >= 2) step = 2;
  else if (magnitude == 1) step = 1;
  const int centre = static_cast<int>(ChangeCategory::none);
  return static_cast<ChangeCategory>(delta < 0 ? centre - step : centre + step);
}

Composites derive_composites(int importance_initial, int importance_end, int control_desired,
                             int control_perceived) {
  for (int level : {importance_initial, importance_end, control_desired, control_perceived})
    if (level < 0 || level > 4)
      throw Error(ErrorCode::invalid_argument, "level index out of range 0..4: " + std::to_string(level));
  return {bin_difference(importance_end - importance_initial),
          bin_difference(control_perceived - control_desired)};
}

TraitBits fill_derived_composites(const VariableSchema& schema, TraitBits traits) {
  check_length(schema, traits);
  for (const VariableDef& def : schema.variables()) {
    if (!def.derive) continue;
    int count = 0;
    set_level(def, traits, &count);
    if (count != 0) continue;
    const int from = set_level(schema.variable(*schema.find(def.derive->from)), traits, nullptr);
    const int to = set_level(schema.variable(*schema.find(def.derive->to)), traits, nullptr);
    if (from < 0 || to < 0) continue;  // left for validate_record to report
    const auto category = bin_difference(to - from);
    traits[def.trait_levels[static_cast<int>(category)] - 1] = 1;
  }
  return traits;
}

Dataset::Dataset(std::shared_ptr<const VariableSchema> schema,
                 std::vector<ParticipantRecord> participants, DatasetRole role, TraitMask mask)
    : schema_(std::move(schema)), participants_(std::move(participants)), role_(role),
      mask_(std::move(mask)) {
  if (!schema_) throw Error(ErrorCode::invalid_argument, "dataset without schema");
  if (!mask_.active.empty() && static_cast<int>(mask_.active.size()) != schema_->trait_count())
    throw Error(ErrorCode::invalid_argument, "mask length does not match trait_count");
  std::unordered_set<std::string> ids;
  for (const auto& p : participants_) {
    if (!ids.insert(p.id).second)
      throw Error(ErrorCode::data_error, "duplicate participant id " + p.id);
    check_length(*schema_, p.traits);
  }
}

bool Dataset::likert_active(int variable_index) const {
  const VariableDef& def = schema_->variable(variable_index);
  return std::any_of(def.trait_levels.begin(), def.trait_levels.end(),
                     [&](int t) { return mask_.is_active(t); });
}

double Dataset::active_likert_range_sum() const {
  double sum = 0.0;
  for (int v : schema_->likert_variables())
    if (likert_active(v)) sum += schema_->variable(v).range();
  return sum;
}

int Dataset::active_binary_count() const {
  int count = 0;
  for (int v : schema_->binary_variables())
    if (mask_.is_active(schema_->variable(v).trait_levels.front())) ++count;
  return count;
}

Dataset Dataset::subset(const std::vector<int>& indices) const {
  std::vector<ParticipantRecord> out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(participants_.at(i));
  return Dataset(schema_, std::move(out), role_, mask_);
}

Dataset mask_traits(const Dataset& dataset, const std::set<int>& keep) {
  const VariableSchema& schema = dataset.schema();
  const int T = schema.trait_count();
  TraitMask mask;
  mask.active.assign(T, false);
  for (int t = 1; t <= T; ++t) mask.active[t - 1] = keep.count(t) > 0 && dataset.mask().is_active(t);

  std::vector<bool> likert_on;
  for (int v : schema.likert_variables()) {
    const auto& levels = schema.variable(v).trait_levels;
    likert_on.push_back(std::any_of(levels.begin(), levels.end(),
                                    [&](int t) { return static_cast<bool>(mask.active[t - 1]); }));
  }

  std::vector<ParticipantRecord> records;
  records.reserve(dataset.size());
  for (const ParticipantRecord& p : dataset.participants()) {
    ParticipantRecord q = p;
    for (int t = 1; t <= T; ++t)
      if (!mask.active[t - 1]) q.traits[t - 1] = 0;
    for (std::size_t k = 0; k < likert_on.size(); ++k)
      if (!likert_on[k]) q.explanatory.likert[k] = schema.variable(schema.likert_variables()[k]).range_min;
    for (std::size_t k = 0; k < q.explanatory.binary.size(); ++k) {
      const int t = schema.variable(schema.binary_variables()[k]).trait_levels.front();
      if (!mask.active[t - 1]) q.explanatory.binary[k] = 0;
    }
    records.push_back(std::move(q));
  }
  return Dataset(dataset.schema_ptr(), std::move(records), dataset.role(), std::move(mask));
}

}  // namespace personas
