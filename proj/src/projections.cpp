#include "personas/projections.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "personas/error.hpp"

namespace personas {

namespace {

Axis axis(std::string name, std::vector<std::pair<std::string, double>> weights) {
  return Axis{std::move(name), std::move(weights)};
}

const std::map<std::string, Axis>& builtin_axes() {
  static const std::map<std::string, Axis> axes = {
      {"knowledge", axis("knowledge", {{"l_6", 1.0 / 3}, {"l_7", 1.0 / 3}, {"l_8", 1.0 / 3}})},
      {"behaviour", axis("behaviour", {{"l_1", 1.0}})},
      {"pet_decision", axis("pet_decision", {{"l_11", 1.0}})},
      {"pet_efficacy", axis("pet_efficacy", {{"l_10", 1.0}})},
      {"importance", axis("importance", {{"l_3", 0.5}, {"l_12", 0.5}})},
      {"importance_change", axis("importance_change", {{"l_13", 1.0}})},
  };
  return axes;
}

void validate_axis(const Axis& a, const VariableSchema& schema) {
  if (a.weights.empty()) throw Error(ErrorCode::invalid_argument, "axis " + a.name + " has no variables");
  double sum = 0.0;
  for (const auto& [id, w] : a.weights) {
    const auto v = schema.find(id);
    if (!v) throw Error(ErrorCode::invalid_argument, "axis " + a.name + " references unknown variable " + id);
    if (schema.variable(*v).kind != VariableKind::likert)
      throw Error(ErrorCode::invalid_argument, "axis " + a.name + " uses non-Likert variable " + id);
    if (w < 0.0) throw Error(ErrorCode::invalid_argument, "axis " + a.name + " has a negative weight");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw Error(ErrorCode::invalid_argument, "weights of axis " + a.name + " do not sum to 1");
}

}  // namespace

void validate(const ProjectionSpec& spec, const VariableSchema& schema) {
  validate_axis(spec.x, schema);
  validate_axis(spec.y, schema);
}

double project_axis(const Axis& a, const VariableSchema& schema, const ExplanatoryVector& p) {
  const auto& likert = schema.likert_variables();
  double value = 0.0;
  for (const auto& [id, w] : a.weights) {
    const int v = *schema.find(id);
    const auto k = std::find(likert.begin(), likert.end(), v) - likert.begin();
    const VariableDef& def = schema.variable(v);
    value += w * (p.likert.at(k) - def.range_min) / def.range();
  }
  return value;
}

std::vector<ProjectedPoint> project(const Dataset& dataset, const ProjectionSpec& spec) {
  validate(spec, dataset.schema());
  std::vector<ProjectedPoint> out;
  out.reserve(dataset.size());
  for (const auto& p : dataset.participants())
    out.push_back({p.id, project_axis(spec.x, dataset.schema(), p.explanatory),
                   project_axis(spec.y, dataset.schema(), p.explanatory)});
  return out;
}

std::vector<ProjectedPoint> project_groups(const Dataset& dataset, const ProjectionSpec& spec,
                                           const std::vector<std::pair<std::string, std::vector<int>>>& groups) {
  const auto points = project(dataset, spec);
  std::vector<ProjectedPoint> out;
  for (const auto& [id, members] : groups) {
    if (members.empty()) throw Error(ErrorCode::invalid_argument, "group " + id + " is empty");
    double sx = 0.0, sy = 0.0;
    for (int i : members) {
      sx += points.at(i).x;
      sy += points.at(i).y;
    }
    out.push_back({id, sx / members.size(), sy / members.size()});
  }
  return out;
}

std::vector<ProjectionSpec> builtin_specs() {
  const auto& a = builtin_axes();
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"knowledge", "behaviour"},   {"behaviour", "importance"},     {"pet_decision", "pet_efficacy"},
      {"pet_efficacy", "pet_decision"}, {"importance", "importance_change"}, {"importance_change", "importance"},
  };
  std::vector<ProjectionSpec> out;
  for (const auto& [x, y] : pairs) out.push_back({x, a.at(x), a.at(y)});
  return out;
}

const ProjectionSpec* find_builtin(const std::string& name) {
  static const std::vector<ProjectionSpec> specs = builtin_specs();
  for (const auto& s : specs)
    if (s.name == name) return &s;
  return nullptr;
}

}  // namespace personas
