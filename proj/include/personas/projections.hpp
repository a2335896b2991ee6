#pragma once

// Affine projections of participants and personas onto interpretable
// attribute axes built from Likert variables (rescaled to [0,1]).

#include <string>
#include <utility>
#include <vector>

#include "personas/feature_model.hpp"

namespace personas {

struct Axis {
  std::string name;
  std::vector<std::pair<std::string, double>> weights;  // variable id -> weight
};

struct ProjectionSpec {
  std::string name;
  Axis x;
  Axis y;
};

struct ProjectedPoint {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

// Throws Error(invalid_argument) for unknown or non-Likert variables,
// negative weights, or weights not summing to 1.
void validate(const ProjectionSpec& spec, const VariableSchema& schema);

double project_axis(const Axis& axis, const VariableSchema& schema, const ExplanatoryVector& p);

std::vector<ProjectedPoint> project(const Dataset& dataset, const ProjectionSpec& spec);

// One point per group: the mean of its members' points.
std::vector<ProjectedPoint> project_groups(const Dataset& dataset, const ProjectionSpec& spec,
                                           const std::vector<std::pair<std::string, std::vector<int>>>& groups);

// knowledge, behaviour, pet_decision, pet_efficacy, importance,
// importance_change. Each spec's x axis is its named dimension; y pairs it
// with the dimension it is usually read against.
std::vector<ProjectionSpec> builtin_specs();
const ProjectionSpec* find_builtin(const std::string& name);

}  // namespace personas
