#include "doctest.h"
#include "helpers.hpp"
#include "personas/error.hpp"
#include "personas/projections.hpp"
#include "personas/synthetic.hpp"

using namespace personas;
using namespace testing_util;

namespace {

ParticipantRecord at_level(const VariableSchema& s, const std::string& id, bool lowest) {
  TraitBits bits(s.trait_count(), 0);
  for (const auto& def : s.variables())
    if (def.kind == VariableKind::likert && def.source != VariableSource::composite)
      bits[(lowest ? def.trait_levels.front() : def.trait_levels.back()) - 1] = 1;
  bits = fill_derived_composites(s, bits);
  return {id, bits, to_explanatory(s, bits)};
}

}  // namespace

TEST_CASE("builtin projections") {
  const auto s = reference_schema();
  const Dataset d(s, {at_level(*s, "lo", true), at_level(*s, "hi", false)});
  const auto specs = builtin_specs();
  REQUIRE(specs.size() == 6);
  for (const auto& spec : specs) {
    CHECK(find_builtin(spec.name) != nullptr);
    const auto pts = project(d, spec);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].id == "lo");
    // Constant answers give no change in importance, the middle category.
    CHECK(pts[0].x == doctest::Approx(spec.name == "importance_change" ? 0.5 : 0.0));
    CHECK(pts[1].x == doctest::Approx(spec.name == "importance_change" ? 0.5 : 1.0));
    CHECK(pts[0].x >= 0.0);
    CHECK(pts[1].y <= 1.0);
  }
  CHECK(find_builtin("nope") == nullptr);
}

TEST_CASE("axis weights") {
  const auto s = toy_schema();
  const Dataset d = random_dataset(s, 6, 3);
  ProjectionSpec spec{"mix", {"x", {{"l_a", 0.25}, {"l_b", 0.75}}}, {"y", {{"l_b", 1.0}}}};
  const auto pts = project(d, spec);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& ex = d.participant(i).explanatory;
    CHECK(pts[i].x == doctest::Approx(0.25 * ex.likert[0] + 0.75 * ex.likert[1]));
    CHECK(pts[i].y == doctest::Approx(ex.likert[1]));
  }

  const auto groups = project_groups(d, spec, {{"g1", {0, 1, 2}}, {"g2", {5}}});
  CHECK(groups[0].x == doctest::Approx((pts[0].x + pts[1].x + pts[2].x) / 3));
  CHECK(groups[1].y == doctest::Approx(pts[5].y));
  CHECK_THROWS_AS(project_groups(d, spec, {{"g", {}}}), Error);

  auto bad = spec;
  bad.x.weights = {{"l_a", 0.5}};
  CHECK_THROWS_AS(project(d, bad), Error);
  bad.x.weights = {{"b_1", 1.0}};
  CHECK_THROWS_AS(project(d, bad), Error);
  bad.x.weights = {{"missing", 1.0}};
  CHECK_THROWS_AS(project(d, bad), Error);
  bad.x.weights = {{"l_a", 1.5}, {"l_b", -0.5}};
  CHECK_THROWS_AS(project(d, bad), Error);
  bad.x.weights = {};
  CHECK_THROWS_AS(project(d, bad), Error);
}

TEST_CASE("ranges other than the unit interval are rescaled") {
  std::vector<VariableDef> vars = {likert_var("l", 1, 5, 1.0, 5.0), binary_var("b", 6)};
  auto s = std::make_shared<const VariableSchema>(6, std::move(vars));
  TraitBits bits = {0, 0, 0, 1, 0, 1};
  const Dataset d(s, {{"p", bits, to_explanatory(*s, bits)}});
  const ProjectionSpec spec{"l", {"x", {{"l", 1.0}}}, {"y", {{"l", 1.0}}}};
  CHECK(project(d, spec)[0].x == doctest::Approx(0.75));
}
