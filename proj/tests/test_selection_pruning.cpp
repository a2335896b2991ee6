#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "personas/error.hpp"
#include "personas/selection_pruning.hpp"
#include "personas/synthetic.hpp"

using namespace personas;
using namespace testing_util;

namespace {

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int i = a; i < b; ++i) v.push_back(i);
  return v;
}

ClusterNode make_node(int id, int parent, int left, int right, int order, std::vector<int> members) {
  ClusterNode n;
  n.id = id;
  n.parent = parent;
  n.left = left;
  n.right = right;
  n.split_order = order;
  n.members = std::move(members);
  return n;
}

// Binary-only data: participants 10..19 carry trait 1, 30..39 carry trait 2.
Dataset four_groups() {
  std::vector<VariableDef> vars = {binary_var("b_1", 1), binary_var("b_2", 2), binary_var("b_3", 3)};
  auto s = std::make_shared<const VariableSchema>(3, std::move(vars));
  std::vector<ParticipantRecord> ps;
  for (int i = 0; i < 40; ++i) {
    TraitBits bits = {static_cast<std::uint8_t>(i >= 10 && i < 20), static_cast<std::uint8_t>(i >= 30), 0};
    ExplanatoryVector ex = to_explanatory(*s, bits);
    ps.push_back({"p" + std::to_string(i), bits, ex});
  }
  return Dataset(s, std::move(ps));
}

}  // namespace

TEST_CASE("cluster comparison") {
  const Dataset d = four_groups();
  BoschlooEngine engine(BoschlooOptions{200, true, Alternative::two_sided});
  const TestReport same = compare_clusters(range(0, 10), range(20, 30), d, {1, 2, 3}, 0.05, 3, engine);
  CHECK_FALSE(same.significant());
  CHECK(same.min_p() == 1.0);
  const TestReport diff = compare_clusters(range(0, 10), range(10, 20), d, {1, 2, 3}, 0.05, 3, engine);
  CHECK(diff.rejected_traits() == std::vector<int>{1});
  CHECK(diff.family_size == 3);
  // family_size 0 means the number of tested traits.
  CHECK(compare_clusters(range(0, 10), range(10, 20), d, {1}, 0.05, 0, engine).family_size == 1);
  CHECK_THROWS_AS(compare_clusters({}, range(0, 3), d, {1}, 0.05, 1, engine), Error);
}

TEST_CASE("step 2 collapses the parent of the most often indistinct leaf") {
  const Dataset d = four_groups();
  std::vector<ClusterNode> nodes = {
      make_node(0, -1, 1, 2, 0, range(0, 40)),  make_node(1, 0, 3, 4, 1, range(0, 20)),
      make_node(2, 0, 5, 6, 2, range(20, 40)),  make_node(3, 1, -1, -1, -1, range(0, 10)),
      make_node(4, 1, -1, -1, -1, range(10, 20)), make_node(5, 2, -1, -1, -1, range(20, 30)),
      make_node(6, 2, -1, -1, -1, range(30, 40)),
  };
  const Dendrogram tree(nodes, {{0, 1, 2}, {1, 3, 4}, {2, 5, 6}});
  BoschlooEngine engine(BoschlooOptions{200, true, Alternative::two_sided});
  const PruneOptions opts{0.05, 3};
  const std::vector<int> traits = {1, 2, 3};

  // Every sibling pair differs, so step 1 keeps all four leaves.
  const PrunedTree s1 = prune_step1(tree, d, traits, opts, engine);
  CHECK(s1.leaves == std::vector<int>{3, 4, 5, 6});

  // Leaves 3 and 5 are indistinct; the tie goes to the lowest first member,
  // so node 1 is collapsed.
  const PersonaSet ps = prune_step2(s1, d, traits, opts, engine);
  CHECK(ps.leaves == std::vector<int>{1, 5, 6});
  CHECK(ps.merges == 1);
  CHECK(ps.pairwise.size() == 3);
  for (const auto& p : ps.pairwise) CHECK(p.report.significant());
  // The interval check is reported, not enforced: 10/20 against 0/10 is a
  // Holm rejection whose intervals still overlap.
  REQUIRE(ps.ci_overlap.size() == 3);
  CHECK_FALSE(ps.ci_overlap[0].passes());
  CHECK(ps.ci_overlap[1].passes());
  CHECK(ps.ci_overlap[2].passes());
}

TEST_CASE("step 1 stops at insignificant splits") {
  const Dataset d = four_groups();
  std::vector<int> rest = range(0, 10);
  for (int i = 20; i < 30; ++i) rest.push_back(i);
  std::vector<int> root_rest = range(0, 30);
  std::vector<ClusterNode> nodes = {
      make_node(0, -1, 1, 2, 0, range(0, 40)),    make_node(1, 0, -1, -1, -1, range(30, 40)),
      make_node(2, 0, 3, 4, 1, root_rest),        make_node(3, 2, -1, -1, -1, range(10, 20)),
      make_node(4, 2, 5, 6, 2, rest),             make_node(5, 4, -1, -1, -1, range(0, 10)),
      make_node(6, 4, -1, -1, -1, range(20, 30)),
  };
  const Dendrogram tree(nodes, {{0, 1, 2}, {2, 3, 4}, {4, 5, 6}});
  BoschlooEngine engine;
  CHECK(prune_step1(tree, d, {3}, PruneOptions{0.05, 1}, engine).leaves == std::vector<int>{0});
  // Trait 2 separates the root split, trait 1 the next; nodes 5 and 6 are identical.
  CHECK(prune_step1(tree, d, {1, 2, 3}, PruneOptions{0.05, 3}, engine).leaves == std::vector<int>{4, 3, 1});
}

TEST_CASE("selection on planted data keeps signatures and closed questions") {
  PlantedConfig cfg;
  cfg.seed = 3;
  const PlantedData p = generate_planted(cfg);
  BoschlooEngine engine;
  const Dendrogram tree = build_dendrogram(p.dataset, distance_matrix(p.dataset), BuildOptions{14});
  const SelectionReport rep = select_discriminative(tree, p.dataset, SelectionOptions{}, engine);
  CHECK(rep.examined_levels == 15);
  CHECK_FALSE(rep.degraded);
  for (int t = 9; t <= 66; ++t) CHECK(rep.retained.count(t) == 1);
  for (int t = 67; t < 67 + 24; ++t) CHECK(rep.retained.count(t) == 1);
  for (int t : rep.retained)
    if (t > 66) CHECK(rep.min_p[t - 1] < 0.001);
  // Open Likert variables are all-or-nothing.
  CHECK((rep.retained.count(1) + rep.retained.count(2) + rep.retained.count(3)) % 3 == 0);

  const SelectionReport shallow = select_discriminative(tree, p.dataset, SelectionOptions{40, 0.001}, engine);
  CHECK(shallow.degraded);
  CHECK(shallow.examined_levels == 15);
}

TEST_CASE("interval check reports disjoint traits") {
  const Dataset d = four_groups();
  std::vector<ClusterNode> nodes = {make_node(0, -1, 1, 2, 0, range(0, 20)), make_node(1, 0, -1, -1, -1, range(0, 10)),
                                    make_node(2, 0, -1, -1, -1, range(10, 20))};
  const Dendrogram tree(nodes, {{0, 1, 2}});
  const auto ci = ci_overlap_check(tree, {1, 2}, d, {1, 2});
  REQUIRE(ci.size() == 1);
  CHECK(ci[0].non_overlapping == std::vector<bool>{true, false});
  CHECK(ci[0].passes());
}
