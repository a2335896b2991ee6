#pragma once

// Discriminative trait selection and two-step statistically validated
// pruning of the dendrogram into personas.

#include <map>
#include <set>
#include <vector>

#include "personas/divisive_clustering.hpp"
#include "personas/exact_tests.hpp"
#include "personas/feature_model.hpp"

namespace personas {

struct TestReport {
  std::vector<int> traits;          // tested traits (1-based)
  std::vector<double> p_values;     // Boschloo p per trait
  std::vector<bool> rejected;       // Holm decision per trait
  double alpha = 0.05;
  int family_size = 0;

  bool significant() const;
  int rejected_count() const;
  double min_p() const;
  std::vector<int> rejected_traits() const;
};

// Boschloo test per trait on (count_a, |a|, count_b, |b|), Holm over the
// family. Clusters are "significantly different" iff at least one rejection.
TestReport compare_clusters(const std::vector<int>& a, const std::vector<int>& b, const Dataset& dataset,
                            const std::vector<int>& traits, double alpha, int family_size,
                            BoschlooEngine& engine);

struct SelectionReport {
  std::vector<double> min_p;    // per trait (index t-1), over every examined comparison
  std::set<int> retained;
  int examined_levels = 0;
  int comparisons = 0;
  bool degraded = false;        // dendrogram shallower than requested
};

struct SelectionOptions {
  int levels = 15;
  double threshold = 0.001;
};

// Compares every pair of clusters within each of the first `levels` cuts.
// Binary traits are kept when their raw minimum p is below the threshold;
// open-question Likert variables are kept whole when any level is; closed
// and composite Likert variables are always kept.
SelectionReport select_discriminative(const Dendrogram& dendrogram, const Dataset& dataset,
                                      const SelectionOptions& options, BoschlooEngine& engine);

struct PruneOptions {
  double alpha = 0.05;
  int family_size = 0;  // 0: number of tested traits
};

// A cut of a dendrogram: the current leaves of the pruned tree.
struct PrunedTree {
  const Dendrogram* dendrogram = nullptr;
  std::vector<int> leaves;  // node ids, ordered by first member
};

// Depth-first from the root: keep a split iff its two children differ.
PrunedTree prune_step1(const Dendrogram& dendrogram, const Dataset& dataset, const std::vector<int>& traits,
                       const PruneOptions& options, BoschlooEngine& engine);

struct PairReport {
  int a = 0;  // persona positions
  int b = 0;
  TestReport report;
};

struct CiPairReport {
  int a = 0;
  int b = 0;
  std::vector<bool> non_overlapping;  // per tested trait
  bool passes() const;
};

struct PersonaSet {
  std::vector<int> leaves;          // node ids
  std::vector<int> traits;          // traits tested between personas
  std::vector<PairReport> pairwise;
  std::vector<CiPairReport> ci_overlap;
  int merges = 0;                   // step-2 collapses performed
};

// Repeatedly collapses the parent of the leaf with the most insignificant
// comparisons until every pair of leaves differs.
PersonaSet prune_step2(const PrunedTree& tree, const Dataset& dataset, const std::vector<int>& traits,
                       const PruneOptions& options, BoschlooEngine& engine);

// Agresti interval per persona and trait; a pair passes when at least one
// trait's intervals are disjoint.
std::vector<CiPairReport> ci_overlap_check(const Dendrogram& dendrogram, const std::vector<int>& leaves,
                                           const Dataset& dataset, const std::vector<int>& traits,
                                           double confidence = 0.95);

}  // namespace personas
