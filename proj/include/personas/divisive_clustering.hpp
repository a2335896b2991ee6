#pragma once

// Divisive (DIANA-style) hierarchical clustering.
//
// Starting from one cluster holding every participant, the leaf selected by
// the split rule is divided by the splinter procedure until every leaf is a
// singleton or the split budget is exhausted. Ties are broken by the lowest
// participant index, so the tree is a pure function of the distance matrix.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "personas/dissimilarity.hpp"
#include "personas/feature_model.hpp"

namespace personas {

enum class SplitRule { diameter, avg_dissimilarity, largest };

const char* to_string(SplitRule rule) noexcept;
SplitRule parse_split_rule(const std::string& name);

struct ClusterNode {
  int id = 0;                 // position in Dendrogram::nodes()
  int level = 1;              // cluster count of the first cut containing this node
  int index = 1;              // 1-based position within that cut (ordered by first member)
  int depth = 0;              // tree depth, root = 0
  int parent = -1;
  int left = -1;              // splinter group
  int right = -1;             // remainder
  int split_order = -1;       // position in the split log; -1 for leaves
  std::vector<int> members;   // sorted participant indices
  std::vector<double> descriptor;

  bool is_leaf() const { return left < 0; }
  std::string label() const { return std::to_string(level) + "." + std::to_string(index); }
};

struct SplitRecord {
  int parent = 0;
  int left = 0;
  int right = 0;
};

class Dendrogram {
 public:
  Dendrogram() = default;
  Dendrogram(std::vector<ClusterNode> nodes, std::vector<SplitRecord> split_log, std::uint64_t rng_seed = 0)
      : nodes_(std::move(nodes)), split_log_(std::move(split_log)), rng_seed_(rng_seed) {}

  const ClusterNode& root() const { return nodes_.front(); }
  const ClusterNode& node(int id) const { return nodes_.at(id); }
  const std::vector<ClusterNode>& nodes() const { return nodes_; }
  const std::vector<SplitRecord>& split_log() const { return split_log_; }
  std::uint64_t rng_seed() const { return rng_seed_; }

  std::size_t participant_count() const { return nodes_.empty() ? 0 : root().members.size(); }
  std::size_t leaf_count() const { return split_log_.size() + 1; }
  std::vector<int> leaves() const;

 private:
  std::vector<ClusterNode> nodes_;
  std::vector<SplitRecord> split_log_;
  std::uint64_t rng_seed_ = 0;
};

// Splinter procedure on `members` (>= 2). Returns (splinter, remainder), both
// sorted and non-empty. Throws Error(invalid_argument) on a singleton.
std::pair<std::vector<int>, std::vector<int>> diana_split(const std::vector<int>& members,
                                                          const DistanceMatrix& dm);

struct BuildOptions {
  std::optional<int> max_splits;  // none: grow until all leaves are singletons
  SplitRule split_rule = SplitRule::diameter;
};

// Descriptors are filled from `dataset` when given; its size must match dm.
Dendrogram build_dendrogram(const DistanceMatrix& dm, const Dataset* dataset = nullptr,
                            const BuildOptions& options = {});
inline Dendrogram build_dendrogram(const Dataset& dataset, const DistanceMatrix& dm,
                                   const BuildOptions& options = {}) {
  return build_dendrogram(dm, &dataset, options);
}

// Per-trait frequency of `members` in `dataset`. Throws on an empty cluster.
std::vector<double> descriptor(const std::vector<int>& members, const Dataset& dataset);

// Clusters (node ids) after the first v-1 splits, ordered by first member.
// Throws Error(invalid_argument) unless 1 <= v <= leaf_count().
std::vector<int> cut_at_level(const Dendrogram& dendrogram, int v);
// Clusters at tree depth d: nodes at depth d plus shallower leaves.
std::vector<int> cut_at_depth(const Dendrogram& dendrogram, int depth);

// Label vector (participant -> cluster position in `clusters`).
std::vector<int> labels_of(const Dendrogram& dendrogram, const std::vector<int>& clusters);

}  // namespace personas
