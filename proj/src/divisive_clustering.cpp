#include "personas/divisive_clustering.hpp"

#include <algorithm>
#include <functional>

#include "personas/error.hpp"

namespace personas {

namespace {

// Differences within this margin are treated as zero by the splinter test, so
// clusters of equidistant members are not split on rounding noise.
constexpr double kMoveEpsilon = 1e-12;

double cluster_score(const std::vector<int>& members, const DistanceMatrix& dm, SplitRule rule) {
  const std::size_t m = members.size();
  if (rule == SplitRule::largest) return static_cast<double>(m);
  double best = 0.0;
  double sum = 0.0;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      const double d = dm(members[a], members[b]);
      best = std::max(best, d);
      sum += d;
    }
  if (rule == SplitRule::diameter) return best;
  return m < 2 ? 0.0 : sum / (static_cast<double>(m) * (m - 1) / 2.0);
}

}  // namespace

const char* to_string(SplitRule rule) noexcept {
  switch (rule) {
    case SplitRule::diameter: return "diameter";
    case SplitRule::avg_dissimilarity: return "avg-dissimilarity";
    case SplitRule::largest: return "largest";
  }
  return "unknown";
}

SplitRule parse_split_rule(const std::string& name) {
  if (name == "diameter") return SplitRule::diameter;
  if (name == "avg-dissimilarity") return SplitRule::avg_dissimilarity;
  if (name == "largest") return SplitRule::largest;
  throw Error(ErrorCode::invalid_argument, "unknown split rule '" + name + "'");
}

std::vector<int> Dendrogram::leaves() const {
  std::vector<int> out;
  for (const ClusterNode& n : nodes_)
    if (n.is_leaf()) out.push_back(n.id);
  return out;
}

std::pair<std::vector<int>, std::vector<int>> diana_split(const std::vector<int>& members,
                                                          const DistanceMatrix& dm) {
  const std::size_t m = members.size();
  if (m < 2) throw Error(ErrorCode::invalid_argument, "cannot split a cluster with fewer than 2 members");

  std::vector<int> sorted = members;
  std::sort(sorted.begin(), sorted.end());

  // Seed: maximal average dissimilarity to the rest (first maximum wins).
  std::vector<double> to_rest(m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (a != b) to_rest[a] += dm(sorted[a], sorted[b]);
  const std::size_t seed = static_cast<std::size_t>(
      std::max_element(to_rest.begin(), to_rest.end()) - to_rest.begin());

  std::vector<bool> in_splinter(m, false);
  in_splinter[seed] = true;
  std::size_t splinter_size = 1;
  std::vector<double> to_splinter(m, 0.0);
  std::vector<double> to_remainder(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    to_splinter[a] = dm(sorted[a], sorted[seed]);
    to_remainder[a] = to_rest[a] - to_splinter[a];
  }

  while (m - splinter_size > 1) {
    const double remainder_others = static_cast<double>(m - splinter_size - 1);
    double best_diff = kMoveEpsilon;
    std::size_t best = m;
    for (std::size_t a = 0; a < m; ++a) {
      if (in_splinter[a]) continue;
      const double diff = to_remainder[a] / remainder_others - to_splinter[a] / splinter_size;
      if (diff > best_diff) {
        best_diff = diff;
        best = a;
      }
    }
    if (best == m) break;
    in_splinter[best] = true;
    ++splinter_size;
    for (std::size_t a = 0; a < m; ++a) {
      if (in_splinter[a]) continue;
      const double d = dm(sorted[a], sorted[best]);
      to_splinter[a] += d;
      to_remainder[a] -= d;
    }
  }

  std::pair<std::vector<int>, std::vector<int>> out;
  for (std::size_t a = 0; a < m; ++a) (in_splinter[a] ? out.first : out.second).push_back(sorted[a]);
  return out;
}

std::vector<double> descriptor(const std::vector<int>& members, const Dataset& dataset) {
  if (members.empty()) throw Error(ErrorCode::invalid_argument, "descriptor of an empty cluster");
  const int T = dataset.schema().trait_count();
  std::vector<int> counts(T, 0);
  for (int i : members) {
    const TraitBits& bits = dataset.participant(i).traits;
    for (int t = 0; t < T; ++t) counts[t] += bits[t] ? 1 : 0;
  }
  std::vector<double> out(T);
  for (int t = 0; t < T; ++t) out[t] = static_cast<double>(counts[t]) / static_cast<double>(members.size());
  return out;
}

Dendrogram build_dendrogram(const DistanceMatrix& dm, const Dataset* dataset, const BuildOptions& options) {
  const int n = static_cast<int>(dm.size());
  if (n == 0) throw Error(ErrorCode::invalid_argument, "cannot cluster an empty dataset");
  if (dataset && static_cast<int>(dataset->size()) != n)
    throw Error(ErrorCode::invalid_argument, "dataset and distance matrix sizes differ");
  const int budget = options.max_splits ? std::clamp(*options.max_splits, 0, n - 1) : n - 1;

  std::vector<ClusterNode> nodes;
  std::vector<SplitRecord> log;
  ClusterNode root;
  root.members.resize(n);
  for (int i = 0; i < n; ++i) root.members[i] = i;
  nodes.push_back(std::move(root));

  std::vector<int> open{0};           // splittable leaves
  std::vector<double> score{cluster_score(nodes[0].members, dm, options.split_rule)};
  if (n < 2) open.clear(), score.clear();

  while (static_cast<int>(log.size()) < budget && !open.empty()) {
    std::size_t pick = 0;
    for (std::size_t k = 1; k < open.size(); ++k) {
      if (score[k] > score[pick] ||
          (score[k] == score[pick] &&
           nodes[open[k]].members.front() < nodes[open[pick]].members.front()))
        pick = k;
    }
    const int parent = open[pick];
    open.erase(open.begin() + static_cast<long>(pick));
    score.erase(score.begin() + static_cast<long>(pick));

    auto [splinter, remainder] = diana_split(nodes[parent].members, dm);
    const int order = static_cast<int>(log.size());
    nodes[parent].split_order = order;
    for (auto* group : {&splinter, &remainder}) {
      ClusterNode child;
      child.id = static_cast<int>(nodes.size());
      child.parent = parent;
      child.depth = nodes[parent].depth + 1;
      child.level = order + 2;
      child.members = std::move(*group);
      if (child.members.size() >= 2) {
        open.push_back(child.id);
        score.push_back(cluster_score(child.members, dm, options.split_rule));
      }
      nodes.push_back(std::move(child));
    }
    nodes[parent].left = static_cast<int>(nodes.size()) - 2;
    nodes[parent].right = static_cast<int>(nodes.size()) - 1;
    log.push_back({parent, nodes[parent].left, nodes[parent].right});
  }

  Dendrogram tree(std::move(nodes), std::move(log));
  // Position of each node within the cut where it first appears.
  std::vector<ClusterNode> labelled = tree.nodes();
  for (int v = 1; v <= static_cast<int>(tree.leaf_count()); ++v) {
    const auto cut = cut_at_level(tree, v);
    for (std::size_t k = 0; k < cut.size(); ++k)
      if (labelled[cut[k]].level == v) labelled[cut[k]].index = static_cast<int>(k) + 1;
  }
  if (dataset)
    for (ClusterNode& node : labelled) node.descriptor = descriptor(node.members, *dataset);
  return Dendrogram(std::move(labelled), tree.split_log());
}

std::vector<int> cut_at_level(const Dendrogram& dendrogram, int v) {
  if (v < 1 || v > static_cast<int>(dendrogram.leaf_count()))
    throw Error(ErrorCode::invalid_argument,
                "level " + std::to_string(v) + " outside 1.." + std::to_string(dendrogram.leaf_count()));
  std::vector<int> out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const ClusterNode& node = dendrogram.node(stack.back());
    stack.pop_back();
    if (!node.is_leaf() && node.split_order < v - 1) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      out.push_back(node.id);
    }
  }
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    return dendrogram.node(a).members.front() < dendrogram.node(b).members.front();
  });
  return out;
}

std::vector<int> cut_at_depth(const Dendrogram& dendrogram, int depth) {
  if (depth < 0) throw Error(ErrorCode::invalid_argument, "negative depth");
  std::vector<int> out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const ClusterNode& node = dendrogram.node(stack.back());
    stack.pop_back();
    if (!node.is_leaf() && node.depth < depth) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      out.push_back(node.id);
    }
  }
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    return dendrogram.node(a).members.front() < dendrogram.node(b).members.front();
  });
  return out;
}

std::vector<int> labels_of(const Dendrogram& dendrogram, const std::vector<int>& clusters) {
  std::vector<int> labels(dendrogram.participant_count(), -1);
  for (std::size_t k = 0; k < clusters.size(); ++k)
    for (int i : dendrogram.node(clusters[k]).members) labels[i] = static_cast<int>(k);
  return labels;
}

}  // namespace personas
