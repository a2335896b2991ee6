#include "personas/selection_pruning.hpp"

#include <algorithm>
#include <limits>

#include "personas/error.hpp"

namespace personas {

bool TestReport::significant() const { return rejected_count() > 0; }

int TestReport::rejected_count() const {
  return static_cast<int>(std::count(rejected.begin(), rejected.end(), true));
}

double TestReport::min_p() const {
  return p_values.empty() ? 1.0 : *std::min_element(p_values.begin(), p_values.end());
}

std::vector<int> TestReport::rejected_traits() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < traits.size(); ++k)
    if (rejected[k]) out.push_back(traits[k]);
  return out;
}

bool CiPairReport::passes() const {
  return std::any_of(non_overlapping.begin(), non_overlapping.end(), [](bool b) { return b; });
}

namespace {

int count_trait(const std::vector<int>& members, const Dataset& dataset, int t) {
  int c = 0;
  for (int i : members) c += dataset.participant(i).traits[t - 1] ? 1 : 0;
  return c;
}

std::vector<double> trait_p_values(const std::vector<int>& a, const std::vector<int>& b,
                                   const Dataset& dataset, const std::vector<int>& traits,
                                   BoschlooEngine& engine) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::invalid_argument, "cannot compare an empty cluster");
  std::vector<Table2x2> tables;
  tables.reserve(traits.size());
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  for (int t : traits) tables.push_back({count_trait(a, dataset, t), na, count_trait(b, dataset, t), nb});
  const auto results = engine.run(tables);
  std::vector<double> p(results.size());
  for (std::size_t k = 0; k < results.size(); ++k) p[k] = results[k].p_boschloo;
  return p;
}

bool is_descendant(const Dendrogram& tree, int node, int ancestor) {
  for (int cur = node; cur >= 0; cur = tree.node(cur).parent)
    if (cur == ancestor) return true;
  return false;
}

void sort_by_first_member(const Dendrogram& tree, std::vector<int>& ids) {
  std::sort(ids.begin(), ids.end(), [&](int x, int y) {
    return tree.node(x).members.front() < tree.node(y).members.front();
  });
}

}  // namespace

TestReport compare_clusters(const std::vector<int>& a, const std::vector<int>& b, const Dataset& dataset,
                            const std::vector<int>& traits, double alpha, int family_size,
                            BoschlooEngine& engine) {
  TestReport r;
  r.traits = traits;
  r.alpha = alpha;
  r.family_size = family_size > 0 ? family_size : static_cast<int>(traits.size());
  r.p_values = trait_p_values(a, b, dataset, traits, engine);
  r.rejected = holm(r.p_values, alpha, r.family_size).rejected;
  return r;
}

SelectionReport select_discriminative(const Dendrogram& dendrogram, const Dataset& dataset,
                                      const SelectionOptions& options, BoschlooEngine& engine) {
  if (options.levels < 1) throw Error(ErrorCode::invalid_argument, "selection levels must be positive");
  const VariableSchema& schema = dataset.schema();
  const int T = schema.trait_count();
  SelectionReport report;
  report.min_p.assign(T, 1.0);
  report.examined_levels = std::min<int>(options.levels, static_cast<int>(dendrogram.leaf_count()));
  report.degraded = report.examined_levels < options.levels;

  std::vector<int> all_traits(T);
  for (int t = 1; t <= T; ++t) all_traits[t - 1] = t;

  std::set<std::pair<int, int>> seen;
  for (int v = 2; v <= report.examined_levels; ++v) {
    const auto cut = cut_at_level(dendrogram, v);
    for (std::size_t i = 0; i < cut.size(); ++i)
      for (std::size_t j = i + 1; j < cut.size(); ++j) {
        const auto key = std::minmax(cut[i], cut[j]);
        if (!seen.insert(key).second) continue;
        const auto p = trait_p_values(dendrogram.node(key.first).members, dendrogram.node(key.second).members,
                                      dataset, all_traits, engine);
        for (int t = 0; t < T; ++t) report.min_p[t] = std::min(report.min_p[t], p[t]);
        ++report.comparisons;
      }
  }

  for (const VariableDef& def : schema.variables()) {
    bool keep = false;
    if (def.kind == VariableKind::likert && def.source != VariableSource::open_question) {
      keep = true;
    } else {
      keep = std::any_of(def.trait_levels.begin(), def.trait_levels.end(),
                         [&](int t) { return report.min_p[t - 1] < options.threshold; });
    }
    if (keep)
      for (int t : def.trait_levels)
        if (dataset.mask().is_active(t)) report.retained.insert(t);
  }
  return report;
}

PrunedTree prune_step1(const Dendrogram& dendrogram, const Dataset& dataset, const std::vector<int>& traits,
                       const PruneOptions& options, BoschlooEngine& engine) {
  PrunedTree out{&dendrogram, {}};
  std::vector<int> stack{dendrogram.root().id};
  while (!stack.empty()) {
    const ClusterNode& node = dendrogram.node(stack.back());
    stack.pop_back();
    if (!node.is_leaf()) {
      const TestReport r = compare_clusters(dendrogram.node(node.left).members, dendrogram.node(node.right).members,
                                            dataset, traits, options.alpha, options.family_size, engine);
      if (r.significant()) {
        stack.push_back(node.right);
        stack.push_back(node.left);
        continue;
      }
    }
    out.leaves.push_back(node.id);
  }
  sort_by_first_member(dendrogram, out.leaves);
  return out;
}

PersonaSet prune_step2(const PrunedTree& tree, const Dataset& dataset, const std::vector<int>& traits,
                       const PruneOptions& options, BoschlooEngine& engine) {
  if (!tree.dendrogram) throw Error(ErrorCode::invalid_argument, "pruned tree without dendrogram");
  const Dendrogram& dendrogram = *tree.dendrogram;
  PersonaSet out;
  out.traits = traits;
  std::vector<int> leaves = tree.leaves;
  sort_by_first_member(dendrogram, leaves);

  auto compare = [&](int x, int y) {
    return compare_clusters(dendrogram.node(x).members, dendrogram.node(y).members, dataset, traits,
                            options.alpha, options.family_size, engine);
  };

  while (leaves.size() >= 2) {
    const std::size_t k = leaves.size();
    std::vector<int> insignificant(k, 0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        if (!compare(leaves[i], leaves[j]).significant()) {
          ++insignificant[i];
          ++insignificant[j];
        }
    std::size_t pick = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (insignificant[i] == 0) continue;
      if (pick == k) {
        pick = i;
        continue;
      }
      const auto& cand = dendrogram.node(leaves[i]);
      const auto& best = dendrogram.node(leaves[pick]);
      if (insignificant[i] > insignificant[pick] ||
          (insignificant[i] == insignificant[pick] &&
           (cand.members.size() < best.members.size() ||
            (cand.members.size() == best.members.size() && cand.members.front() < best.members.front()))))
        pick = i;
    }
    if (pick == k) break;

    const int parent = dendrogram.node(leaves[pick]).parent;
    std::vector<int> next;
    for (int leaf : leaves)
      if (!is_descendant(dendrogram, leaf, parent)) next.push_back(leaf);
    next.push_back(parent);
    sort_by_first_member(dendrogram, next);
    leaves = std::move(next);
    ++out.merges;
  }

  out.leaves = leaves;
  for (std::size_t i = 0; i < leaves.size(); ++i)
    for (std::size_t j = i + 1; j < leaves.size(); ++j)
      out.pairwise.push_back({static_cast<int>(i), static_cast<int>(j), compare(leaves[i], leaves[j])});
  out.ci_overlap = ci_overlap_check(dendrogram, leaves, dataset, traits);
  return out;
}

std::vector<CiPairReport> ci_overlap_check(const Dendrogram& dendrogram, const std::vector<int>& leaves,
                                           const Dataset& dataset, const std::vector<int>& traits,
                                           double confidence) {
  const std::size_t k = leaves.size();
  std::vector<std::vector<Interval>> intervals(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& members = dendrogram.node(leaves[i]).members;
    for (int t : traits)
      intervals[i].push_back(
          agresti_interval(count_trait(members, dataset, t), static_cast<int>(members.size()), confidence));
  }
  std::vector<CiPairReport> out;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      CiPairReport r{static_cast<int>(i), static_cast<int>(j), {}};
      for (std::size_t t = 0; t < traits.size(); ++t) {
        const Interval& a = intervals[i][t];
        const Interval& b = intervals[j][t];
        r.non_overlapping.push_back(a.hi < b.lo || b.hi < a.lo);
      }
      out.push_back(std::move(r));
    }
  return out;
}

}  // namespace personas
