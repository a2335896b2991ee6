#include "personas/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "personas/error.hpp"
#include "personas/exact_tests.hpp"
#include "personas/io.hpp"
#include "personas/parallel.hpp"

namespace personas {

using nlohmann::json;

namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& out) : out_(out) {}
  void lap(std::string stage) {
    const auto now = std::chrono::steady_clock::now();
    out_.push_back({std::move(stage), std::chrono::duration<double>(now - last_).count()});
    last_ = now;
  }

 private:
  std::vector<StageTiming>& out_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::invalid_argument, message);
}

}  // namespace

void RunConfig::validate() const {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  require(selection_threshold > 0.0 && selection_threshold < 1.0, "selection threshold must lie in (0, 1)");
  require(selection_levels >= 1, "selection levels must be positive");
  require(boschloo_grid >= 2, "Boschloo grid needs at least 2 points");
  require(fm_samples >= 1, "FM samples must be positive");
  require(r_max >= 1, "r_max must be positive");
  require(threads >= 0, "threads must be non-negative");
}

json RunConfig::to_json() const {
  json j = {{"schema", schema_path.string()},
            {"data", data_path.string()},
            {"alpha", alpha},
            {"selection_threshold", selection_threshold},
            {"selection_levels", selection_levels},
            {"boschloo_grid", boschloo_grid},
            {"fm_samples", fm_samples},
            {"r_max", r_max},
            {"seed", seed},
            {"split_rule", to_string(split_rule)},
            {"output_dir", output_dir.string()},
            {"threads", threads},
            {"drop_invalid", drop_invalid}};
  j["validation_data"] = validation_data_path ? json(validation_data_path->string()) : json(nullptr);
  return j;
}

RunConfig RunConfig::from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "config must be a JSON object");
  static const std::set<std::string> known = {
      "schema", "data", "validation_data", "alpha", "selection_threshold", "selection_levels", "boschloo_grid",
      "fm_samples", "r_max", "seed", "split_rule", "output_dir", "threads", "drop_invalid", "format_version"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw Error(ErrorCode::invalid_argument, "unknown config key '" + key + "'");
  if (j.contains("format_version") && j["format_version"] != io::kFormatVersion)
    throw Error(ErrorCode::invalid_argument, "unsupported config format_version " + j["format_version"].dump());
  try {
    if (j.contains("schema")) c.schema_path = j["schema"].get<std::string>();
    if (j.contains("data")) c.data_path = j["data"].get<std::string>();
    if (j.contains("validation_data")) {
      if (j["validation_data"].is_null()) c.validation_data_path.reset();
      else c.validation_data_path = j["validation_data"].get<std::string>();
    }
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("selection_threshold")) c.selection_threshold = j["selection_threshold"].get<double>();
    if (j.contains("selection_levels")) c.selection_levels = j["selection_levels"].get<int>();
    if (j.contains("boschloo_grid")) c.boschloo_grid = j["boschloo_grid"].get<int>();
    if (j.contains("fm_samples")) c.fm_samples = j["fm_samples"].get<int>();
    if (j.contains("r_max")) c.r_max = j["r_max"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("split_rule")) c.split_rule = parse_split_rule(j["split_rule"].get<std::string>());
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("drop_invalid")) c.drop_invalid = j["drop_invalid"].get<bool>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("bad config value: ") + e.what());
  }
  return c;
}

PipelineResult run_pipeline(const Dataset& dataset, const RunConfig& config, const std::set<int>* retained) {
  config.validate();
  if (dataset.empty()) throw Error(ErrorCode::invalid_argument, "dataset has no participants");
  if (config.threads > 0) set_thread_count(config.threads);

  PipelineResult out;
  StageClock clock(out.timings);
  BoschlooEngine engine(BoschlooOptions{config.boschloo_grid, true, Alternative::two_sided});

  if (retained) {
    for (int t : *retained)
      if (t < 1 || t > dataset.schema().trait_count())
        throw Error(ErrorCode::invalid_argument, "retained trait " + std::to_string(t) + " is not in the schema");
    out.selection_given = true;
    out.selection.retained = *retained;
  } else {
    const DistanceMatrix dm = distance_matrix(dataset);
    clock.lap("distances");
    out.initial = build_dendrogram(dataset, dm, BuildOptions{config.selection_levels - 1, config.split_rule});
    clock.lap("initial_dendrogram");
    out.selection = select_discriminative(
        out.initial, dataset, SelectionOptions{config.selection_levels, config.selection_threshold}, engine);
    clock.lap("selection");
  }
  out.traits.assign(out.selection.retained.begin(), out.selection.retained.end());

  out.masked = mask_traits(dataset, out.selection.retained);
  const DistanceMatrix masked_dm = distance_matrix(out.masked);
  clock.lap("masked_distances");
  out.final_tree = build_dendrogram(masked_dm, &dataset, BuildOptions{std::nullopt, config.split_rule});
  clock.lap("final_dendrogram");

  out.prune = PruneOptions{config.alpha, static_cast<int>(out.traits.size())};
  const PrunedTree step1 = prune_step1(out.final_tree, dataset, out.traits, out.prune, engine);
  out.step1_leaves = step1.leaves;
  clock.lap("prune_step1");
  out.personas = prune_step2(step1, dataset, out.traits, out.prune, engine);
  clock.lap("prune_step2");
  return out;
}

std::vector<std::string> export_pipeline(const PipelineResult& result, const Dataset& dataset,
                                         const RunConfig& config) {
  namespace fs = std::filesystem;
  const fs::path dir = config.output_dir;
  const VariableSchema& schema = dataset.schema();
  std::vector<std::pair<std::string, std::string>> files;

  if (!result.selection_given)
    files.emplace_back("dendrogram_initial.json", io::dendrogram_to_json(result.initial, dataset).dump(2) + "\n");
  json tree = io::dendrogram_to_json(result.final_tree, dataset);
  std::vector<std::string> step1;
  for (int id : result.step1_leaves) step1.push_back(result.final_tree.node(id).label());
  tree["step1_leaves"] = step1;
  files.emplace_back("dendrogram.json", tree.dump(2) + "\n");
  if (!result.selection_given)
    files.emplace_back("selection.json",
                       io::selection_to_json(result.selection, schema, config.selection_threshold).dump(2) + "\n");
  files.emplace_back("personas.json",
                     io::personas_to_json(result.personas, result.final_tree, dataset, result.prune).dump(2) + "\n");
  files.emplace_back("descriptors.csv", io::descriptors_csv(result.final_tree, result.personas.leaves, schema));
  std::string report = io::persona_markdown(result.personas, result.final_tree, dataset);
  report += "\nStep 1 kept " + std::to_string(result.step1_leaves.size()) + " leaves; step 2 merged " +
            std::to_string(result.personas.merges) + " time(s).\n";
  files.emplace_back("report.md", report);

  json outputs = json::array();
  std::vector<std::string> names;
  for (const auto& [name, content] : files) {
    io::write_file(dir / name, content);
    outputs.push_back({{"file", name}, {"sha256", io::sha256_hex(content)}});
    names.push_back(name);
  }

  json inputs = json::array();
  auto add_input = [&](const std::string& role, const fs::path& p) {
    if (!p.empty()) inputs.push_back({{"role", role}, {"path", p.string()}, {"sha256", io::sha256_file(p)}});
  };
  add_input("schema", config.schema_path);
  add_input("data", config.data_path);
  if (config.validation_data_path) add_input("validation_data", *config.validation_data_path);
  json timings = json::array();
  for (const auto& t : result.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});

  const json manifest = {{"format_version", io::kFormatVersion},
                         {"artifact_version", PERSONAS_VERSION},
                         {"config", config.to_json()},
                         {"inputs", inputs},
                         {"timings", timings},
                         {"outputs", outputs}};
  io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  names.push_back("manifest.json");
  return names;
}

std::vector<std::string> manifest_mismatches(const json& manifest) {
  std::vector<std::string> bad;
  for (const auto& in : manifest.at("inputs")) {
    const std::string path = in.at("path").get<std::string>();
    std::string actual;
    try {
      actual = io::sha256_file(path);
    } catch (const Error&) {
      actual = "missing";
    }
    if (actual != in.at("sha256").get<std::string>()) bad.push_back(path);
  }
  return bad;
}

namespace {

struct Bounds {
  double lo, hi;
};

Bounds agresti_bounds(int x, int n, double z) {
  const double n_adj = n + z * z;
  const double p_adj = (x + z * z / 2.0) / n_adj;
  const double half = z * std::sqrt(p_adj * (1.0 - p_adj) / n_adj);
  return {std::max(0.0, p_adj - half), std::min(1.0, p_adj + half)};
}

}  // namespace

VerifyReport verify_personas(const json& doc, const Dataset& dataset, int boschloo_grid) {
  VerifyReport rep;
  const double alpha = doc.at("alpha").get<double>();
  const int family = doc.at("family_size").get<int>();
  const double confidence = doc.value("confidence", 0.95);
  const auto traits = doc.at("traits").get<std::vector<int>>();
  if (family < static_cast<int>(traits.size()))
    rep.violations.push_back("family size is smaller than the number of tested traits");

  std::map<std::string, int> index;
  for (std::size_t i = 0; i < dataset.size(); ++i) index[dataset.participant(i).id] = static_cast<int>(i);

  std::vector<std::string> names;
  std::vector<std::vector<int>> groups;
  std::vector<int> owner(dataset.size(), -1);
  for (const auto& p : doc.at("personas")) {
    names.push_back(p.at("id").get<std::string>());
    std::vector<int> members;
    for (const auto& id : p.at("members")) {
      const auto it = index.find(id.get<std::string>());
      if (it == index.end()) {
        rep.violations.push_back("persona " + names.back() + " lists unknown participant " + id.get<std::string>());
        continue;
      }
      if (owner[it->second] >= 0)
        rep.violations.push_back("participant " + it->first + " belongs to more than one persona");
      owner[it->second] = static_cast<int>(groups.size());
      members.push_back(it->second);
    }
    if (members.empty()) rep.violations.push_back("persona " + names.back() + " is empty");
    groups.push_back(std::move(members));
  }
  for (std::size_t i = 0; i < owner.size(); ++i)
    if (owner[i] < 0) rep.violations.push_back("participant " + dataset.participant(i).id + " has no persona");
  rep.personas = static_cast<int>(groups.size());
  if (!rep.violations.empty()) return rep;

  for (int t : traits)
    if (t < 1 || t > dataset.schema().trait_count()) {
      rep.violations.push_back("tested trait " + std::to_string(t) + " is not in the schema");
      return rep;
    }

  const double z = normal_quantile(0.5 + confidence / 2.0);
  const double cutoff = alpha / family;  // Holm rejects something iff min p <= alpha / m
  BoschlooOptions options;
  options.grid = boschloo_grid;

  auto count = [&](const std::vector<int>& members, int t) {
    int c = 0;
    for (int i : members) c += dataset.participant(i).traits[t - 1];
    return c;
  };

  for (std::size_t a = 0; a < groups.size(); ++a)
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      ++rep.pairs_checked;
      const int na = static_cast<int>(groups[a].size());
      const int nb = static_cast<int>(groups[b].size());
      std::vector<std::pair<double, Table2x2>> candidates;
      bool disjoint = false;
      for (int t : traits) {
        const int xa = count(groups[a], t);
        const int xb = count(groups[b], t);
        const Table2x2 table{xa, na, xb, nb};
        candidates.emplace_back(fisher_exact(table), table);
        const Bounds ia = agresti_bounds(xa, na, z);
        const Bounds ib = agresti_bounds(xb, nb, z);
        disjoint = disjoint || ia.hi < ib.lo || ib.hi < ia.lo;
      }
      // Boschloo never exceeds Fisher, so a Fisher p under the cutoff settles
      // the pair; otherwise evaluate traits by increasing Fisher p.
      std::sort(candidates.begin(), candidates.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      bool rejected = false;
      for (const auto& [p_fisher, table] : candidates) {
        if (p_fisher <= cutoff || boschloo_serial(table, options).p_boschloo <= cutoff) {
          rejected = true;
          break;
        }
      }
      const std::string pair = names[a] + " vs " + names[b];
      if (!rejected) rep.violations.push_back(pair + ": no Holm-rejected trait");
      if (!disjoint) rep.violations.push_back(pair + ": every Agresti interval pair overlaps");
    }
  return rep;
}

}  // namespace personas
