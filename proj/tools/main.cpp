// personas: command-line front end.
//
// Exit codes: 0 success, 1 validation failure (invalid records, failed
// verification, tampered inputs), 2 any other error. Errors are printed to
// stderr as {"error": {"code", "message", ...}}.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "personas/exact_tests.hpp"
#include "personas/io.hpp"
#include "personas/parallel.hpp"
#include "personas/pipeline.hpp"
#include "personas/projections.hpp"
#include "personas/synthetic.hpp"
#include "personas/validation.hpp"

namespace fs = std::filesystem;
using namespace personas;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitError = 2;

struct Options {
  RunConfig run;
  std::string config_file;
  std::string validation_data;
  std::string selection_file;
  std::string personas_file;
  std::string manifest_file;
  std::string format = "csv";
  std::string spec = "knowledge";
  std::string out_file;
  std::string levels = "1-15";
  std::string rule = "tukey";
  std::string alternative = "two-sided";
  std::string split_rule = "diameter";
  int max_splits = -1;
  int x1 = 0, n1 = 0, x2 = 0, n2 = 0;
  bool no_refine = false;
  bool two_sided = false;
  double z_threshold = 3.0;
  bool keep_distributions = false;
  int validation_size = 0;
  double closed_noise = 0.0;
};

std::string default_output_dir() {
  const char* env = std::getenv("PERSONAS_OUTPUT_DIR");
  return env && *env ? env : "personas_out";
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

json error_json(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

// Flags, then the --config file on top.
RunConfig resolve(Options& o) {
  o.run.split_rule = parse_split_rule(o.split_rule);
  if (!o.validation_data.empty()) o.run.validation_data_path = o.validation_data;
  if (!o.config_file.empty()) {
    json j;
    try {
      j = json::parse(io::read_file(o.config_file));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::invalid_argument, "malformed config file: " + std::string(e.what()));
    }
    o.run = RunConfig::from_json(j, o.run);
  }
  o.run.validate();
  if (o.run.threads > 0) set_thread_count(o.run.threads);
  return o.run;
}

void require_inputs(const RunConfig& c) {
  if (c.schema_path.empty()) throw Error(ErrorCode::invalid_argument, "--schema is required");
  if (c.data_path.empty()) throw Error(ErrorCode::invalid_argument, "--data is required");
}

Dataset load(const RunConfig& c, const fs::path& data, DatasetRole role = DatasetRole::generation) {
  auto res = io::load_dataset(c.schema_path, data, io::LoadOptions{c.drop_invalid, true, role});
  for (const auto& d : res.dropped)
    std::cerr << json{{"warning", "dropped invalid record"}, {"participant", d.participant}}.dump() << "\n";
  return std::move(res.dataset);
}

std::optional<std::set<int>> load_selection(const Options& o) {
  if (o.selection_file.empty()) return std::nullopt;
  return io::retained_from_json(json::parse(io::read_file(o.selection_file)));
}

std::vector<int> parse_levels(const std::string& spec) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoi(part));
      } else {
        const int a = std::stoi(part.substr(0, dash));
        const int b = std::stoi(part.substr(dash + 1));
        for (int v = a; v <= b; ++v) out.push_back(v);
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, "bad level list '" + spec + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::invalid_argument, "empty level list");
  return out;
}

int cmd_validate(Options& o) {
  RunConfig c = resolve(o);
  require_inputs(c);
  const auto schema = io::load_schema(c.schema_path);
  json files = json::array();
  std::vector<fs::path> paths = {c.data_path};
  if (c.validation_data_path) paths.push_back(*c.validation_data_path);
  bool ok = true;
  for (const auto& p : paths) {
    json entry = {{"file", p.string()}};
    try {
      auto res = io::load_dataset(schema, p, io::LoadOptions{c.drop_invalid});
      entry["valid"] = res.dropped.empty();
      entry["participants"] = res.dataset.size();
      entry["dropped"] = res.dropped.size();
    } catch (const io::ValidationError& e) {
      ok = false;
      entry["valid"] = false;
      json violations = json::array();
      for (const auto& d : e.diagnostics())
        for (const auto& v : d.violations)
          violations.push_back({{"participant", d.participant}, {"variable", v.variable}, {"set_levels", v.count}});
      entry["violations"] = violations;
    }
    files.push_back(entry);
  }
  print_json({{"valid", ok},
              {"schema", {{"traits", schema->trait_count()},
                          {"likert", schema->likert_count()},
                          {"binary", schema->binary_count()},
                          {"variables", schema->variable_count()}}},
              {"files", files}});
  return ok ? kExitOk : kExitInvalid;
}

int cmd_distances(Options& o) {
  RunConfig c = resolve(o);
  require_inputs(c);
  Dataset d = load(c, c.data_path);
  if (auto keep = load_selection(o)) d = mask_traits(d, *keep);
  const DistanceMatrix dm = distance_matrix(d);
  fs::path out;
  if (o.format == "csv") {
    out = c.output_dir / "distances.csv";
    io::write_file(out, io::distance_matrix_csv(dm, d));
  } else if (o.format == "binary") {
    out = c.output_dir / "distances.bin";
    io::write_file(out, io::distance_matrix_binary(dm));
  } else {
    throw Error(ErrorCode::invalid_argument, "--format must be csv or binary");
  }
  print_json({{"participants", d.size()}, {"output", out.string()}});
  return kExitOk;
}

int cmd_cluster(Options& o) {
  RunConfig c = resolve(o);
  require_inputs(c);
  const Dataset full = load(c, c.data_path);
  Dataset d = full;
  if (auto keep = load_selection(o)) d = mask_traits(full, *keep);
  BuildOptions b{std::nullopt, c.split_rule};
  if (o.max_splits >= 0) b.max_splits = o.max_splits;
  const Dendrogram tree = build_dendrogram(distance_matrix(d), &full, b);
  const fs::path out = c.output_dir / "dendrogram.json";
  io::write_file(out, io::dendrogram_to_json(tree, full).dump(2) + "\n");
  print_json({{"leaves", tree.leaf_count()}, {"output", out.string()}});
  return kExitOk;
}

int cmd_select(Options& o) {
  RunConfig c = resolve(o);
  require_inputs(c);
  const Dataset d = load(c, c.data_path);
  BoschlooEngine engine(BoschlooOptions{c.boschloo_grid, true, Alternative::two_sided});
  const Dendrogram tree =
      build_dendrogram(d, distance_matrix(d), BuildOptions{c.selection_levels - 1, c.split_rule});
  const SelectionReport rep =
      select_discriminative(tree, d, SelectionOptions{c.selection_levels, c.selection_threshold}, engine);
  const fs::path out = c.output_dir / "selection.json";
  io::write_file(out, io::selection_to_json(rep, d.schema(), c.selection_threshold).dump(2) + "\n");
  if (rep.degraded)
    std::cerr << json{{"warning", "dendrogram shallower than the requested selection levels"},
                      {"examined_levels", rep.examined_levels}}.dump()
              << "\n";
  print_json({{"retained", rep.retained.size()}, {"comparisons", rep.comparisons}, {"output", out.string()}});
  return kExitOk;
}

int run_and_export(Options& o, const std::set<int>* retained) {
  RunConfig c = resolve(o);
  require_inputs(c);
  const Dataset d = load(c, c.data_path);
  const PipelineResult r = run_pipeline(d, c, retained);
  const auto files = export_pipeline(r, d, c);
  std::vector<std::string> names;
  for (int id : r.personas.leaves) names.push_back(r.final_tree.node(id).label());
  print_json({{"personas", names},
              {"step1_leaves", r.step1_leaves.size()},
              {"traits", r.traits.size()},
              {"output_dir", c.output_dir.string()},
              {"files", files}});
  return kExitOk;
}

int cmd_pipeline(Options& o) { return run_and_export(o, nullptr); }

int cmd_prune(Options& o) {
  const auto keep = load_selection(o);
  if (!keep) throw Error(ErrorCode::invalid_argument, "--selection is required");
  return run_and_export(o, &*keep);
}

int cmd_sensitivity(Options& o) {
  RunConfig c = resolve(o);
  require_inputs(c);
  const Dataset full = load(c, c.data_path);

  std::set<int> keep;
  int min_size = 0;
  if (!o.personas_file.empty() && !o.selection_file.empty()) {
    keep = *load_selection(o);
    const json doc = json::parse(io::read_file(o.personas_file));
    for (const auto& p : doc.at("personas")) {
      const int s = p.at("size").get<int>();
      min_size = min_size == 0 ? s : std::min(min_size, s);
    }
  } else {
    const PipelineResult r = run_pipeline(full, c, nullptr);
    keep = r.selection.retained;
    for (int id : r.personas.leaves) {
      const int s = static_cast<int>(r.final_tree.node(id).members.size());
      min_size = min_size == 0 ? s : std::min(min_size, s);
    }
  }
  // Half of the smallest persona, rounded up.
  const int r_limit = (min_size + 1) / 2;
  if (c.r_max > r_limit)
    throw Error(ErrorCode::invalid_argument,
                "r_max " + std::to_string(c.r_max) + " exceeds half of the smallest persona (" +
                    std::to_string(min_size) + " participants); use --r-max " + std::to_string(r_limit) +
                    " or less");

  const Dataset masked = mask_traits(full, keep);
  SensitivityConfig s;
  s.r_values.clear();
  for (int r = 1; r <= c.r_max; ++r) s.r_values.push_back(r);
  s.levels = parse_levels(o.levels);
  s.samples = c.fm_samples;
  s.seed = c.seed;
  s.split_rule = c.split_rule;
  s.keep_distributions = o.keep_distributions;
  const FMReport rep = sensitivity_analysis(distance_matrix(masked), s);

  json files = json::array();
  io::write_file(c.output_dir / "fm.csv", io::fm_csv(rep));
  files.push_back("fm.csv");
  if (o.keep_distributions) {
    io::write_file(c.output_dir / "fm_samples.csv", io::fm_samples_csv(rep));
    files.push_back("fm_samples.csv");
  }
  json notes = json::array();
  for (std::size_t ri = 0; ri < rep.r_values.size(); ++ri)
    for (std::size_t vi = 0; vi < rep.levels.size(); ++vi)
      if (rep.mean_fm[ri][vi] < 0.6)
        notes.push_back("mean FM " + io::format_double(rep.mean_fm[ri][vi]) + " < 0.6 at r=" +
                        std::to_string(rep.r_values[ri]) + ", v=" + std::to_string(rep.levels[vi]));
  print_json({{"output_dir", c.output_dir.string()}, {"files", files}, {"notes", notes}});
  return kExitOk;
}

int cmd_saturation(Options& o) {
  RunConfig c = resolve(o);
  require_inputs(c);
  if (!c.validation_data_path) throw Error(ErrorCode::invalid_argument, "--validation-data is required");
  Dataset gen = load(c, c.data_path);
  Dataset val = load(c, *c.validation_data_path, DatasetRole::validation);
  if (auto keep = load_selection(o)) {
    gen = mask_traits(gen, *keep);
    val = mask_traits(val, *keep);
  }
  SaturationOptions so;
  if (o.rule == "tukey") so.rule = OutlierRule::tukey;
  else if (o.rule == "zscore") so.rule = OutlierRule::zscore;
  else throw Error(ErrorCode::invalid_argument, "--rule must be tukey or zscore");
  so.two_sided = o.two_sided;
  so.z_threshold = o.z_threshold;
  const SaturationReport rep = saturation_check(gen, val, so);
  const fs::path out = c.output_dir / "saturation.json";
  io::write_file(out, io::saturation_to_json(rep).dump(2) + "\n");
  print_json({{"outliers", rep.outliers}, {"output", out.string()}});
  return kExitOk;
}

int cmd_project(Options& o) {
  RunConfig c = resolve(o);
  require_inputs(c);
  const Dataset d = load(c, c.data_path);
  ProjectionSpec spec;
  if (const ProjectionSpec* b = find_builtin(o.spec)) spec = *b;
  else if (fs::exists(o.spec)) spec = io::projection_spec_from_json(json::parse(io::read_file(o.spec)));
  else throw Error(ErrorCode::invalid_argument, "unknown projection spec '" + o.spec + "'");

  std::vector<ProjectedPoint> points;
  if (!o.personas_file.empty()) {
    const json doc = json::parse(io::read_file(o.personas_file));
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < d.size(); ++i) index[d.participant(i).id] = static_cast<int>(i);
    std::vector<std::pair<std::string, std::vector<int>>> groups;
    for (const auto& p : doc.at("personas")) {
      std::vector<int> members;
      for (const auto& id : p.at("members")) {
        const auto it = index.find(id.get<std::string>());
        if (it == index.end())
          throw Error(ErrorCode::data_error, "persona member " + id.get<std::string>() + " is not in the data");
        members.push_back(it->second);
      }
      groups.emplace_back(p.at("id").get<std::string>(), std::move(members));
    }
    points = project_groups(d, spec, groups);
  } else {
    points = project(d, spec);
  }
  const std::string csv = io::projection_csv(points, spec.name);
  if (o.out_file.empty()) std::cout << csv;
  else io::write_file(o.out_file, csv);
  return kExitOk;
}

int cmd_test2x2(Options& o) {
  BoschlooOptions b;
  b.grid = o.run.boschloo_grid;
  b.refine = !o.no_refine;
  if (o.alternative == "two-sided") b.alternative = Alternative::two_sided;
  else if (o.alternative == "greater") b.alternative = Alternative::greater;
  else if (o.alternative == "less") b.alternative = Alternative::less;
  else throw Error(ErrorCode::invalid_argument, "--alternative must be two-sided, greater or less");
  const Table2x2 t{o.x1, o.n1, o.x2, o.n2};
  const TestResult r = boschloo(t, b);
  print_json({{"x1", o.x1}, {"n1", o.n1}, {"x2", o.x2}, {"n2", o.n2},
              {"p_fisher", r.p_fisher}, {"p_boschloo", r.p_boschloo},
              {"nuisance_argmax", r.nuisance_argmax}, {"grid", r.grid_size}});
  return kExitOk;
}

int cmd_verify(Options& o) {
  RunConfig c = resolve(o);
  json out;
  bool ok = true;
  if (!o.manifest_file.empty()) {
    const auto bad = manifest_mismatches(json::parse(io::read_file(o.manifest_file)));
    out["manifest"] = {{"ok", bad.empty()}, {"mismatched_inputs", bad}};
    ok = ok && bad.empty();
  }
  if (!o.personas_file.empty()) {
    require_inputs(c);
    const Dataset d = load(c, c.data_path);
    const VerifyReport rep = verify_personas(json::parse(io::read_file(o.personas_file)), d, c.boschloo_grid);
    out["personas"] = {{"ok", rep.ok()}, {"count", rep.personas}, {"pairs_checked", rep.pairs_checked},
                       {"violations", rep.violations}};
    ok = ok && rep.ok();
  }
  if (out.empty()) throw Error(ErrorCode::invalid_argument, "give --personas and/or --manifest");
  out["ok"] = ok;
  print_json(out);
  return ok ? kExitOk : kExitInvalid;
}

int cmd_generate(Options& o) {
  PlantedConfig pc;
  pc.seed = o.run.seed;
  pc.closed_noise = o.closed_noise;
  const PlantedData gen = generate_planted(pc);
  const fs::path dir = o.run.output_dir;

  auto records_of = [](const Dataset& d) {
    std::vector<io::RawRecord> out;
    for (const auto& p : d.participants()) out.push_back({p.id, p.traits});
    return out;
  };
  auto write_data = [&](const std::string& stem, const std::vector<io::RawRecord>& rs) {
    const int T = gen.dataset.schema().trait_count();
    const std::string name = stem + (o.format == "json" ? ".json" : ".csv");
    io::write_file(dir / name, o.format == "json" ? io::data_to_json(rs).dump(1) + "\n" : io::data_to_csv(rs, T));
    return name;
  };

  json files = json::array();
  files.push_back(write_data("planted", records_of(gen.dataset)));
  std::string labels = "id,archetype\n";
  for (std::size_t i = 0; i < gen.labels.size(); ++i)
    labels += gen.dataset.participant(i).id + "," + std::to_string(gen.labels[i]) + "\n";
  io::write_file(dir / "planted_labels.csv", labels);
  files.push_back("planted_labels.csv");
  if (o.validation_size > 0) {
    // Validation participants are fresh draws from the same archetypes.
    PlantedConfig vc = pc;
    vc.seed = pc.seed ^ 0x76616cULL;
    auto rs = records_of(generate_planted(vc).dataset);
    if (o.validation_size < static_cast<int>(rs.size())) rs.resize(o.validation_size);
    for (auto& r : rs) r.id = "v" + r.id.substr(1);
    files.push_back(write_data("planted_validation", rs));
  }
  io::write_file(dir / "schema.json", io::schema_to_json(*reference_schema()).dump(2) + "\n");
  files.push_back("schema.json");
  print_json({{"output_dir", dir.string()}, {"files", files}, {"participants", gen.dataset.size()}});
  return kExitOk;
}

void add_common(CLI::App* sub, Options& o, bool data = true) {
  sub->add_option("--config", o.config_file, "JSON file whose keys override the flags");
  sub->add_option("--output-dir", o.run.output_dir, "Output directory (default: $PERSONAS_OUTPUT_DIR or personas_out)");
  sub->add_option("--threads", o.run.threads, "Worker threads (0: OpenMP default)");
  if (!data) return;
  sub->add_option("--schema", o.run.schema_path, "Schema JSON file");
  sub->add_option("--data", o.run.data_path, "Participant data (CSV or JSON)");
  sub->add_flag("--drop-invalid", o.run.drop_invalid, "Drop records that violate Likert exclusivity");
}

void add_stats(CLI::App* sub, Options& o) {
  sub->add_option("--alpha", o.run.alpha, "Family-wise significance level");
  sub->add_option("--selection-threshold", o.run.selection_threshold, "Raw p threshold for trait selection");
  sub->add_option("--selection-levels", o.run.selection_levels, "Dendrogram cuts examined by selection");
  sub->add_option("--grid", o.run.boschloo_grid, "Nuisance grid size of the Boschloo test");
  sub->add_option("--split-rule", o.split_rule, "diameter, avg-dissimilarity or largest");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  o.run.output_dir = default_output_dir();

  CLI::App app{"Questionnaire persona elicitation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PERSONAS_VERSION);

  std::map<CLI::App*, int (*)(Options&)> handlers;
  auto add = [&](const std::string& name, const std::string& help, int (*fn)(Options&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    handlers[sub] = fn;
    return sub;
  };

  auto* validate = add("validate-data", "Check data files against the schema", cmd_validate);
  add_common(validate, o);
  validate->add_option("--validation-data", o.validation_data, "Validation participants");

  auto* distances = add("distances", "Write the dissimilarity matrix", cmd_distances);
  add_common(distances, o);
  distances->add_option("--selection", o.selection_file, "selection.json whose retained traits mask the data");
  distances->add_option("--format", o.format, "csv or binary");

  auto* cluster = add("cluster", "Build the divisive dendrogram", cmd_cluster);
  add_common(cluster, o);
  cluster->add_option("--selection", o.selection_file, "selection.json whose retained traits mask the data");
  cluster->add_option("--split-rule", o.split_rule, "diameter, avg-dissimilarity or largest");
  cluster->add_option("--max-splits", o.max_splits, "Stop after this many splits");

  auto* select = add("select", "Select discriminative traits", cmd_select);
  add_common(select, o);
  add_stats(select, o);

  auto* prune = add("prune", "Prune the dendrogram of the masked data into personas", cmd_prune);
  add_common(prune, o);
  add_stats(prune, o);
  prune->add_option("--selection", o.selection_file, "selection.json from the select subcommand");

  auto* pipeline = add("pipeline", "Run every stage and export personas", cmd_pipeline);
  add_common(pipeline, o);
  add_stats(pipeline, o);

  auto* sensitivity = add("sensitivity", "Fowlkes-Mallows stability under participant removal", cmd_sensitivity);
  add_common(sensitivity, o);
  add_stats(sensitivity, o);
  sensitivity->add_option("--selection", o.selection_file, "selection.json (with --personas skips the pipeline)");
  sensitivity->add_option("--personas", o.personas_file, "personas.json (with --selection skips the pipeline)");
  sensitivity->add_option("--r-max", o.run.r_max, "Largest removal count");
  sensitivity->add_option("--samples", o.run.fm_samples, "Samples per removal count");
  sensitivity->add_option("--levels", o.levels, "Cut sizes, e.g. 1-15 or 2,4,8");
  sensitivity->add_option("--seed", o.run.seed, "Root seed");
  sensitivity->add_flag("--keep-distributions", o.keep_distributions, "Also write per-sample FM values");

  auto* saturation = add("saturation", "Nearest-neighbour outlier check of a validation set", cmd_saturation);
  add_common(saturation, o);
  saturation->add_option("--validation-data", o.validation_data, "Validation participants")->required();
  saturation->add_option("--selection", o.selection_file, "selection.json whose retained traits mask both sets");
  saturation->add_option("--rule", o.rule, "tukey or zscore");
  saturation->add_flag("--two-sided", o.two_sided, "Also flag unusually close validation participants");
  saturation->add_option("--z-threshold", o.z_threshold, "Threshold of the z-score rule");

  auto* projectc = add("project", "Project participants or personas onto attribute axes", cmd_project);
  add_common(projectc, o);
  projectc->add_option("--spec", o.spec, "Built-in spec name or projection spec JSON file");
  projectc->add_option("--personas", o.personas_file, "personas.json: one row per persona");
  projectc->add_option("--out", o.out_file, "Write the CSV here instead of stdout");

  auto* test = add("test2x2", "Fisher and Boschloo tests of one 2x2 table", cmd_test2x2);
  test->add_option("--x1", o.x1, "Successes in group 1")->required();
  test->add_option("--n1", o.n1, "Size of group 1")->required();
  test->add_option("--x2", o.x2, "Successes in group 2")->required();
  test->add_option("--n2", o.n2, "Size of group 2")->required();
  test->add_option("--grid", o.run.boschloo_grid, "Nuisance grid size");
  test->add_flag("--no-refine", o.no_refine, "Skip the local refinement around the grid maximum");
  test->add_option("--alternative", o.alternative, "two-sided, greater or less");

  auto* verify = add("verify", "Independently re-check exported personas and manifest hashes", cmd_verify);
  add_common(verify, o);
  verify->add_option("--personas", o.personas_file, "personas.json to audit");
  verify->add_option("--manifest", o.manifest_file, "manifest.json whose input hashes are re-checked");
  verify->add_option("--grid", o.run.boschloo_grid, "Nuisance grid size");

  auto* generate = add("generate", "Write a planted-archetype synthetic dataset", cmd_generate);
  add_common(generate, o, false);
  generate->add_option("--seed", o.run.seed, "Generator seed");
  generate->add_option("--format", o.format, "csv or json");
  generate->add_option("--validation-size", o.validation_size, "Also write this many validation participants");
  generate->add_option("--closed-noise", o.closed_noise, "Chance a closed answer moves one level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json("usage", e.what()).dump() << "\n";
    return kExitError;
  }

  try {
    for (const auto& [sub, fn] : handlers)
      if (sub->parsed()) return fn(o);
    return kExitError;
  } catch (const io::ValidationError& e) {
    json j = error_json(to_string(e.code()), e.what());
    json diags = json::array();
    for (const auto& d : e.diagnostics()) {
      json vs = json::array();
      for (const auto& v : d.violations) vs.push_back({{"variable", v.variable}, {"set_levels", v.count}});
      diags.push_back({{"participant", d.participant}, {"violations", vs}});
    }
    j["error"]["diagnostics"] = diags;
    std::cerr << j.dump() << "\n";
    return kExitInvalid;
  } catch (const Error& e) {
    std::cerr << error_json(to_string(e.code()), e.what()).dump() << "\n";
    return e.code() == ErrorCode::validation_failed ? kExitInvalid : kExitError;
  } catch (const json::exception& e) {
    std::cerr << error_json("data_error", e.what()).dump() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what()).dump() << "\n";
    return kExitError;
  }
}
