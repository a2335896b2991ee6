#include "personas/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <functional>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace personas::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(trim(cell));
  return out;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void check_version(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("format_version"))
    throw Error(ErrorCode::data_error, what + ": missing format_version");
  if (j.at("format_version").get<int>() != kFormatVersion)
    throw Error(ErrorCode::data_error, what + ": unsupported format_version " + j.at("format_version").dump());
}

VariableKind parse_kind(const std::string& s) {
  if (s == "likert") return VariableKind::likert;
  if (s == "binary") return VariableKind::binary;
  throw Error(ErrorCode::schema_error, "unknown variable kind '" + s + "'");
}

VariableSource parse_source(const std::string& s) {
  if (s == "closed_question") return VariableSource::closed_question;
  if (s == "open_question") return VariableSource::open_question;
  if (s == "composite") return VariableSource::composite;
  throw Error(ErrorCode::schema_error, "unknown variable source '" + s + "'");
}

std::vector<std::string> participant_ids(const Dataset& dataset) {
  std::vector<std::string> ids;
  ids.reserve(dataset.size());
  for (const auto& p : dataset.participants()) ids.push_back(p.id);
  return ids;
}

}  // namespace

ValidationError::ValidationError(std::vector<RecordDiagnostic> diagnostics)
    : Error(ErrorCode::validation_failed,
            std::to_string(diagnostics.size()) + " record(s) violate Likert exclusivity" +
                (diagnostics.empty() || diagnostics.front().violations.empty()
                     ? std::string()
                     : " (first: " + diagnostics.front().participant + " in " +
                           diagnostics.front().violations.front().variable + ")")),
      diagnostics_(std::move(diagnostics)) {}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::io_error, "failed writing " + path.string());
}

std::shared_ptr<const VariableSchema> schema_from_json(const json& j) {
  try {
    check_version(j, "schema");
    const int trait_count = j.at("trait_count").get<int>();
    std::vector<std::string> labels;
    if (j.contains("traits")) {
      labels.assign(trait_count, std::string());
      for (const auto& t : j.at("traits")) {
        const int idx = t.at("index").get<int>();
        if (idx < 1 || idx > trait_count) throw Error(ErrorCode::schema_error, "trait label index out of range");
        labels[idx - 1] = t.value("label", "t_" + std::to_string(idx));
      }
      for (int t = 0; t < trait_count; ++t)
        if (labels[t].empty()) labels[t] = "t_" + std::to_string(t + 1);
    }
    std::vector<VariableDef> vars;
    for (const auto& v : j.at("variables")) {
      VariableDef def;
      def.id = v.at("id").get<std::string>();
      def.kind = parse_kind(v.at("kind").get<std::string>());
      const auto& levels = v.at("trait_levels");
      if (levels.is_number_integer()) def.trait_levels = {levels.get<int>()};
      else def.trait_levels = levels.get<std::vector<int>>();
      if (v.contains("numeric_range")) {
        const auto range = v.at("numeric_range").get<std::vector<double>>();
        if (range.size() != 2) throw Error(ErrorCode::schema_error, "numeric_range of " + def.id + " needs 2 values");
        def.range_min = range[0];
        def.range_max = range[1];
      }
      def.source = parse_source(v.value("source", std::string("open_question")));
      if (v.contains("derive"))
        def.derive = CompositeRule{v.at("derive").at("from").get<std::string>(),
                                   v.at("derive").at("to").get<std::string>()};
      vars.push_back(std::move(def));
    }
    return std::make_shared<const VariableSchema>(trait_count, std::move(vars), std::move(labels));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema_error, std::string("malformed schema: ") + e.what());
  }
}

json schema_to_json(const VariableSchema& schema) {
  json j;
  j["format_version"] = kFormatVersion;
  j["trait_count"] = schema.trait_count();
  json traits = json::array();
  for (int t = 1; t <= schema.trait_count(); ++t) traits.push_back({{"index", t}, {"label", schema.trait_label(t)}});
  j["traits"] = std::move(traits);
  json vars = json::array();
  for (const VariableDef& def : schema.variables()) {
    json v;
    v["id"] = def.id;
    v["kind"] = to_string(def.kind);
    if (def.kind == VariableKind::likert) {
      v["trait_levels"] = def.trait_levels;
      v["numeric_range"] = {def.range_min, def.range_max};
    } else {
      v["trait_levels"] = def.trait_levels.front();
    }
    v["source"] = to_string(def.source);
    if (def.derive) v["derive"] = {{"from", def.derive->from}, {"to", def.derive->to}};
    vars.push_back(std::move(v));
  }
  j["variables"] = std::move(vars);
  return j;
}

std::shared_ptr<const VariableSchema> load_schema(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema_error, "malformed schema file " + path.string() + ": " + e.what());
  }
  return schema_from_json(j);
}

std::vector<RawRecord> parse_data(const std::string& text, int trait_count) {
  std::vector<RawRecord> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    json j;
    try {
      j = json::parse(text);
      check_version(j, "data file");
      for (const auto& p : j.at("participants")) {
        RawRecord r;
        r.id = p.at("id").is_string() ? p.at("id").get<std::string>() : p.at("id").dump();
        r.traits.assign(trait_count, 0);
        for (int t : p.at("set_traits").get<std::vector<int>>()) {
          if (t < 1 || t > trait_count)
            throw Error(ErrorCode::data_error, "participant " + r.id + " has unknown trait " + std::to_string(t));
          r.traits[t - 1] = 1;
        }
        out.push_back(std::move(r));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::data_error, std::string("malformed data file: ") + e.what());
    }
    return out;
  }

  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto pos = t.find("format_version=");
      if (pos != std::string::npos && std::stoi(t.substr(pos + 15)) != kFormatVersion)
        throw Error(ErrorCode::data_error, "unsupported CSV format_version");
      continue;
    }
    const auto cells = split_csv_line(t);
    if (!header_seen) {
      header_seen = true;
      if (static_cast<int>(cells.size()) != trait_count + 1)
        throw Error(ErrorCode::data_error, "CSV header has " + std::to_string(cells.size() - 1) +
                                               " trait columns, schema has " + std::to_string(trait_count));
      continue;
    }
    if (static_cast<int>(cells.size()) != trait_count + 1)
      throw Error(ErrorCode::data_error, "CSV line " + std::to_string(line_no) + " has " +
                                             std::to_string(cells.size()) + " cells, expected " +
                                             std::to_string(trait_count + 1));
    RawRecord r;
    r.id = cells[0];
    r.traits.resize(trait_count);
    for (int k = 0; k < trait_count; ++k) {
      const std::string& c = cells[k + 1];
      if (c != "0" && c != "1")
        throw Error(ErrorCode::data_error, "CSV line " + std::to_string(line_no) + ": trait cell '" + c + "' is not 0/1");
      r.traits[k] = c == "1" ? 1 : 0;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string data_to_csv(const std::vector<RawRecord>& records, int trait_count) {
  std::string out = "# format_version=1\nid";
  for (int t = 1; t <= trait_count; ++t) out += ",t_" + std::to_string(t);
  out += '\n';
  for (const auto& r : records) {
    out += csv_cell(r.id);
    for (auto b : r.traits) out += b ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

json data_to_json(const std::vector<RawRecord>& records) {
  json ps = json::array();
  for (const auto& r : records) {
    std::vector<int> set;
    for (std::size_t t = 0; t < r.traits.size(); ++t)
      if (r.traits[t]) set.push_back(static_cast<int>(t) + 1);
    ps.push_back({{"id", r.id}, {"set_traits", set}});
  }
  return {{"format_version", kFormatVersion}, {"participants", std::move(ps)}};
}

LoadResult build_dataset(std::shared_ptr<const VariableSchema> schema, std::vector<RawRecord> records,
                         const LoadOptions& options) {
  std::vector<RecordDiagnostic> bad;
  std::vector<ParticipantRecord> good;
  std::unordered_set<std::string> ids;
  for (auto& r : records) {
    if (!ids.insert(r.id).second) throw Error(ErrorCode::data_error, "duplicate participant id " + r.id);
    if (static_cast<int>(r.traits.size()) != schema->trait_count())
      throw Error(ErrorCode::data_error, "participant " + r.id + " has the wrong trait count");
    TraitBits bits = options.derive_composites ? fill_derived_composites(*schema, std::move(r.traits))
                                               : std::move(r.traits);
    auto violations = validate_record(*schema, bits);
    if (!violations.empty()) {
      bad.push_back({r.id, std::move(violations)});
      continue;
    }
    ExplanatoryVector ex = to_explanatory(*schema, bits);
    good.push_back({r.id, std::move(bits), std::move(ex)});
  }
  if (!bad.empty() && !options.drop_invalid) throw ValidationError(std::move(bad));
  return {Dataset(std::move(schema), std::move(good), options.role), std::move(bad)};
}

LoadResult load_dataset(std::shared_ptr<const VariableSchema> schema, const std::filesystem::path& data_file,
                        const LoadOptions& options) {
  auto records = parse_data(read_file(data_file), schema->trait_count());
  return build_dataset(std::move(schema), std::move(records), options);
}

LoadResult load_dataset(const std::filesystem::path& schema_file, const std::filesystem::path& data_file,
                        const LoadOptions& options) {
  return load_dataset(load_schema(schema_file), data_file, options);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string matrix_csv(const Matrix& m, const std::vector<std::string>& row_ids,
                       const std::vector<std::string>& col_ids) {
  std::string out = "id";
  for (const auto& c : col_ids) out += "," + csv_cell(c);
  out += '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += csv_cell(row_ids.at(i));
    for (std::size_t j = 0; j < m.cols(); ++j) out += "," + format_double(m(i, j));
    out += '\n';
  }
  return out;
}

std::string distance_matrix_csv(const DistanceMatrix& dm, const Dataset& dataset) {
  const auto ids = participant_ids(dataset);
  return matrix_csv(dm.matrix(), ids, ids);
}

std::string distance_matrix_binary(const DistanceMatrix& dm) {
  static_assert(sizeof(double) == 8);
  std::string out = "PDMX";
  auto put = [&](const void* p, std::size_t n) { out.append(static_cast<const char*>(p), n); };
  const std::uint32_t version = kFormatVersion;
  const std::uint64_t n = dm.size();
  const std::uint8_t policy = dm.diagonal_policy() == DiagonalPolicy::one ? 1 : 0;
  put(&version, 4);
  put(&n, 8);
  put(&policy, 1);
  put(dm.matrix().values().data(), dm.matrix().values().size() * 8);
  return out;
}

DistanceMatrix distance_matrix_from_binary(const std::string& bytes) {
  if (bytes.size() < 17 || bytes.compare(0, 4, "PDMX") != 0)
    throw Error(ErrorCode::data_error, "not a distance matrix cache");
  std::uint32_t version;
  std::uint64_t n;
  std::uint8_t policy;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&n, bytes.data() + 8, 8);
  std::memcpy(&policy, bytes.data() + 16, 1);
  if (version != kFormatVersion) throw Error(ErrorCode::data_error, "unsupported matrix cache version");
  if (bytes.size() != 17 + n * n * 8) throw Error(ErrorCode::data_error, "truncated matrix cache");
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) std::memcpy(&m(i, j), bytes.data() + 17 + (i * n + j) * 8, 8);
  return DistanceMatrix(std::move(m), policy ? DiagonalPolicy::one : DiagonalPolicy::zero);
}

json dendrogram_to_json(const Dendrogram& tree, const Dataset& dataset) {
  const auto ids = participant_ids(dataset);
  std::function<json(int)> node_json = [&](int id) {
    const ClusterNode& n = tree.node(id);
    json j;
    j["id"] = n.label();
    j["node"] = n.id;
    j["depth"] = n.depth;
    j["split_order"] = n.split_order;
    std::vector<std::string> members;
    for (int i : n.members) members.push_back(ids.at(i));
    j["members"] = members;
    j["children"] = json::array();
    if (!n.is_leaf()) {
      j["children"].push_back(node_json(n.left));
      j["children"].push_back(node_json(n.right));
    }
    return j;
  };
  json log = json::array();
  for (const auto& s : tree.split_log())
    log.push_back({{"parent", tree.node(s.parent).label()},
                   {"children", {tree.node(s.left).label(), tree.node(s.right).label()}}});
  return {{"format_version", kFormatVersion}, {"root", node_json(tree.root().id)}, {"split_log", log},
          {"rng_seed", tree.rng_seed()}};
}

std::string descriptors_csv(const Dendrogram& tree, const std::vector<int>& nodes, const VariableSchema& schema) {
  std::string out = "cluster,size";
  for (int t = 1; t <= schema.trait_count(); ++t) out += ",t_" + std::to_string(t);
  out += '\n';
  for (int id : nodes) {
    const ClusterNode& n = tree.node(id);
    out += n.label() + "," + std::to_string(n.members.size());
    for (double d : n.descriptor) out += "," + format_double(d);
    out += '\n';
  }
  return out;
}

json selection_to_json(const SelectionReport& report, const VariableSchema& schema, double threshold) {
  json traits = json::array();
  for (int t = 1; t <= schema.trait_count(); ++t)
    traits.push_back({{"trait", t},
                      {"variable", schema.variable(schema.variable_of_trait(t)).id},
                      {"min_p", report.min_p[t - 1]},
                      {"retained", report.retained.count(t) > 0}});
  return {{"format_version", kFormatVersion},
          {"threshold", threshold},
          {"examined_levels", report.examined_levels},
          {"comparisons", report.comparisons},
          {"degraded", report.degraded},
          {"retained", std::vector<int>(report.retained.begin(), report.retained.end())},
          {"traits", traits}};
}

std::set<int> retained_from_json(const json& j) {
  check_version(j, "selection");
  const auto v = j.at("retained").get<std::vector<int>>();
  return {v.begin(), v.end()};
}

json personas_to_json(const PersonaSet& set, const Dendrogram& tree, const Dataset& dataset,
                      const PruneOptions& options) {
  const auto ids = participant_ids(dataset);
  json personas = json::array();
  for (std::size_t k = 0; k < set.leaves.size(); ++k) {
    const ClusterNode& n = tree.node(set.leaves[k]);
    std::vector<std::string> members;
    for (int i : n.members) members.push_back(ids.at(i));
    personas.push_back({{"id", n.label()}, {"size", n.members.size()}, {"members", members},
                        {"descriptor", n.descriptor}});
  }
  auto label = [&](int k) { return tree.node(set.leaves[k]).label(); };
  json pairwise = json::array();
  for (const auto& p : set.pairwise)
    pairwise.push_back({{"a", label(p.a)}, {"b", label(p.b)}, {"rejected_traits", p.report.rejected_traits()},
                        {"min_p", p.report.min_p()}});
  json ci = json::array();
  for (const auto& c : set.ci_overlap) {
    std::vector<int> disjoint;
    for (std::size_t t = 0; t < set.traits.size(); ++t)
      if (c.non_overlapping[t]) disjoint.push_back(set.traits[t]);
    ci.push_back({{"a", label(c.a)}, {"b", label(c.b)}, {"non_overlapping_traits", disjoint}, {"passes", c.passes()}});
  }
  const int family = options.family_size > 0 ? options.family_size : static_cast<int>(set.traits.size());
  return {{"format_version", kFormatVersion},
          {"alpha", options.alpha},
          {"family_size", family},
          {"confidence", 0.95},
          {"traits", set.traits},
          {"step2_merges", set.merges},
          {"personas", personas},
          {"pairwise", pairwise},
          {"ci_overlap", ci}};
}

std::string persona_markdown(const PersonaSet& set, const Dendrogram& tree, const Dataset& dataset) {
  const VariableSchema& schema = dataset.schema();
  std::ostringstream md;
  md << "# Personas\n\n" << set.leaves.size() << " persona(s) over " << dataset.size() << " participants, "
     << set.traits.size() << " discriminative traits.\n";
  const std::set<int> tested(set.traits.begin(), set.traits.end());
  for (int id : set.leaves) {
    const ClusterNode& n = tree.node(id);
    md << "\n## Persona " << n.label() << " (" << n.members.size() << " participants)\n\n";
    md << "| variable | trait | label | frequency |\n|---|---|---|---|\n";
    for (const VariableDef& def : schema.variables()) {
      bool any = false;
      for (int t : def.trait_levels) any = any || (tested.count(t) && n.descriptor[t - 1] > 0.0);
      if (!any) continue;
      for (int t : def.trait_levels) {
        if (!tested.count(t)) continue;
        if (def.kind == VariableKind::binary && n.descriptor[t - 1] == 0.0) continue;
        char freq[32];
        std::snprintf(freq, sizeof freq, "%.2f", n.descriptor[t - 1]);
        md << "| " << def.id << " | t_" << t << " | " << schema.trait_label(t) << " | " << freq << " |\n";
      }
    }
  }
  return md.str();
}

std::string fm_csv(const FMReport& report) {
  std::string out = "r,v,mean_fm\n";
  for (std::size_t ri = 0; ri < report.r_values.size(); ++ri)
    for (std::size_t vi = 0; vi < report.levels.size(); ++vi)
      out += std::to_string(report.r_values[ri]) + "," + std::to_string(report.levels[vi]) + "," +
             format_double(report.mean_fm[ri][vi]) + "\n";
  return out;
}

std::string fm_samples_csv(const FMReport& report) {
  std::string out = "r,v,sample,fm\n";
  for (std::size_t ri = 0; ri < report.distributions.size(); ++ri)
    for (std::size_t vi = 0; vi < report.distributions[ri].size(); ++vi)
      for (std::size_t s = 0; s < report.distributions[ri][vi].size(); ++s)
        out += std::to_string(report.r_values[ri]) + "," + std::to_string(report.levels[vi]) + "," +
               std::to_string(s) + "," + format_double(report.distributions[ri][vi][s]) + "\n";
  return out;
}

json saturation_to_json(const SaturationReport& report) {
  json z = report.z_defined ? json(report.z_scores) : json(nullptr);
  return {{"format_version", kFormatVersion},
          {"d1", report.d1},
          {"d2", report.d2},
          {"d1_summary", {{"mean", report.d1_mean}, {"std", report.d1_std}, {"q1", report.q1}, {"q3", report.q3}}},
          {"tukey", {{"lo", report.fence_lo}, {"hi", report.fence_hi}}},
          {"z_scores", z},
          {"decision_rule", report.options.rule == OutlierRule::tukey ? "tukey" : "zscore"},
          {"two_sided", report.options.two_sided},
          {"outliers", report.outliers}};
}

std::string projection_csv(const std::vector<ProjectedPoint>& points, const std::string& spec_name) {
  std::string out = "entity_id,x,y,spec_name\n";
  for (const auto& p : points)
    out += csv_cell(p.id) + "," + format_double(p.x) + "," + format_double(p.y) + "," + csv_cell(spec_name) + "\n";
  return out;
}

ProjectionSpec projection_spec_from_json(const json& j) {
  check_version(j, "projection spec");
  auto axis = [](const json& a) {
    Axis out;
    out.name = a.value("name", std::string());
    for (const auto& [id, w] : a.at("weights").items()) out.weights.emplace_back(id, w.get<double>());
    return out;
  };
  try {
    return ProjectionSpec{j.at("name").get<std::string>(), axis(j.at("x_axis")), axis(j.at("y_axis"))};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed projection spec: ") + e.what());
  }
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(ErrorCode::io_error, "SHA-256 computation failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

}  // namespace personas::io
