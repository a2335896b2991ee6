#include "personas/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "personas/error.hpp"
#include "personas/rng.hpp"

namespace personas {

namespace {

struct PairCounts {
  std::int64_t both = 0;    // co-clustered in A and in B
  std::int64_t in_a = 0;    // co-clustered in A
  std::int64_t in_b = 0;    // co-clustered in B
  std::int64_t total = 0;   // all pairs
};

std::int64_t choose2(std::int64_t k) { return k * (k - 1) / 2; }

PairCounts pair_counts(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::invalid_argument, "labelings have different lengths");
  std::map<std::pair<int, int>, std::int64_t> joint;
  std::map<int, std::int64_t> ca, cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++joint[{a[i], b[i]}];
    ++ca[a[i]];
    ++cb[b[i]];
  }
  PairCounts pc;
  for (const auto& [key, n] : joint) pc.both += choose2(n);
  for (const auto& [key, n] : ca) pc.in_a += choose2(n);
  for (const auto& [key, n] : cb) pc.in_b += choose2(n);
  pc.total = choose2(static_cast<std::int64_t>(a.size()));
  return pc;
}

void check_config(const DistanceMatrix& dm, const SensitivityConfig& config) {
  const int n = static_cast<int>(dm.size());
  if (config.samples < 1) throw Error(ErrorCode::invalid_argument, "samples must be positive");
  if (config.levels.empty()) throw Error(ErrorCode::invalid_argument, "no levels requested");
  const int r_max = config.r_values.empty() ? 0 : *std::max_element(config.r_values.begin(), config.r_values.end());
  for (int r : config.r_values)
    if (r < 0 || r >= n) throw Error(ErrorCode::invalid_argument, "removal count r must lie in [0, n)");
  for (int v : config.levels)
    if (v < 1 || v > n - r_max)
      throw Error(ErrorCode::invalid_argument, "level " + std::to_string(v) + " exceeds the reduced sample size");
}

// FM values of one (r, sample) draw, one per requested level.
std::vector<double> one_sample(const DistanceMatrix& dm, const Dendrogram& full, const SensitivityConfig& config,
                               int r, int sample, int max_splits) {
  const int n = static_cast<int>(dm.size());
  std::mt19937_64 engine(derive_seed(config.seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(sample)));
  const std::vector<int> survivors = sample_subset(engine, n, n - r);
  const Dendrogram reduced =
      build_dendrogram(dm.submatrix(survivors), nullptr, BuildOptions{max_splits, config.split_rule});

  std::vector<double> out;
  out.reserve(config.levels.size());
  for (int v : config.levels) {
    const auto full_labels = labels_of(full, cut_at_level(full, v));
    std::vector<int> restricted(survivors.size());
    for (std::size_t k = 0; k < survivors.size(); ++k) restricted[k] = full_labels[survivors[k]];
    out.push_back(fowlkes_mallows(restricted, labels_of(reduced, cut_at_level(reduced, v))));
  }
  return out;
}

FMReport assemble(const SensitivityConfig& config, const std::vector<std::vector<double>>& values) {
  FMReport report;
  report.r_values = config.r_values;
  report.levels = config.levels;
  report.samples = config.samples;
  report.seed = config.seed;
  const std::size_t nr = config.r_values.size();
  const std::size_t nv = config.levels.size();
  report.mean_fm.assign(nr, std::vector<double>(nv, 0.0));
  if (config.keep_distributions)
    report.distributions.assign(nr, std::vector<std::vector<double>>(nv, std::vector<double>(config.samples)));
  for (std::size_t ri = 0; ri < nr; ++ri)
    for (std::size_t vi = 0; vi < nv; ++vi) {
      double sum = 0.0;
      for (int s = 0; s < config.samples; ++s) {
        const double fm = values[ri * config.samples + s][vi];
        sum += fm;
        if (config.keep_distributions) report.distributions[ri][vi][s] = fm;
      }
      report.mean_fm[ri][vi] = sum / config.samples;
    }
  return report;
}

}  // namespace

double fowlkes_mallows(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
  const PairCounts pc = pair_counts(labels_a, labels_b);
  if (pc.in_a == 0 && pc.in_b == 0) return 1.0;
  if (pc.both == 0) return 0.0;
  return static_cast<double>(pc.both) / std::sqrt(static_cast<double>(pc.in_a) * static_cast<double>(pc.in_b));
}

double adjusted_rand_index(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
  const PairCounts pc = pair_counts(labels_a, labels_b);
  if (pc.total == 0) return 1.0;
  const double expected = static_cast<double>(pc.in_a) * static_cast<double>(pc.in_b) / static_cast<double>(pc.total);
  const double max_index = 0.5 * static_cast<double>(pc.in_a + pc.in_b);
  if (max_index == expected) return 1.0;
  return (static_cast<double>(pc.both) - expected) / (max_index - expected);
}

FMReport sensitivity_analysis(const DistanceMatrix& dm, const SensitivityConfig& config) {
  check_config(dm, config);
  const int max_level = *std::max_element(config.levels.begin(), config.levels.end());
  const int max_splits = max_level - 1;
  const Dendrogram full = build_dendrogram(dm, nullptr, BuildOptions{max_splits, config.split_rule});

  const long jobs = static_cast<long>(config.r_values.size()) * config.samples;
  std::vector<std::vector<double>> values(jobs);
#pragma omp parallel for schedule(dynamic, 1)
  for (long job = 0; job < jobs; ++job) {
    const int r = config.r_values[job / config.samples];
    const int s = static_cast<int>(job % config.samples);
    values[job] = one_sample(dm, full, config, r, s, max_splits);
  }
  return assemble(config, values);
}

FMReport sensitivity_analysis_serial(const DistanceMatrix& dm, const SensitivityConfig& config) {
  check_config(dm, config);
  // Fully grown trees: cuts must agree with the truncated ones used above.
  const Dendrogram full = build_dendrogram(dm, nullptr, BuildOptions{std::nullopt, config.split_rule});
  std::vector<std::vector<double>> values;
  for (int r : config.r_values)
    for (int s = 0; s < config.samples; ++s)
      values.push_back(one_sample(dm, full, config, r, s, static_cast<int>(dm.size())));
  return assemble(config, values);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SaturationReport saturation_from_matrices(const DistanceMatrix& within, const Matrix& cross,
                                          const std::vector<std::string>& validation_ids,
                                          const SaturationOptions& options) {
  const std::size_t g = within.size();
  if (g < 2) throw Error(ErrorCode::invalid_argument, "saturation needs at least 2 generation participants");
  if (cross.rows() != g) throw Error(ErrorCode::invalid_argument, "cross matrix rows must match the generation set");
  if (validation_ids.size() != cross.cols())
    throw Error(ErrorCode::invalid_argument, "validation id count must match the cross matrix");

  SaturationReport rep;
  rep.options = options;
  rep.d1.resize(g);
  for (std::size_t j = 0; j < g; ++j) {
    double best = 1.0;  // self-distance is treated as 1
    for (std::size_t i = 0; i < g; ++i)
      if (i != j) best = std::min(best, within(i, j));
    rep.d1[j] = best;
  }
  rep.d2.resize(cross.cols());
  for (std::size_t q = 0; q < cross.cols(); ++q) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < g; ++p) best = std::min(best, cross(p, q));
    rep.d2[q] = best;
  }

  rep.d1_mean = std::accumulate(rep.d1.begin(), rep.d1.end(), 0.0) / static_cast<double>(g);
  double ss = 0.0;
  for (double d : rep.d1) ss += (d - rep.d1_mean) * (d - rep.d1_mean);
  rep.d1_std = std::sqrt(ss / static_cast<double>(g));
  rep.z_defined = rep.d1_std > 0.0;
  if (rep.z_defined)
    for (double d : rep.d2) rep.z_scores.push_back((d - rep.d1_mean) / rep.d1_std);

  rep.q1 = quantile(rep.d1, 0.25);
  rep.q3 = quantile(rep.d1, 0.75);
  const double iqr = rep.q3 - rep.q1;
  rep.fence_lo = rep.q1 - 1.5 * iqr;
  rep.fence_hi = rep.q3 + 1.5 * iqr;

  if (options.rule == OutlierRule::zscore && !rep.z_defined)
    throw Error(ErrorCode::degenerate_input, "z-score rule needs non-degenerate nearest-neighbour distances");
  for (std::size_t q = 0; q < rep.d2.size(); ++q) {
    bool outlier = false;
    if (options.rule == OutlierRule::tukey) {
      outlier = rep.d2[q] > rep.fence_hi || (options.two_sided && rep.d2[q] < rep.fence_lo);
    } else {
      const double z = rep.z_scores[q];
      outlier = z > options.z_threshold || (options.two_sided && z < -options.z_threshold);
    }
    if (outlier) {
      rep.outlier_indices.push_back(static_cast<int>(q));
      rep.outliers.push_back(validation_ids[q]);
    }
  }
  return rep;
}

SaturationReport saturation_check(const Dataset& gen, const Dataset& val, const SaturationOptions& options) {
  if (gen.size() < 2) throw Error(ErrorCode::invalid_argument, "saturation needs at least 2 generation participants");
  std::vector<std::string> ids;
  for (const auto& p : val.participants()) ids.push_back(p.id);
  return saturation_from_matrices(distance_matrix(gen, DiagonalPolicy::one), cross_distance_matrix(gen, val), ids,
                                  options);
}

}  // namespace personas
