#include "personas/exact_tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "personas/error.hpp"

namespace personas {

namespace {

constexpr int kLogFactorialTable = 20002;

double log_factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactorialTable);
    t[0] = 0.0;
    for (int k = 1; k < kLogFactorialTable; ++k) t[k] = t[k - 1] + std::log(static_cast<double>(k));
    return t;
  }();
  if (n < kLogFactorialTable) return table[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_choose(int n, int k) { return log_factorial(n) - log_factorial(k) - log_factorial(n - k); }

// Binomial pmf over 0..n at success probability pi, via log-factorials.
void binomial_pmf(int n, double pi, std::vector<double>& out) {
  out.resize(n + 1);
  const double lp = std::log(pi);
  const double lq = std::log1p(-pi);
  for (int y = 0; y <= n; ++y) out[y] = std::exp(log_choose(n, y) + y * lp + (n - y) * lq);
}

// Conditional p-values of every outcome y1 in [lo, hi] for row sizes
// (n1, n2) and column margin s; out[y1 - lo].
int margin_statistics(int n1, int n2, int s, Alternative alternative, std::vector<double>& out) {
  const int lo = std::max(0, s - n2);
  const int hi = std::min(n1, s);
  const int k = hi - lo + 1;
  std::vector<double> pmf(k);
  const double denom = log_choose(n1 + n2, s);
  for (int y = lo; y <= hi; ++y) pmf[y - lo] = std::exp(log_choose(n1, y) + log_choose(n2, s - y) - denom);

  // Tail sums are divided by the total mass (summed in the same order) so
  // that a tail covering every outcome is exactly 1.
  out.assign(k, 0.0);
  double total = 1.0;
  switch (alternative) {
    case Alternative::two_sided: {
      std::vector<double> sorted = pmf;
      std::sort(sorted.begin(), sorted.end());
      std::vector<double> prefix(k + 1, 0.0);
      for (int i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + sorted[i];
      for (int i = 0; i < k; ++i) {
        const double bound = pmf[i] * (1.0 + kTieTolerance);
        const auto upto = std::upper_bound(sorted.begin(), sorted.end(), bound) - sorted.begin();
        out[i] = prefix[upto];
      }
      total = prefix[k];
      break;
    }
    case Alternative::greater: {
      double acc = 0.0;
      for (int i = k - 1; i >= 0; --i) out[i] = (acc += pmf[i]);
      total = acc;
      break;
    }
    case Alternative::less: {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) out[i] = (acc += pmf[i]);
      total = acc;
      break;
    }
  }
  for (double& p : out) p = std::min(p / total, 1.0);
  return lo;
}

void validate_grid(int grid) {
  if (grid < 2) throw Error(ErrorCode::invalid_argument, "Boschloo grid must have at least 2 points");
}

double grid_point(int g, int grid) { return static_cast<double>(g + 1) / static_cast<double>(grid + 1); }

constexpr int kGoldenIterations = 48;

// Golden-section search for the maximum of f on [a, b]; returns the best
// evaluated (value, argument) pair.
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  std::pair<double, double> best = fc >= fd ? std::pair{fc, c} : std::pair{fd, d};
  for (int it = 0; it < kGoldenIterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
      if (fc > best.first) best = {fc, c};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
      if (fd > best.first) best = {fd, d};
    }
  }
  return best;
}

}  // namespace

void validate(const Table2x2& t) {
  if (t.x1 < 0 || t.x2 < 0 || t.x1 > t.n1 || t.x2 > t.n2)
    throw Error(ErrorCode::invalid_argument,
                "invalid 2x2 table (" + std::to_string(t.x1) + "/" + std::to_string(t.n1) + ", " +
                    std::to_string(t.x2) + "/" + std::to_string(t.n2) + ")");
}

double fisher_exact(const Table2x2& t, Alternative alternative) {
  validate(t);
  std::vector<double> stats;
  const int lo = margin_statistics(t.n1, t.n2, t.x1 + t.x2, alternative, stats);
  return stats[t.x1 - lo];
}

BoschlooBattery::BoschlooBattery(int n1, int n2, BoschlooOptions options)
    : n1_(n1), n2_(n2), options_(options) {
  validate(Table2x2{0, n1, 0, n2});
  validate_grid(options_.grid);
  stat_.assign(static_cast<std::size_t>(n1 + 1) * (n2 + 1), 1.0);
  std::vector<double> margin;
  for (int s = 0; s <= n1 + n2; ++s) {
    const int lo = margin_statistics(n1, n2, s, options_.alternative, margin);
    for (std::size_t i = 0; i < margin.size(); ++i) {
      const int y1 = lo + static_cast<int>(i);
      stat_[index(y1, s - y1)] = margin[i];
    }
  }
  order_.resize(stat_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return stat_[a] < stat_[b]; });
  sorted_stat_.resize(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) sorted_stat_[i] = stat_[order_[i]];
}

double BoschlooBattery::region_probability(std::size_t k, double pi) const {
  std::vector<double> b1, b2;
  binomial_pmf(n1_, pi, b1);
  binomial_pmf(n2_, pi, b2);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint32_t o = order_[i];
    acc += b1[o / (n2_ + 1)] * b2[o % (n2_ + 1)];
  }
  return acc;
}

std::vector<TestResult> BoschlooBattery::run(std::span<const std::pair<int, int>> successes) const {
  const int grid = options_.grid;
  const std::size_t nq = successes.size();
  std::vector<TestResult> results(nq);
  if (nq == 0) return results;

  // Rejection region of each query = prefix of the sorted outcome list.
  std::vector<std::size_t> region(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    const auto [x1, x2] = successes[q];
    validate(Table2x2{x1, n1_, x2, n2_});
    const double observed = stat_[index(x1, x2)];
    region[q] = static_cast<std::size_t>(
        std::upper_bound(sorted_stat_.begin(), sorted_stat_.end(), observed * (1.0 + kTieTolerance)) -
        sorted_stat_.begin());
    results[q].p_fisher = observed;
    results[q].grid_size = grid;
  }
  std::vector<std::size_t> cuts(region);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const std::size_t nc = cuts.size();

  // values[g * nc + c] = probability of the first cuts[c] outcomes at grid point g.
  std::vector<double> values(static_cast<std::size_t>(grid) * nc, 0.0);
  const std::size_t walk = cuts.back();
#pragma omp parallel
  {
    std::vector<double> b1, b2;
#pragma omp for schedule(static)
    for (int g = 0; g < grid; ++g) {
      binomial_pmf(n1_, grid_point(g, grid), b1);
      binomial_pmf(n2_, grid_point(g, grid), b2);
      double acc = 0.0;
      std::size_t c = 0;
      while (c < nc && cuts[c] == 0) values[static_cast<std::size_t>(g) * nc + c++] = 0.0;
      for (std::size_t i = 0; i < walk; ++i) {
        const std::uint32_t o = order_[i];
        acc += b1[o / (n2_ + 1)] * b2[o % (n2_ + 1)];
        while (c < nc && cuts[c] == i + 1) values[static_cast<std::size_t>(g) * nc + c++] = acc;
      }
    }
  }

  const long nql = static_cast<long>(nq);
#pragma omp parallel for schedule(dynamic, 1)
  for (long q = 0; q < nql; ++q) {
    const std::size_t c = static_cast<std::size_t>(
        std::lower_bound(cuts.begin(), cuts.end(), region[q]) - cuts.begin());
    int best_g = 0;
    double best = values[c];
    for (int g = 1; g < grid; ++g) {
      const double v = values[static_cast<std::size_t>(g) * nc + c];
      if (v > best) {
        best = v;
        best_g = g;
      }
    }
    double argmax = grid_point(best_g, grid);
    if (options_.refine && region[q] > 0 && region[q] < order_.size()) {
      const double a = static_cast<double>(best_g) / (grid + 1);
      const double b = static_cast<double>(best_g + 2) / (grid + 1);
      const auto refined = golden_max([&](double pi) { return region_probability(region[q], pi); }, a, b);
      if (refined.first > best) {
        best = refined.first;
        argmax = refined.second;
      }
    }
    results[q].p_boschloo = std::min(best, 1.0);
    results[q].nuisance_argmax = argmax;
  }
  return results;
}

TestResult boschloo(const Table2x2& t, const BoschlooOptions& options) {
  validate(t);
  const std::pair<int, int> x{t.x1, t.x2};
  return BoschlooBattery(t.n1, t.n2, options).run(std::span(&x, 1)).front();
}

TestResult boschloo_serial(const Table2x2& t, const BoschlooOptions& options) {
  validate(t);
  validate_grid(options.grid);
  const double observed = fisher_exact(t, options.alternative);
  std::vector<std::pair<int, int>> region;
  for (int y1 = 0; y1 <= t.n1; ++y1)
    for (int y2 = 0; y2 <= t.n2; ++y2)
      if (fisher_exact(Table2x2{y1, t.n1, y2, t.n2}, options.alternative) <=
          observed * (1.0 + kTieTolerance))
        region.emplace_back(y1, y2);

  auto probability = [&](double pi) {
    std::vector<double> b1, b2;
    binomial_pmf(t.n1, pi, b1);
    binomial_pmf(t.n2, pi, b2);
    double acc = 0.0;
    for (const auto& [y1, y2] : region) acc += b1[y1] * b2[y2];
    return acc;
  };

  TestResult r;
  r.p_fisher = observed;
  r.grid_size = options.grid;
  int best_g = 0;
  double best = probability(grid_point(0, options.grid));
  for (int g = 1; g < options.grid; ++g) {
    const double v = probability(grid_point(g, options.grid));
    if (v > best) {
      best = v;
      best_g = g;
    }
  }
  r.nuisance_argmax = grid_point(best_g, options.grid);
  const std::size_t outcomes = static_cast<std::size_t>(t.n1 + 1) * (t.n2 + 1);
  if (options.refine && !region.empty() && region.size() < outcomes) {
    const auto refined = golden_max(probability, static_cast<double>(best_g) / (options.grid + 1),
                                    static_cast<double>(best_g + 2) / (options.grid + 1));
    if (refined.first > best) {
      best = refined.first;
      r.nuisance_argmax = refined.second;
    }
  }
  r.p_boschloo = std::min(best, 1.0);
  return r;
}

namespace {

std::uint64_t table_key(const Table2x2& t) {
  return (static_cast<std::uint64_t>(t.x1) << 48) | (static_cast<std::uint64_t>(t.n1) << 32) |
         (static_cast<std::uint64_t>(t.x2) << 16) | static_cast<std::uint64_t>(t.n2);
}

}  // namespace

std::vector<TestResult> BoschlooEngine::run(std::span<const Table2x2> tables) {
  std::vector<TestResult> out(tables.size());
  // Pending (canonical) tables grouped by row sizes.
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> pending;
  std::vector<Table2x2> canonical(tables.size());
  for (std::size_t i = 0; i < tables.size(); ++i) {
    Table2x2 t = tables[i];
    validate(t);
    // One-sided tests are direction dependent, so only two-sided tables are swapped.
    if (options_.alternative == Alternative::two_sided && t.n1 > t.n2) t = Table2x2{t.x2, t.n2, t.x1, t.n1};
    if (t.n1 > 0xFFFF || t.n2 > 0xFFFF)
      throw Error(ErrorCode::invalid_argument, "table too large for the Boschloo cache");
    canonical[i] = t;
    if (!cache_.count(table_key(t))) pending[{t.n1, t.n2}].emplace_back(t.x1, t.x2);
  }
  for (auto& [sizes, xs] : pending) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const BoschlooBattery battery(sizes.first, sizes.second, options_);
    const auto results = battery.run(xs);
    for (std::size_t k = 0; k < xs.size(); ++k)
      cache_[table_key(Table2x2{xs[k].first, sizes.first, xs[k].second, sizes.second})] = results[k];
  }
  for (std::size_t i = 0; i < tables.size(); ++i) out[i] = cache_.at(table_key(canonical[i]));
  return out;
}

TestResult BoschlooEngine::run(const Table2x2& t) { return run(std::span(&t, 1)).front(); }

int HolmDecision::rejected_count() const {
  return static_cast<int>(std::count(rejected.begin(), rejected.end(), true));
}

HolmDecision holm(std::span<const double> p_values, double alpha, int family_size) {
  if (family_size < static_cast<int>(p_values.size()))
    throw Error(ErrorCode::invalid_argument, "Holm family size smaller than the number of p-values");
  HolmDecision d;
  d.p_values.assign(p_values.begin(), p_values.end());
  d.alpha = alpha;
  d.family_size = family_size;
  d.rejected.assign(p_values.size(), false);
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::invalid_argument, "p-value outside [0,1]");

  std::vector<std::size_t> order(p_values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double threshold = alpha / static_cast<double>(family_size - static_cast<int>(k));
    if (p_values[order[k]] > threshold) break;
    d.rejected[order[k]] = true;
  }
  return d;
}

double normal_quantile(double probability) {
  if (!(probability > 0.0 && probability < 1.0))
    throw Error(ErrorCode::invalid_argument, "normal quantile needs a probability in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), probability);
}

Interval agresti_interval(int successes, int trials, double confidence) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw Error(ErrorCode::invalid_argument, "agresti_interval needs 0 <= x <= n, n >= 1");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw Error(ErrorCode::invalid_argument, "confidence must lie in (0,1)");
  const double z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
  const double z2 = z * z;
  const double n_adj = trials + z2;
  const double p_adj = (successes + z2 / 2.0) / n_adj;
  const double half = z * std::sqrt(p_adj * (1.0 - p_adj) / n_adj);
  return {std::max(0.0, p_adj - half), std::min(1.0, p_adj + half)};
}

}  // namespace personas
