#include "personas/dissimilarity.hpp"

#include <algorithm>
#include <cmath>

#include "personas/error.hpp"

namespace personas {

DistanceMatrix::DistanceMatrix(Matrix values, DiagonalPolicy policy)
    : values_(std::move(values)), policy_(policy) {
  if (values_.rows() != values_.cols())
    throw Error(ErrorCode::invalid_argument, "distance matrix must be square");
  const double diag = policy_ == DiagonalPolicy::one ? 1.0 : 0.0;
  for (std::size_t i = 0; i < values_.rows(); ++i) values_(i, i) = diag;
}

DistanceMatrix DistanceMatrix::submatrix(const std::vector<int>& indices) const {
  Matrix out(indices.size(), indices.size());
  for (std::size_t a = 0; a < indices.size(); ++a)
    for (std::size_t b = 0; b < indices.size(); ++b) out(a, b) = values_(indices[a], indices[b]);
  return DistanceMatrix(std::move(out), policy_);
}

double distance(const ExplanatoryVector& a, const ExplanatoryVector& b, double likert_range_sum,
                int binary_count) {
  if (!(likert_range_sum > 0.0) || binary_count <= 0)
    throw Error(ErrorCode::degenerate_input, "dissimilarity normalizer is zero (masked schema is degenerate)");
  if (a.likert.size() != b.likert.size() || a.binary.size() != b.binary.size())
    throw Error(ErrorCode::invalid_argument, "explanatory vectors have different shapes");

  double l1 = 0.0;
  for (std::size_t k = 0; k < a.likert.size(); ++k) l1 += std::fabs(a.likert[k] - b.likert[k]);
  int dot = 0;
  for (std::size_t k = 0; k < a.binary.size(); ++k) dot += (a.binary[k] & b.binary[k]);

  const double d = l1 / likert_range_sum - static_cast<double>(dot) / static_cast<double>(binary_count);
  return std::clamp(d, 0.0, 1.0);
}

double distance(const Dataset& dataset, std::size_t i, std::size_t j) {
  return distance(dataset.participant(i).explanatory, dataset.participant(j).explanatory,
                  dataset.active_likert_range_sum(), dataset.active_binary_count());
}

namespace {

void require_non_empty(const Dataset& dataset) {
  if (dataset.empty()) throw Error(ErrorCode::invalid_argument, "distance matrix of an empty dataset");
}

}  // namespace

DistanceMatrix distance_matrix(const Dataset& dataset, DiagonalPolicy policy) {
  require_non_empty(dataset);
  const double range_sum = dataset.active_likert_range_sum();
  const int binary_count = dataset.active_binary_count();
  const auto& ps = dataset.participants();
  const long n = static_cast<long>(ps.size());
  Matrix m(n, n);
  // Probe once so that a degenerate normalizer throws outside the parallel region.
  if (n > 1) (void)distance(ps[0].explanatory, ps[1].explanatory, range_sum, binary_count);

#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) {
    for (long j = i + 1; j < n; ++j) {
      const double d = distance(ps[i].explanatory, ps[j].explanatory, range_sum, binary_count);
      m(i, j) = d;
      m(j, i) = d;
    }
  }
  return DistanceMatrix(std::move(m), policy);
}

DistanceMatrix distance_matrix_serial(const Dataset& dataset, DiagonalPolicy policy) {
  require_non_empty(dataset);
  const double range_sum = dataset.active_likert_range_sum();
  const int binary_count = dataset.active_binary_count();
  const std::size_t n = dataset.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        m(i, j) = distance(dataset.participant(i).explanatory, dataset.participant(j).explanatory,
                           range_sum, binary_count);
  return DistanceMatrix(std::move(m), policy);
}

Matrix cross_distance_matrix(const Dataset& gen, const Dataset& val) {
  if (gen.schema().trait_count() != val.schema().trait_count() ||
      gen.schema().variable_count() != val.schema().variable_count())
    throw Error(ErrorCode::invalid_argument, "generation and validation sets use different schemas");
  const double range_sum = gen.active_likert_range_sum();
  const int binary_count = gen.active_binary_count();
  const long rows = static_cast<long>(gen.size());
  const long cols = static_cast<long>(val.size());
  Matrix m(rows, cols);
  if (rows == 0 || cols == 0) return m;
  (void)distance(gen.participant(0).explanatory, val.participant(0).explanatory, range_sum, binary_count);
#pragma omp parallel for schedule(static)
  for (long p = 0; p < rows; ++p)
    for (long q = 0; q < cols; ++q)
      m(p, q) = distance(gen.participant(p).explanatory, val.participant(q).explanatory, range_sum,
                         binary_count);
  return m;
}

}  // namespace personas
