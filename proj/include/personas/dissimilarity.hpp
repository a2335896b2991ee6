#pragma once

#include <cstddef>
#include <vector>

#include "personas/feature_model.hpp"

namespace personas {

enum class DiagonalPolicy { zero, one };

// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// Symmetric n x n dissimilarities with a fixed diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(Matrix values, DiagonalPolicy policy);

  std::size_t size() const { return values_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Matrix& matrix() const { return values_; }
  DiagonalPolicy diagonal_policy() const { return policy_; }

  // Principal submatrix over `indices` (in the given order).
  DistanceMatrix submatrix(const std::vector<int>& indices) const;

  bool operator==(const DistanceMatrix&) const = default;

 private:
  Matrix values_;
  DiagonalPolicy policy_ = DiagonalPolicy::zero;
};

// max(0, L1(a.likert, b.likert) / likert_range_sum - (a.binary . b.binary) / binary_count).
// Throws Error(degenerate_input) when a normalizer is not positive.
double distance(const ExplanatoryVector& a, const ExplanatoryVector& b, double likert_range_sum,
                int binary_count);

double distance(const Dataset& dataset, std::size_t i, std::size_t j);

// OpenMP over rows; each entry is computed independently, so the result is
// bitwise identical for any thread count.
DistanceMatrix distance_matrix(const Dataset& dataset, DiagonalPolicy policy = DiagonalPolicy::zero);
// Reference implementation kept for testing and benchmarks.
DistanceMatrix distance_matrix_serial(const Dataset& dataset,
                                      DiagonalPolicy policy = DiagonalPolicy::zero);

// |gen| x |val| distances, no diagonal handling. Normalizers come from `gen`.
Matrix cross_distance_matrix(const Dataset& gen, const Dataset& val);

}  // namespace personas
