#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "notecoder/vectorize.hpp"

namespace notecoder {

/// Labelled sparse samples sharing one dimension.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t dimension) : dimension_(dimension) {}
  /// Throws std::invalid_argument if sizes disagree or a vector has another dimension.
  Dataset(std::size_t dimension, std::vector<SparseVector> samples, std::vector<bool> labels);

  void add(SparseVector sample, bool label);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t dimension() const { return dimension_; }
  const SparseVector& sample(std::size_t i) const { return samples_[i]; }
  bool label(std::size_t i) const { return labels_[i]; }
  const std::vector<SparseVector>& samples() const { return samples_; }
  const std::vector<bool>& labels() const { return labels_; }

  /// Subset in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::size_t dimension_ = 0;
  std::vector<SparseVector> samples_;
  std::vector<bool> labels_;
};

/// Model output for one sample. `score` is a positive-class fraction in [0, 1]
/// for trees and ensembles and the raw margin for the linear model.
struct Prediction {
  bool label = false;
  double score = 0.0;
};

/// Uniform weights summing to 1.
std::vector<double> uniform_weights(std::size_t n);

/// Throws std::invalid_argument unless weights are non-negative and sum to 1 +- 1e-9.
void check_weights(std::span<const double> weights, std::size_t expected_size);

}  // namespace notecoder
