#include "notecoder/dataset.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace notecoder {

Dataset::Dataset(std::size_t dimension, std::vector<SparseVector> samples, std::vector<bool> labels)
    : dimension_(dimension) {
  if (samples.size() != labels.size()) throw std::invalid_argument("dataset: sample/label count mismatch");
  samples_.reserve(samples.size());
  labels_.reserve(labels.size());
  for (std::size_t i = 0; i < samples.size(); ++i) add(std::move(samples[i]), labels[i]);
}

void Dataset::add(SparseVector sample, bool label) {
  if (sample.dimension() != dimension_) {
    throw std::invalid_argument("dataset: sample dimension " + std::to_string(sample.dimension()) +
                                " does not match " + std::to_string(dimension_));
  }
  samples_.push_back(std::move(sample));
  labels_.push_back(label);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out(dimension_);
  for (auto i : indices) out.add(samples_.at(i), labels_.at(i));
  return out;
}

std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0);
}

void check_weights(std::span<const double> weights, std::size_t expected_size) {
  if (weights.size() != expected_size) throw std::invalid_argument("weight count does not match dataset size");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("sample weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("sample weights must sum to 1");
}

}  // namespace notecoder
