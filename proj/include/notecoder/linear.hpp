#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "notecoder/dataset.hpp"

namespace notecoder {

/// Linear classifier w.x + b; predicts positive iff the margin is > 0.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(std::vector<double> weights, double bias, double c, std::size_t epochs);

  std::size_t dimension() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  double c() const { return c_; }
  std::size_t epochs() const { return epochs_; }

  double margin(const SparseVector& x) const { return x.dot(weights_) + bias_; }
  /// score is the raw margin.
  Prediction predict(const SparseVector& x) const;

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
  double c_ = 100.0;
  std::size_t epochs_ = 0;
};

struct LinearOptions {
  double c = 100.0;
  std::size_t epochs = 300;
  std::uint64_t seed = 0;
};

/// Minimizes 1/2 |w|^2 + C * sum hinge(y (w.x + b)) by stochastic subgradient
/// steps 1/(lambda t), lambda = 1/(C n), over `epochs` seeded shuffles of the
/// data, and returns the average of all iterates. The bias is handled as an
/// extra constant feature and is regularized with the weights.
LinearModel fit_linear(const Dataset& data, const LinearOptions& options);

/// Top-k features by coefficient, descending (ties by token). top_k larger
/// than the dimension returns every feature.
std::vector<std::pair<std::string, double>> feature_importance(const LinearModel& model,
                                                               const std::vector<std::string>& tokens,
                                                               std::size_t top_k);

}  // namespace notecoder
