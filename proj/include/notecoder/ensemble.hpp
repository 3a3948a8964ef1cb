#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "notecoder/tree.hpp"

namespace notecoder {

/// Majority vote over trees; ties go negative.
class BaggedEnsemble {
 public:
  BaggedEnsemble() = default;
  BaggedEnsemble(std::vector<DecisionTree> trees, bool bootstrap, std::uint64_t seed);

  const std::vector<DecisionTree>& trees() const { return trees_; }
  bool bootstrap() const { return bootstrap_; }
  std::uint64_t seed() const { return seed_; }

  Prediction predict(const SparseVector& x) const { return predict_prefix(x, trees_.size()); }
  /// Vote of the first `count` trees (count is clamped to the ensemble size).
  Prediction predict_prefix(const SparseVector& x, std::size_t count) const;

 private:
  std::vector<DecisionTree> trees_;
  bool bootstrap_ = true;
  std::uint64_t seed_ = 0;
};

struct BaggingOptions {
  std::size_t n_estimators = 10;
  bool bootstrap = true;
  std::optional<std::size_t> max_depth;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Tree i is trained on a bootstrap sample drawn from Rng::derive(seed, i),
/// so the result does not depend on the thread count.
BaggedEnsemble fit_bagging(const Dataset& data, const BaggingOptions& options);

/// Bootstrap multiplicities for tree `index` (|data| draws with replacement).
std::vector<double> bootstrap_weights(std::size_t n, std::uint64_t seed, std::size_t index);

/// Weighted vote of boosted trees.
class BoostedEnsemble {
 public:
  struct Stage {
    DecisionTree tree;
    double alpha = 0.0;
  };

  BoostedEnsemble() = default;
  BoostedEnsemble(std::vector<Stage> stages, std::size_t max_stages, std::optional<std::size_t> max_depth);

  const std::vector<Stage>& stages() const { return stages_; }
  std::size_t max_stages() const { return max_stages_; }
  std::optional<std::size_t> max_depth() const { return max_depth_; }

  Prediction predict(const SparseVector& x) const { return predict_prefix(x, stages_.size()); }
  /// Positive iff sum(alpha * +-1) > 0; score = (margin / sum(alpha) + 1) / 2.
  /// An empty prefix predicts negative with score 0.5.
  Prediction predict_prefix(const SparseVector& x, std::size_t count) const;

 private:
  std::vector<Stage> stages_;
  std::size_t max_stages_ = 0;
  std::optional<std::size_t> max_depth_;
};

/// Lower bound applied to the weighted error before computing alpha.
inline constexpr double kBoostingErrorFloor = 1e-10;

struct AdaBoostOptions {
  std::size_t n_estimators = 40;
  std::optional<std::size_t> max_depth = 3;
  std::uint64_t seed = 0;
  /// Called after each reweighting with the stage index and the new weights.
  std::function<void(std::size_t stage, std::span<const double> weights)> on_reweight;
};

/// Discrete AdaBoost with sample reweighting. Stops early when a stage has
/// zero weighted error (kept, with alpha from the floored error) or error
/// >= 0.5 (discarded).
BoostedEnsemble fit_adaboost(const Dataset& data, const AdaBoostOptions& options);

}  // namespace notecoder
