#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "notecoder/dataset.hpp"

namespace notecoder {

/// 1 - p_neg^2 - p_pos^2 over weight fractions. Throws std::invalid_argument
/// when both totals are zero or either is negative.
double gini(double weight_negative, double weight_positive);

struct Split {
  FeatureIndex feature = 0;
  double threshold = 0.0;  // samples with value <= threshold go left
  double decrease = 0.0;   // parent impurity minus weighted child impurity
};

/// Improvements at or below this count as ties / no improvement.
inline constexpr double kSplitTolerance = 1e-12;

/// Best weighted Gini split over the rows with positive weight.
///
/// Thresholds are midpoints between consecutive distinct values of a feature
/// among those rows, absent sparse entries counting as 0. Scans features in
/// increasing index order and thresholds in increasing order, replacing the
/// incumbent only on an improvement larger than kSplitTolerance, so ties go
/// to the lowest feature and then the lowest threshold. Returns nullopt when
/// no split improves impurity. `rows` empty means all rows.
std::optional<Split> best_split(const Dataset& data, std::span<const double> weights,
                                std::span<const std::size_t> rows = {});

class DecisionTree {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 for leaves
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    bool label = false;              // weighted majority, ties negative
    double positive_fraction = 0.0;  // share of training weight that is positive
  };

  DecisionTree() = default;
  explicit DecisionTree(std::vector<Node> nodes);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

  Prediction predict(const SparseVector& x) const;

 private:
  std::vector<Node> nodes_;
};

/// Recursive Gini splitting until leaves are pure, max_depth is reached, or
/// no split helps. Rows with zero weight are ignored. max_depth 0 gives a
/// single leaf; nullopt grows without limit.
DecisionTree fit_tree(const Dataset& data, std::span<const double> weights,
                      std::optional<std::size_t> max_depth = std::nullopt);

}  // namespace notecoder
