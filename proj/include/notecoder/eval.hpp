#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace notecoder {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Undefined ratios (zero denominators) are reported as 0 with the matching
/// `*_defined` flag cleared. f1 is defined only when precision and recall are
/// both defined and not both zero.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_defined = false;
  bool recall_defined = false;
  bool f1_defined = false;
};

struct Evaluation {
  ConfusionMatrix confusion;
  Metrics metrics;
};

ConfusionMatrix confusion_matrix(const std::vector<bool>& predicted, const std::vector<bool>& labels);
Metrics metrics_from_confusion(const ConfusionMatrix& cm);

/// Throws std::invalid_argument on empty input or a length mismatch.
Evaluation metrics(const std::vector<bool>& predicted, const std::vector<bool>& labels);

/// Harmonic mean; 0 when precision + recall is 0.
double f1_score(double precision, double recall);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // predicted positive iff score >= threshold; +inf for the origin
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

/// Sweeps the distinct scores from high to low, moving tied samples together,
/// and integrates with the trapezoidal rule. Throws std::invalid_argument on
/// empty input, a length mismatch, non-finite scores or single-class labels.
RocCurve roc(std::span<const double> scores, const std::vector<bool>& labels);

}  // namespace notecoder
