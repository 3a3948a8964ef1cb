#include "notecoder/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace notecoder {

ConfusionMatrix confusion_matrix(const std::vector<bool>& predicted, const std::vector<bool>& labels) {
  if (predicted.size() != labels.size()) throw std::invalid_argument("metrics: predictions and labels differ in length");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predicted[i]) {
      ++(labels[i] ? cm.tp : cm.fp);
    } else {
      ++(labels[i] ? cm.fn : cm.tn);
    }
  }
  return cm;
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

Metrics metrics_from_confusion(const ConfusionMatrix& cm) {
  Metrics m;
  const auto total = cm.total();
  if (total == 0) throw std::invalid_argument("metrics: empty confusion matrix");
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
  if (cm.tp + cm.fp > 0) {
    m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    m.precision_defined = true;
  }
  if (cm.tp + cm.fn > 0) {
    m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    m.recall_defined = true;
  }
  if (m.precision_defined && m.recall_defined && m.precision + m.recall > 0.0) {
    m.f1 = f1_score(m.precision, m.recall);
    m.f1_defined = true;
  }
  return m;
}

Evaluation metrics(const std::vector<bool>& predicted, const std::vector<bool>& labels) {
  if (labels.empty()) throw std::invalid_argument("metrics: no samples");
  auto cm = confusion_matrix(predicted, labels);
  return {cm, metrics_from_confusion(cm)};
}

RocCurve roc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.empty()) throw std::invalid_argument("roc: no samples");
  if (scores.size() != labels.size()) throw std::invalid_argument("roc: scores and labels differ in length");
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw std::invalid_argument("roc: non-finite score");
    positives += labels[i] ? 1 : 0;
  }
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw std::invalid_argument("roc: labels must contain both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  const double p = static_cast<double>(positives);
  const double n = static_cast<double>(negatives);
  // trapezoids summed on raw counts, scaled once at the end
  std::size_t tp = 0, fp = 0;
  double area = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    const std::size_t tp0 = tp, fp0 = fp;
    for (; i < order.size() && scores[order[i]] == threshold; ++i) ++(labels[order[i]] ? tp : fp);
    area += static_cast<double>(fp - fp0) * static_cast<double>(tp0 + tp);
    curve.points.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p, threshold});
  }
  curve.auc = area / (2.0 * p * n);
  return curve;
}

}  // namespace notecoder
