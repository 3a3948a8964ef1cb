#include "notecoder/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "notecoder/parallel.hpp"
#include "notecoder/rng.hpp"

namespace notecoder {

BaggedEnsemble::BaggedEnsemble(std::vector<DecisionTree> trees, bool bootstrap, std::uint64_t seed)
    : trees_(std::move(trees)), bootstrap_(bootstrap), seed_(seed) {
  if (trees_.empty()) throw std::invalid_argument("bagged ensemble needs at least one tree");
}

Prediction BaggedEnsemble::predict_prefix(const SparseVector& x, std::size_t count) const {
  count = std::min(count, trees_.size());
  if (count == 0) return {false, 0.0};
  std::size_t votes = 0;
  for (std::size_t i = 0; i < count; ++i) votes += trees_[i].predict(x).label ? 1 : 0;
  return {2 * votes > count, static_cast<double>(votes) / static_cast<double>(count)};
}

std::vector<double> bootstrap_weights(std::size_t n, std::uint64_t seed, std::size_t index) {
  auto rng = Rng::derive(seed, index);
  std::vector<double> w(n, 0.0);
  for (std::size_t draw = 0; draw < n; ++draw) w[rng.index(n)] += 1.0;
  return w;
}

BaggedEnsemble fit_bagging(const Dataset& data, const BaggingOptions& options) {
  if (options.n_estimators < 1) throw std::invalid_argument("bagging needs n_estimators >= 1");
  if (data.empty()) throw std::invalid_argument("bagging: empty dataset");
  std::vector<DecisionTree> trees(options.n_estimators);
  parallel_for(options.n_estimators, options.threads, [&](std::size_t i) {
    auto weights = options.bootstrap ? bootstrap_weights(data.size(), options.seed, i)
                                     : std::vector<double>(data.size(), 1.0);
    trees[i] = fit_tree(data, weights, options.max_depth);
  });
  return BaggedEnsemble(std::move(trees), options.bootstrap, options.seed);
}

BoostedEnsemble::BoostedEnsemble(std::vector<Stage> stages, std::size_t max_stages,
                                 std::optional<std::size_t> max_depth)
    : stages_(std::move(stages)), max_stages_(max_stages), max_depth_(max_depth) {
  for (const auto& s : stages_) {
    if (!std::isfinite(s.alpha)) throw std::invalid_argument("boosting stage weight must be finite");
  }
  if (stages_.size() > max_stages_) throw std::invalid_argument("more boosting stages than max_stages");
}

Prediction BoostedEnsemble::predict_prefix(const SparseVector& x, std::size_t count) const {
  count = std::min(count, stages_.size());
  double margin = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& s = stages_[i];
    margin += s.tree.predict(x).label ? s.alpha : -s.alpha;
    total += s.alpha;
  }
  if (total <= 0.0) return {false, 0.5};
  return {margin > 0.0, std::clamp((margin / total + 1.0) / 2.0, 0.0, 1.0)};
}

BoostedEnsemble fit_adaboost(const Dataset& data, const AdaBoostOptions& options) {
  if (options.n_estimators < 1) throw std::invalid_argument("adaboost needs n_estimators >= 1");
  if (data.empty()) throw std::invalid_argument("adaboost: empty dataset");

  const std::size_t n = data.size();
  auto weights = uniform_weights(n);
  std::vector<BoostedEnsemble::Stage> stages;
  std::vector<bool> wrong(n);

  for (std::size_t k = 0; k < options.n_estimators; ++k) {
    auto tree = fit_tree(data, weights, options.max_depth);
    double error = 0.0;
    std::size_t n_wrong = 0;
    for (std::size_t i = 0; i < n; ++i) {
      wrong[i] = tree.predict(data.sample(i)).label != data.label(i);
      if (wrong[i]) {
        error += weights[i];
        ++n_wrong;
      }
    }
    if (n_wrong > 0 && error >= 0.5) break;

    const double floored = std::max(error, kBoostingErrorFloor);
    const double alpha = std::log((1.0 - floored) / floored);
    stages.push_back({std::move(tree), alpha});
    if (n_wrong == 0) break;

    const double boost = std::exp(alpha);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (wrong[i]) weights[i] *= boost;
      sum += weights[i];
    }
    for (auto& w : weights) w /= sum;
    if (options.on_reweight) options.on_reweight(k, weights);
  }
  return BoostedEnsemble(std::move(stages), options.n_estimators, options.max_depth);
}

}  // namespace notecoder
