#include "notecoder/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "notecoder/rng.hpp"

namespace notecoder {

LinearModel::LinearModel(std::vector<double> weights, double bias, double c, std::size_t epochs)
    : weights_(std::move(weights)), bias_(bias), c_(c), epochs_(epochs) {
  if (!(c_ > 0.0)) throw std::invalid_argument("linear model: C must be positive");
  for (double w : weights_) {
    if (!std::isfinite(w)) throw std::invalid_argument("linear model: non-finite weight");
  }
  if (!std::isfinite(bias_)) throw std::invalid_argument("linear model: non-finite bias");
}

Prediction LinearModel::predict(const SparseVector& x) const {
  if (x.dimension() != weights_.size()) {
    throw std::invalid_argument("linear model: vector dimension " + std::to_string(x.dimension()) +
                                " does not match " + std::to_string(weights_.size()));
  }
  const double m = margin(x);
  return {m > 0.0, m};
}

// Pegasos without projection. With w_1 = 0 and eta_t = 1/(lambda t) the
// update w_{t+1} = (1 - 1/t) w_t + eta_t g_t telescopes to
// w_{t+1} = G_t / (lambda t), G_t being the running sum of violator vectors
// y x. The mean of w_2..w_{T+1} is then (H_T G_T - sum_s H_{s-1} g_s) / (lambda T)
// with H the harmonic numbers, so both sums can be kept sparse-incrementally.
LinearModel fit_linear(const Dataset& data, const LinearOptions& options) {
  if (data.empty()) throw std::invalid_argument("fit_linear: empty dataset");
  if (!(options.c > 0.0)) throw std::invalid_argument("fit_linear: C must be positive");
  if (options.epochs < 1) throw std::invalid_argument("fit_linear: epochs must be >= 1");

  const std::size_t n = data.size();
  const std::size_t dim = data.dimension();
  const double lambda = 1.0 / (options.c * static_cast<double>(n));

  // slot `dim` is the constant bias feature
  std::vector<double> g_sum(dim + 1, 0.0);
  std::vector<double> h_weighted(dim + 1, 0.0);
  double harmonic = 0.0;  // H_{t-1}

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);

  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    for (auto i : order) {
      ++t;
      const auto& x = data.sample(i);
      const double y = data.label(i) ? 1.0 : -1.0;
      double margin = 0.0;
      if (t > 1) {
        margin = (x.dot(std::span<const double>(g_sum.data(), dim)) + g_sum[dim]) /
                 (lambda * static_cast<double>(t - 1));
      }
      if (y * margin < 1.0) {
        for (const auto& e : x.entries()) {
          g_sum[e.index] += y * e.value;
          h_weighted[e.index] += harmonic * y * e.value;
        }
        g_sum[dim] += y;
        h_weighted[dim] += harmonic * y;
      }
      harmonic += 1.0 / static_cast<double>(t);
    }
  }

  const double denom = lambda * static_cast<double>(t);
  std::vector<double> w(dim);
  for (std::size_t j = 0; j < dim; ++j) w[j] = (harmonic * g_sum[j] - h_weighted[j]) / denom;
  const double b = (harmonic * g_sum[dim] - h_weighted[dim]) / denom;
  return LinearModel(std::move(w), b, options.c, options.epochs);
}

std::vector<std::pair<std::string, double>> feature_importance(const LinearModel& model,
                                                               const std::vector<std::string>& tokens,
                                                               std::size_t top_k) {
  if (tokens.size() != model.dimension()) {
    throw std::invalid_argument("feature_importance: vocabulary size does not match model dimension");
  }
  std::vector<std::size_t> idx(tokens.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto& w = model.weights();
  const auto k = std::min(top_k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (w[a] != w[b]) return w[a] > w[b];
                      return tokens[a] < tokens[b];
                    });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(tokens[idx[i]], w[idx[i]]);
  return out;
}

}  // namespace notecoder
