#include "notecoder/tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace notecoder {

namespace {

struct Entry {
  FeatureIndex feature;
  double value;
  double weight;
  bool label;
};

struct ValueGroup {
  double value;
  double weight_negative;
  double weight_positive;
};

double gini_unchecked(double neg, double pos) {
  const double total = neg + pos;
  const double pn = neg / total;
  const double pp = pos / total;
  return 1.0 - pn * pn - pp * pp;
}

double midpoint(double a, double b) {
  double m = a + (b - a) / 2.0;
  // adjacent doubles: keep the threshold strictly below b
  return m < b ? m : a;
}

struct NodeTotals {
  double negative = 0.0;
  double positive = 0.0;
  std::size_t rows = 0;
};

NodeTotals totals_of(const Dataset& data, std::span<const double> weights, std::span<const std::size_t> rows) {
  NodeTotals t;
  for (auto r : rows) {
    if (weights[r] <= 0.0) continue;
    (data.label(r) ? t.positive : t.negative) += weights[r];
    ++t.rows;
  }
  return t;
}

std::optional<Split> best_split_rows(const Dataset& data, std::span<const double> weights,
                                     std::span<const std::size_t> rows, const NodeTotals& totals) {
  const double total = totals.negative + totals.positive;
  if (total <= 0.0) return std::nullopt;
  const double parent = gini_unchecked(totals.negative, totals.positive);
  if (parent <= 0.0) return std::nullopt;

  std::vector<Entry> entries;
  for (auto r : rows) {
    if (weights[r] <= 0.0) continue;
    for (const auto& e : data.sample(r).entries()) entries.push_back({e.index, e.value, weights[r], data.label(r)});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.feature, a.value) < std::tie(b.feature, b.value);
  });

  std::optional<Split> best;
  double best_decrease = kSplitTolerance;
  std::vector<ValueGroup> groups;

  std::size_t begin = 0;
  while (begin < entries.size()) {
    const auto feature = entries[begin].feature;
    std::size_t end = begin;
    double nz_neg = 0.0;
    double nz_pos = 0.0;
    while (end < entries.size() && entries[end].feature == feature) {
      (entries[end].label ? nz_pos : nz_neg) += entries[end].weight;
      ++end;
    }
    const std::size_t zero_rows = totals.rows - (end - begin);

    // distinct values in ascending order, with the implicit zero block in place
    groups.clear();
    bool zero_placed = zero_rows == 0;
    auto place_zero = [&] {
      groups.push_back({0.0, std::max(0.0, totals.negative - nz_neg), std::max(0.0, totals.positive - nz_pos)});
      zero_placed = true;
    };
    for (std::size_t i = begin; i < end; ++i) {
      const auto& e = entries[i];
      if (!zero_placed && e.value > 0.0) place_zero();
      if (groups.empty() || groups.back().value != e.value) groups.push_back({e.value, 0.0, 0.0});
      (e.label ? groups.back().weight_positive : groups.back().weight_negative) += e.weight;
    }
    if (!zero_placed) place_zero();

    double left_neg = 0.0;
    double left_pos = 0.0;
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
      left_neg += groups[g].weight_negative;
      left_pos += groups[g].weight_positive;
      const double left = left_neg + left_pos;
      const double right_neg = totals.negative - left_neg;
      const double right_pos = totals.positive - left_pos;
      const double right = total - left;
      if (left <= 0.0 || right <= 0.0) continue;
      const double decrease = parent - (left / total) * gini_unchecked(left_neg, left_pos) -
                              (right / total) * gini_unchecked(right_neg, right_pos);
      if (decrease > best_decrease + (best ? kSplitTolerance : 0.0)) {
        best_decrease = decrease;
        best = Split{feature, midpoint(groups[g].value, groups[g + 1].value), decrease};
      }
    }
    begin = end;
  }
  return best;
}

}  // namespace

double gini(double weight_negative, double weight_positive) {
  if (weight_negative < 0.0 || weight_positive < 0.0) throw std::invalid_argument("gini: negative weight");
  if (weight_negative + weight_positive <= 0.0) throw std::invalid_argument("gini: both class weights are zero");
  return gini_unchecked(weight_negative, weight_positive);
}

std::optional<Split> best_split(const Dataset& data, std::span<const double> weights,
                                std::span<const std::size_t> rows) {
  if (weights.size() != data.size()) throw std::invalid_argument("best_split: weight count mismatch");
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(data.size());
    std::iota(all.begin(), all.end(), 0);
    rows = all;
  }
  return best_split_rows(data, weights, rows, totals_of(data, weights, rows));
}

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("decision tree needs at least one node");
  const auto n = static_cast<std::int32_t>(nodes_.size());
  for (const auto& node : nodes_) {
    if (node.feature >= 0 && (node.left <= 0 || node.right <= 0 || node.left >= n || node.right >= n)) {
      throw std::invalid_argument("decision tree node has invalid children");
    }
    if (!(node.positive_fraction >= 0.0 && node.positive_fraction <= 1.0)) {
      throw std::invalid_argument("decision tree leaf fraction outside [0, 1]");
    }
  }
}

std::size_t DecisionTree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    if (node.feature >= 0) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

Prediction DecisionTree::predict(const SparseVector& x) const {
  std::size_t id = 0;
  while (nodes_[id].feature >= 0) {
    const auto& node = nodes_[id];
    id = static_cast<std::size_t>(x.at(static_cast<FeatureIndex>(node.feature)) <= node.threshold ? node.left
                                                                                                   : node.right);
  }
  return {nodes_[id].label, nodes_[id].positive_fraction};
}

DecisionTree fit_tree(const Dataset& data, std::span<const double> weights, std::optional<std::size_t> max_depth) {
  if (data.empty()) throw std::invalid_argument("fit_tree: empty dataset");
  if (weights.size() != data.size()) throw std::invalid_argument("fit_tree: weight count mismatch");

  struct Pending {
    std::size_t node;
    std::vector<std::size_t> rows;
    std::size_t depth;
  };

  std::vector<DecisionTree::Node> nodes(1);
  std::vector<std::size_t> root_rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (weights[i] > 0.0) root_rows.push_back(i);
  }
  std::vector<Pending> stack;
  stack.push_back({0, std::move(root_rows), 0});

  while (!stack.empty()) {
    auto item = std::move(stack.back());
    stack.pop_back();
    const auto totals = totals_of(data, weights, item.rows);
    auto& node = nodes[item.node];
    const double total = totals.negative + totals.positive;
    node.positive_fraction = total > 0.0 ? totals.positive / total : 0.0;
    node.label = totals.positive > totals.negative;

    const bool pure = totals.negative <= 0.0 || totals.positive <= 0.0;
    const bool depth_reached = max_depth && item.depth >= *max_depth;
    if (pure || depth_reached) continue;
    auto split = best_split_rows(data, weights, item.rows, totals);
    if (!split) continue;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (auto r : item.rows) {
      (data.sample(r).at(split->feature) <= split->threshold ? left_rows : right_rows).push_back(r);
    }
    const auto left_id = nodes.size();
    nodes.resize(nodes.size() + 2);
    auto& parent = nodes[item.node];
    parent.feature = static_cast<std::int32_t>(split->feature);
    parent.threshold = split->threshold;
    parent.left = static_cast<std::int32_t>(left_id);
    parent.right = static_cast<std::int32_t>(left_id + 1);
    stack.push_back({left_id + 1, std::move(right_rows), item.depth + 1});
    stack.push_back({left_id, std::move(left_rows), item.depth + 1});
  }
  return DecisionTree(std::move(nodes));
}

}  // namespace notecoder
