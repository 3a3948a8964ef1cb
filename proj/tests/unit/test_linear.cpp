#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "notecoder/linear.hpp"
#include "notecoder/rng.hpp"

using namespace notecoder;

namespace {

Dataset line_data(const std::vector<double>& xs, const std::vector<bool>& labels) {
  Dataset d(1);
  for (std::size_t i = 0; i < xs.size(); ++i) d.add(SparseVector(1, {{0, xs[i]}}), labels[i]);
  return d;
}

// Textbook Pegasos on dense vectors: explicit iterates, explicit average.
std::vector<double> naive_pegasos(const Dataset& d, double c, std::size_t epochs, std::uint64_t seed) {
  const std::size_t dim = d.dimension();
  const double lambda = 1.0 / (c * static_cast<double>(d.size()));
  std::vector<double> w(dim + 1, 0.0), avg(dim + 1, 0.0);
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::size_t t = 0;
  for (std::size_t e = 0; e < epochs; ++e) {
    rng.shuffle(order);
    for (auto i : order) {
      ++t;
      std::vector<double> x(dim + 1, 0.0);
      for (const auto& en : d.sample(i).entries()) x[en.index] = en.value;
      x[dim] = 1.0;
      const double y = d.label(i) ? 1.0 : -1.0;
      const double m = std::inner_product(w.begin(), w.end(), x.begin(), 0.0);
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      for (std::size_t j = 0; j <= dim; ++j) {
        w[j] *= 1.0 - 1.0 / static_cast<double>(t);
        if (y * m < 1.0) w[j] += eta * y * x[j];
      }
      for (std::size_t j = 0; j <= dim; ++j) avg[j] += w[j];
    }
  }
  for (auto& v : avg) v /= static_cast<double>(t);
  return avg;
}

}  // namespace

TEST_CASE("two points in 1-D") {
  auto d = line_data({1.0, -1.0}, {true, false});
  auto m = fit_linear(d, {});
  CHECK(m.weights()[0] > 0);
  CHECK(m.predict(d.sample(0)).label);
  CHECK_FALSE(m.predict(d.sample(1)).label);
}

TEST_CASE("repeated positive point") {
  auto d = line_data({0.7, 0.7, 0.7}, {true, true, true});
  auto m = fit_linear(d, {});
  CHECK(m.predict(d.sample(0)).label);
}

TEST_CASE("deterministic per seed") {
  Rng rng(3);
  Dataset d(5);
  for (int i = 0; i < 40; ++i) {
    d.add(SparseVector(5, {{static_cast<FeatureIndex>(rng.index(5)), rng.uniform()}}), rng.bernoulli(0.5));
  }
  LinearOptions o;
  o.epochs = 20;
  o.seed = 4;
  auto a = fit_linear(d, o);
  auto b = fit_linear(d, o);
  CHECK(a.weights() == b.weights());
  CHECK(a.bias() == b.bias());
}

TEST_CASE("closed form matches explicit iterates") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t dim = 1 + rng.index(6);
    Dataset d(dim);
    for (std::size_t i = 0, n = 5 + rng.index(30); i < n; ++i) {
      std::vector<SparseVector::Entry> e;
      for (FeatureIndex f = 0; f < dim; ++f) {
        if (rng.bernoulli(0.5)) e.push_back({f, rng.uniform() - 0.3});
      }
      d.add(SparseVector(dim, e), rng.bernoulli(0.5));
    }
    LinearOptions o;
    o.c = trial % 2 == 0 ? 100.0 : 0.5;
    o.epochs = 1 + rng.index(15);
    o.seed = static_cast<std::uint64_t>(trial);
    const auto m = fit_linear(d, o);
    const auto want = naive_pegasos(d, o.c, o.epochs, o.seed);
    for (std::size_t j = 0; j < dim; ++j) {
      CHECK(m.weights()[j] == doctest::Approx(want[j]).epsilon(1e-9).scale(1.0));
    }
    CHECK(m.bias() == doctest::Approx(want[dim]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("margin sign is the label, zero is negative") {
  LinearModel m({1.0, -1.0}, 0.0, 1.0, 1);
  CHECK_FALSE(m.predict(SparseVector(2, {{0, 1.0}, {1, 1.0}})).label);
  CHECK(m.predict(SparseVector(2, {{0, 2.0}})).label);
  CHECK(m.predict(SparseVector(2, {{0, 2.0}})).score == 2.0);
  CHECK_THROWS_AS(m.predict(SparseVector(3)), std::invalid_argument);
}

TEST_CASE("feature_importance") {
  LinearModel m({2.0, -1.0, 0.5}, 0.0, 100.0, 1);
  const std::vector<std::string> tokens = {"a", "b", "c"};
  auto top2 = feature_importance(m, tokens, 2);
  REQUIRE(top2.size() == 2);
  CHECK(top2[0] == std::pair<std::string, double>{"a", 2.0});
  CHECK(top2[1] == std::pair<std::string, double>{"c", 0.5});
  CHECK(feature_importance(m, tokens, 0).empty());
  auto all = feature_importance(m, tokens, 10);
  CHECK(all.size() == 3);
  CHECK(all[2].first == "b");
  CHECK(all[2].second == -1.0);

  LinearModel tie({1.0, 1.0}, 0.0, 1.0, 1);
  CHECK(feature_importance(tie, {"z", "y"}, 1)[0].first == "y");
  CHECK_THROWS(feature_importance(m, {"a"}, 1));
}
