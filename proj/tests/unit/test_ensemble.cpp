#include <doctest.h>

#include <cmath>
#include <numeric>

#include "notecoder/ensemble.hpp"
#include "notecoder/model.hpp"
#include "notecoder/rng.hpp"

using namespace notecoder;

namespace {

Dataset line_data(const std::vector<double>& xs, const std::vector<bool>& labels) {
  Dataset d(1);
  for (std::size_t i = 0; i < xs.size(); ++i) d.add(SparseVector(1, {{0, xs[i]}}), labels[i]);
  return d;
}

Dataset noisy_data(Rng& rng, std::size_t n, std::size_t dim, double noise) {
  Dataset d(dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<SparseVector::Entry> e;
    double s = 0;
    for (FeatureIndex f = 0; f < dim; ++f) {
      if (rng.bernoulli(0.6)) {
        const double v = rng.uniform();
        e.push_back({f, v});
        s += (f % 2 == 0 ? v : -v);
      }
    }
    d.add(SparseVector(dim, e), (s > 0) != rng.bernoulli(noise));
  }
  return d;
}

DecisionTree constant_tree(bool label) { return DecisionTree({DecisionTree::Node{-1, 0, -1, -1, label, label ? 1.0 : 0.0}}); }

std::string json_of(Model::Variant v, std::size_t dim) { return model_to_json(Model(std::move(v), dim, 0)); }

}  // namespace

TEST_CASE("bagging vote") {
  const SparseVector x(1);
  std::vector<DecisionTree> seven;
  for (int i = 0; i < 10; ++i) seven.push_back(constant_tree(i < 7));
  BaggedEnsemble a(seven, true, 0);
  CHECK(a.predict(x).label);
  CHECK(a.predict(x).score == doctest::Approx(0.7));

  std::vector<DecisionTree> five;
  for (int i = 0; i < 10; ++i) five.push_back(constant_tree(i < 5));
  BaggedEnsemble b(five, true, 0);
  CHECK_FALSE(b.predict(x).label);
  CHECK(b.predict(x).score == 0.5);

  CHECK(a.predict_prefix(x, 3).score == 1.0);
  CHECK(a.predict_prefix(x, 100).score == a.predict(x).score);
  CHECK_THROWS(BaggedEnsemble({}, true, 0));
}

TEST_CASE("boosting vote") {
  const SparseVector x(1);
  BoostedEnsemble e({{constant_tree(true), std::log(2.0)}, {constant_tree(false), std::log(2.0)}}, 40, 1);
  CHECK_FALSE(e.predict(x).label);
  CHECK(e.predict(x).score == doctest::Approx(0.5));
  CHECK(e.predict_prefix(x, 1).label);
  CHECK(e.predict_prefix(x, 1).score == 1.0);
  CHECK_FALSE(e.predict_prefix(x, 0).label);
  CHECK(e.predict_prefix(x, 0).score == 0.5);

  BoostedEnsemble weighted({{constant_tree(true), 3.0}, {constant_tree(false), 1.0}}, 40, 1);
  CHECK(weighted.predict(x).label);
  CHECK(weighted.predict(x).score == doctest::Approx(0.75));

  CHECK_THROWS(BoostedEnsemble({{constant_tree(true), NAN}}, 40, 1));
  CHECK_THROWS(BoostedEnsemble({{constant_tree(true), 1.0}, {constant_tree(true), 1.0}}, 1, 1));
}

TEST_CASE("bootstrap weights") {
  auto w = bootstrap_weights(50, 3, 0);
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == 50.0);
  CHECK(bootstrap_weights(50, 3, 0) == w);
  CHECK(bootstrap_weights(50, 3, 1) != w);
  for (double v : w) CHECK(v == std::floor(v));
}

TEST_CASE("fit_bagging") {
  Rng rng(5);
  auto d = noisy_data(rng, 80, 4, 0.1);

  SUBCASE("one tree without bootstrap is the plain tree") {
    BaggingOptions o;
    o.n_estimators = 1;
    o.bootstrap = false;
    auto bag = fit_bagging(d, o);
    auto tree = fit_tree(d, uniform_weights(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(bag.predict(d.sample(i)).label == tree.predict(d.sample(i)).label);
  }
  SUBCASE("deterministic and thread independent") {
    BaggingOptions o;
    o.n_estimators = 10;
    o.seed = 9;
    const auto a = json_of(fit_bagging(d, o), 4);
    CHECK(json_of(fit_bagging(d, o), 4) == a);
    o.threads = 4;
    CHECK(json_of(fit_bagging(d, o), 4) == a);
    o.seed = 10;
    CHECK(json_of(fit_bagging(d, o), 4) != a);
  }
  SUBCASE("consistent data, no bootstrap: zero training error") {
    auto clean = noisy_data(rng, 60, 4, 0.0);
    for (std::size_t n : {1u, 4u, 7u}) {
      BaggingOptions o;
      o.n_estimators = n;
      o.bootstrap = false;
      auto bag = fit_bagging(clean, o);
      for (std::size_t i = 0; i < clean.size(); ++i) CHECK(bag.predict(clean.sample(i)).label == clean.label(i));
    }
  }
  SUBCASE("scores are vote fractions") {
    BaggingOptions o;
    o.n_estimators = 7;
    auto bag = fit_bagging(d, o);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double s = bag.predict(d.sample(i)).score * 7;
      CHECK(std::abs(s - std::round(s)) < 1e-12);
    }
  }
}

TEST_CASE("fit_adaboost") {
  SUBCASE("stump example: error 1/3, alpha ln 2") {
    auto d = line_data({0, 1, 2}, {false, true, false});
    AdaBoostOptions o;
    o.n_estimators = 1;
    o.max_depth = 1;
    auto e = fit_adaboost(d, o);
    REQUIRE(e.stages().size() == 1);
    CHECK(e.stages()[0].alpha == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("perfect first stage stops") {
    auto d = line_data({0, 1, 2, 3}, {false, false, true, true});
    AdaBoostOptions o;
    o.n_estimators = 40;
    auto e = fit_adaboost(d, o);
    REQUIRE(e.stages().size() == 1);
    CHECK(std::isfinite(e.stages()[0].alpha));
    CHECK(e.stages()[0].alpha == doctest::Approx(std::log((1 - kBoostingErrorFloor) / kBoostingErrorFloor)));
    const auto tree = fit_tree(d, uniform_weights(4), 3);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(e.predict(d.sample(i)).label == tree.predict(d.sample(i)).label);
  }
  SUBCASE("one stage equals the weighted tree") {
    Rng rng(21);
    auto d = noisy_data(rng, 60, 3, 0.2);
    AdaBoostOptions o;
    o.n_estimators = 1;
    o.max_depth = 2;
    auto e = fit_adaboost(d, o);
    const auto tree = fit_tree(d, uniform_weights(d.size()), 2);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(e.predict(d.sample(i)).label == tree.predict(d.sample(i)).label);
  }
  SUBCASE("no useful stage gives an empty ensemble") {
    auto d = line_data({1, 1}, {true, false});
    auto e = fit_adaboost(d, {});
    CHECK(e.stages().empty());
    CHECK_FALSE(e.predict(d.sample(0)).label);
  }
}

TEST_CASE("boosting identity") {
  Rng rng(31);
  for (int t = 0; t < 30; ++t) {
    auto d = noisy_data(rng, 10 + rng.index(40), 1 + rng.index(4), 0.2);
    std::vector<std::vector<double>> after;
    AdaBoostOptions o;
    o.n_estimators = 15;
    o.max_depth = 1;
    o.on_reweight = [&](std::size_t stage, std::span<const double> w) {
      CHECK(stage == after.size());
      after.emplace_back(w.begin(), w.end());
    };
    auto e = fit_adaboost(d, o);
    REQUIRE(after.size() <= e.stages().size());
    for (std::size_t k = 0; k < after.size(); ++k) {
      const auto& w = after[k];
      CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
      double err = 0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (e.stages()[k].tree.predict(d.sample(i)).label != d.label(i)) err += w[i];
      }
      CHECK(std::abs(err - 0.5) < 1e-9);
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double s = e.predict(d.sample(i)).score;
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
  }
}
