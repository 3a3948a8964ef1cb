#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "notecoder/csv.hpp"
#include "notecoder/report.hpp"

using namespace notecoder;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  CsvReader r(in);
  std::vector<std::vector<std::string>> rows;
  while (auto row = r.next()) rows.push_back(*row);
  return rows;
}

}  // namespace

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 0.909, 1e-300, -2.5, 0.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("metrics csv") {
  auto good = metrics({true, false, true, true}, {true, false, false, true});
  auto none = metrics({false, false}, {false, false});
  const auto text = metrics_csv({{"train", good}, {"test,odd", none}});
  const auto rows = parse_csv(text);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"split", "n", "tp", "fp", "tn", "fn", "accuracy", "precision", "recall", "f1",
                                            "degenerate"});
  CHECK(rows[1] == std::vector<std::string>{"train", "4", "2", "1", "1", "0", "0.75", "0.6666666666666666", "1", "0.8", ""});
  CHECK(rows[2][0] == "test,odd");
  CHECK(rows[2][10] == "precision;recall;f1");
}

TEST_CASE("cv outputs") {
  CvReport r;
  r.k = 2;
  r.seed = 5;
  for (std::size_t f = 0; f < 2; ++f) {
    FoldResult fr;
    fr.fold = f;
    fr.n_train = 3;
    fr.n_test = 3;
    fr.vocabulary_size = 10 + f;
    fr.evaluation = metrics({true, false, f == 0}, {true, false, true});
    r.folds.push_back(fr);
  }
  const auto rows = parse_csv(cv_csv(r));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].size() == 13);
  CHECK(rows[2][3] == "11");

  auto j = nlohmann::json::parse(cv_summary_json(r, ModelConfig::defaults(ModelKind::adaboost)));
  CHECK(j["protocol"] == "cross-validation");
  CHECK(j["k"] == 2);
  CHECK(j["folds"].size() == 2);
  CHECK(j["model"]["kind"] == "adaboost");
}

TEST_CASE("sweep, grid, features, predictions") {
  const auto sweep = parse_csv(sweep_csv({{1, 0.8, 0.75}, {5, 0.9, 0.8}}));
  CHECK(sweep.size() == 3);
  CHECK(sweep[2] == std::vector<std::string>{"5", "0.9", "0.8"});

  GridResult g;
  g.rows.push_back({ModelConfig::defaults(ModelKind::linear), {}});
  g.rows.push_back({ModelConfig::defaults(ModelKind::tree), {}});
  g.best = 1;
  const auto grid = parse_csv(grid_csv(g));
  REQUIRE(grid.size() == 3);
  CHECK(grid[1][1] == "linear");
  CHECK(grid[2][3] == "none");
  CHECK(grid[2].back() == "1");
  CHECK(grid[1].back() == "0");
  CHECK(nlohmann::json::parse(grid_summary_json(g))["best_index"] == 1);

  const auto feats = parse_csv(features_csv({{"bilirubin", 2.5}, {"heart_attack", -0.25}}));
  CHECK(feats[1] == std::vector<std::string>{"1", "bilirubin", "2.5"});
  CHECK(feats[2] == std::vector<std::string>{"2", "heart_attack", "-0.25"});

  PredictionSet p{{"A1", "A2"}, {true, false}, {{true, 0.9}, {true, 0.6}}};
  const auto preds = parse_csv(predictions_csv(p));
  CHECK(preds[2] == std::vector<std::string>{"A2", "0", "1", "0.6"});
}

TEST_CASE("roc outputs") {
  std::vector<double> s = {0.9, 0.2, 0.5};
  const auto curve = roc(s, {true, false, false});
  const auto one = parse_csv(roc_csv({{"m", curve}}));
  CHECK(one[0] == std::vector<std::string>{"fpr", "tpr", "threshold"});
  CHECK(one[1] == std::vector<std::string>{"0", "0", "inf"});
  CHECK(one.size() == curve.points.size() + 1);
  const auto two = parse_csv(roc_csv({{"a", curve}, {"b", curve}}));
  CHECK(two[0][0] == "model");
  CHECK(two.size() == 2 * curve.points.size() + 1);

  const auto svg = roc_svg({{"a<b", curve}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("a&lt;b") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
}

TEST_CASE("holdout summary") {
  auto e = metrics({true, false}, {true, false});
  auto j = nlohmann::json::parse(holdout_summary_json(e, e, ModelConfig::defaults(ModelKind::bagging), 0.75));
  CHECK(j["protocol"] == "holdout");
  CHECK(j["test_auc"] == 0.75);
  auto k = nlohmann::json::parse(holdout_summary_json(e, e, ModelConfig::defaults(ModelKind::bagging), NAN));
  CHECK(k["test_auc"].is_null());
}
