#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "notecoder/config.hpp"
#include "notecoder/error.hpp"
#include "notecoder/io.hpp"

using namespace notecoder;

TEST_CASE("defaults") {
  auto c = run_config_from_json("{}");
  CHECK(c.seed == 7);
  CHECK(c.model.kind == ModelKind::bagging);
  CHECK(c.model.n_estimators == 10);
  CHECK(c.k == 10);
  CHECK(c.pipeline.negation_window == 3);
  CHECK(c.pipeline.npmi_threshold == 0.5);
  CHECK(c.features.min_df == 2);
  CHECK_FALSE(c.category_filter);
}

TEST_CASE("unknown keys are rejected at every level") {
  for (const char* doc : {R"({"sed": 1})", R"({"pipeline": {"window": 2}})", R"({"model": {"trees": 5}})",
                          R"({"split": {"folds": 5}})", R"({"grid": [{"kind": "linear", "c": 1}]})",
                          R"({"synthetic": {"noise": 0.1}})", R"({"features": {"l2": true}})"}) {
    CHECK_THROWS_AS(run_config_from_json(doc), ConfigError);
  }
  try {
    run_config_from_json(R"({"model": {"trees": 5}})");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("n_estimators") != std::string::npos);
  }
}

TEST_CASE("bad values") {
  CHECK_THROWS_AS(run_config_from_json("{"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(R"({"seed": "x"})"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(R"({"split": {"k": 1}})"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(R"({"model": {"kind": "svm"}})"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(R"({"sweep": {"counts": [5, 5]}})"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(R"({"model": {"max_depth": -1}})"), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(R"({"synthetic": {"label_noise_rate": 2}})"), ConfigError);
}

TEST_CASE("model kind switches defaults") {
  auto c = run_config_from_json(R"({"model": {"kind": "adaboost"}})");
  CHECK(c.model.n_estimators == 40);
  CHECK(c.model.max_depth == 3u);
  c = run_config_from_json(R"({"model": {"kind": "adaboost", "max_depth": null, "n_estimators": 7}})");
  CHECK_FALSE(c.model.max_depth);
  CHECK(c.model.n_estimators == 7);
  c = run_config_from_json(R"({"model": {"kind": "linear", "C": 0.5}, "grid": [{"C": 1}, {"kind": "tree"}]})");
  REQUIRE(c.grid.size() == 2);
  CHECK(c.grid[0].kind == ModelKind::linear);
  CHECK(c.grid[0].c == 1);
  CHECK(c.grid[1].kind == ModelKind::tree);
}

TEST_CASE("round trip") {
  auto c = run_config_from_json(R"({
    "seed": 99, "threads": 2, "input": "in.jsonl", "output": "out",
    "pipeline": {"negation_window": 2, "stem": false, "negation_cues": ["no", "never"]},
    "features": {"min_df": 1, "l2_normalize": false},
    "model": {"kind": "adaboost", "n_estimators": 12, "max_depth": 2},
    "split": {"k": 5, "test_fraction": 0.3},
    "sweep": {"counts": [1, 4, 9]},
    "grid": [{"kind": "linear", "C": 10}],
    "importance": {"top_k": 3},
    "data": {"category_filter": ["Discharge summary"]},
    "synthetic": {"n_positive": 10, "negation_rate": 0.5}
  })");
  const auto text = run_config_to_json(c);
  const auto back = run_config_from_json(text);
  CHECK(run_config_to_json(back) == text);
  CHECK(back.seed == 99);
  CHECK(back.synthetic.seed == 99);
  CHECK(back.pipeline.negation_cues == std::vector<std::string>{"no", "never"});
  CHECK(back.features.l2_normalize == false);
  CHECK(back.model.max_depth == 2u);
  CHECK(back.grid.size() == 1);
  CHECK(back.category_filter == std::vector<std::string>{"Discharge summary"});
  CHECK(back.synthetic.n_positive == 10);
}

TEST_CASE("stop list override from the environment") {
  const auto path = std::filesystem::temp_directory_path() / "notecoder_stop_test.txt";
  write_text_file(path, "# custom\nbili\n");
  RunConfig c;
  ::setenv("NOTECODER_STOPLIST", path.c_str(), 1);
  auto p = make_pipeline(c);
  ::unsetenv("NOTECODER_STOPLIST");
  CHECK(p.stop_set().count("bili"));
  CHECK_FALSE(p.stop_set().count("the"));
  CHECK(make_pipeline(c).stop_set().count("the"));
  std::filesystem::remove(path);
}
