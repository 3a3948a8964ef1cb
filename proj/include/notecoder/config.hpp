#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "notecoder/experiment.hpp"
#include "notecoder/preprocess.hpp"
#include "notecoder/synthetic.hpp"

namespace notecoder {

/// Everything a CLI run depends on. Serialized as JSON; unknown keys are
/// rejected at every level so typos never silently fall back to defaults.
struct RunConfig {
  std::uint64_t seed = 7;
  std::size_t threads = 0;  // 0: all hardware threads

  PipelineConfig pipeline;
  std::string rules_path;      // empty: built-in seed rules
  std::string stopwords_path;  // empty: built-in list

  FeatureConfig features;
  ModelConfig model = ModelConfig::defaults(ModelKind::bagging);

  std::size_t k = 10;
  double test_fraction = 0.2;

  std::vector<std::size_t> sweep_counts = {1, 2, 5, 10, 20, 40, 60, 80, 100, 150, 200};
  std::vector<ModelConfig> grid;
  std::size_t top_k = 20;

  std::optional<std::vector<std::string>> category_filter;
  SyntheticConfig synthetic;  // its seed always follows `seed`

  std::string input;   // corpus (JSONL) used by commands that read one
  std::string output;  // output directory or file

  void validate() const;
};

/// Parses a (possibly partial) JSON document on top of the defaults. Model
/// fields left out take the defaults of the chosen model kind. Throws
/// ConfigError on syntax errors, wrong types or unknown keys.
RunConfig run_config_from_json(std::string_view text);

/// Fully resolved document; parsing it back gives an equal configuration.
std::string run_config_to_json(const RunConfig& config);

/// Loads rules and stop words (NOTECODER_STOPLIST overrides the stop list
/// path when set) and builds the preprocessing pipeline.
Pipeline make_pipeline(const RunConfig& config);

ExperimentConfig experiment_config(const RunConfig& config);

}  // namespace notecoder
