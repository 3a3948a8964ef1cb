#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "notecoder/corpus.hpp"
#include "notecoder/eval.hpp"
#include "notecoder/model.hpp"
#include "notecoder/preprocess.hpp"
#include "notecoder/vectorize.hpp"

namespace notecoder {

struct FeatureConfig {
  std::size_t min_df = 2;
  /// Unit-length TF-IDF rows. Unset: on for the linear model, off for trees,
  /// whose splits do not care about per-document scale.
  std::optional<bool> l2_normalize;

  bool l2_for(ModelKind kind) const { return l2_normalize.value_or(kind == ModelKind::linear); }
};

struct ModelConfig {
  ModelKind kind = ModelKind::bagging;
  std::size_t n_estimators = 10;
  std::optional<std::size_t> max_depth;  // nullopt: grow to purity
  bool bootstrap = true;
  double c = 100.0;
  std::size_t epochs = 300;

  /// Per-kind defaults: bagging 10 unlimited trees, adaboost 40 depth-3
  /// trees, linear C = 100 over 300 epochs.
  static ModelConfig defaults(ModelKind kind);
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

/// Everything fit on training documents only.
struct FittedFeatures {
  CollocationModel collocations;
  Vocabulary vocabulary;
  CorpusStats stats;
  bool l2_normalize = false;

  SparseVector transform(const TokenStream& pre_collocation) const;
};

struct TrainedSystem {
  FittedFeatures features;
  Model model;
};

struct ExperimentConfig {
  FeatureConfig features;
  ModelConfig model;
  std::uint64_t seed = 7;
  std::size_t threads = 1;  // 0: all hardware threads
};

/// Pre-collocation token streams for every noteset. These stages keep no
/// corpus statistics, so the result can be shared across folds.
std::vector<TokenStream> preprocess_corpus(const Pipeline& pipeline, const std::vector<Noteset>& notesets,
                                           std::size_t threads = 1);

FittedFeatures fit_features(const Pipeline& pipeline, const std::vector<TokenStream>& streams,
                            std::span<const std::size_t> train, const FeatureConfig& config, ModelKind kind);

Dataset make_dataset(const FittedFeatures& features, const std::vector<TokenStream>& streams,
                     const std::vector<Noteset>& notesets, std::span<const std::size_t> indices);

Model train_model(const Dataset& data, const ModelConfig& config, std::uint64_t seed, std::size_t threads,
                  std::uint64_t vocabulary_fingerprint);

struct PredictionSet {
  std::vector<std::string> admission_ids;
  std::vector<bool> labels;
  std::vector<Prediction> predictions;

  std::vector<bool> predicted_labels() const;
  std::vector<double> scores() const;
  Evaluation evaluate() const;
};

PredictionSet predict_all(const Model& model, const Dataset& data, const std::vector<Noteset>& notesets,
                          std::span<const std::size_t> indices);

struct HoldoutResult {
  TrainedSystem system;
  PredictionSet train;
  PredictionSet test;
};

HoldoutResult run_holdout(const Pipeline& pipeline, const ExperimentConfig& config, const std::vector<Noteset>& notesets,
                          std::span<const std::size_t> train, std::span<const std::size_t> test);

/// Fit on the given rows (all rows when empty).
TrainedSystem fit_system(const Pipeline& pipeline, const ExperimentConfig& config, const std::vector<Noteset>& notesets,
                         std::span<const std::size_t> train = {});

struct FoldResult {
  std::size_t fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t vocabulary_size = 0;
  Evaluation evaluation;
};

struct CvReport {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  Metrics mean;
  Metrics stddev;  // sample standard deviation across folds
};

/// Folds from split_kfold(notesets, k, seed). Collocations, vocabulary and
/// idf are refit inside every fold from its training part.
CvReport cross_validate(const Pipeline& pipeline, const ExperimentConfig& config, const std::vector<Noteset>& notesets,
                        std::size_t k);

/// Same, reusing pre-computed pre-collocation streams.
CvReport cross_validate(const Pipeline& pipeline, const ExperimentConfig& config, const std::vector<Noteset>& notesets,
                        const std::vector<TokenStream>& streams, std::size_t k);

struct SweepRow {
  std::size_t count = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

/// Trains one ensemble with max(counts) members and scores every prefix.
/// `model.kind` must be bagging or adaboost; counts must be non-empty and
/// strictly increasing.
std::vector<SweepRow> estimator_sweep(const Dataset& train, const Dataset& test, ModelConfig model,
                                      std::span<const std::size_t> counts, std::uint64_t seed, std::size_t threads = 1);

struct GridRow {
  ModelConfig model;
  CvReport cv;
};

struct GridResult {
  std::vector<GridRow> rows;
  std::size_t best = 0;  // highest mean f1, first on ties
};

GridResult grid_search(const Pipeline& pipeline, const ExperimentConfig& config, const std::vector<Noteset>& notesets,
                       const std::vector<ModelConfig>& grid, std::size_t k);

}  // namespace notecoder
