#include "notecoder/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "notecoder/error.hpp"
#include "notecoder/parallel.hpp"

namespace notecoder {

namespace {

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

Metrics mean_of(const std::vector<FoldResult>& folds) {
  Metrics m;
  for (const auto& f : folds) {
    m.accuracy += f.evaluation.metrics.accuracy;
    m.precision += f.evaluation.metrics.precision;
    m.recall += f.evaluation.metrics.recall;
    m.f1 += f.evaluation.metrics.f1;
  }
  const double n = static_cast<double>(folds.size());
  m.accuracy /= n;
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  m.precision_defined = m.recall_defined = m.f1_defined = true;
  for (const auto& f : folds) {
    m.precision_defined = m.precision_defined && f.evaluation.metrics.precision_defined;
    m.recall_defined = m.recall_defined && f.evaluation.metrics.recall_defined;
    m.f1_defined = m.f1_defined && f.evaluation.metrics.f1_defined;
  }
  return m;
}

Metrics stddev_of(const std::vector<FoldResult>& folds, const Metrics& mean) {
  Metrics s;
  if (folds.size() < 2) return s;
  for (const auto& f : folds) {
    const auto& m = f.evaluation.metrics;
    s.accuracy += (m.accuracy - mean.accuracy) * (m.accuracy - mean.accuracy);
    s.precision += (m.precision - mean.precision) * (m.precision - mean.precision);
    s.recall += (m.recall - mean.recall) * (m.recall - mean.recall);
    s.f1 += (m.f1 - mean.f1) * (m.f1 - mean.f1);
  }
  const double d = static_cast<double>(folds.size() - 1);
  s.accuracy = std::sqrt(s.accuracy / d);
  s.precision = std::sqrt(s.precision / d);
  s.recall = std::sqrt(s.recall / d);
  s.f1 = std::sqrt(s.f1 / d);
  s.precision_defined = mean.precision_defined;
  s.recall_defined = mean.recall_defined;
  s.f1_defined = mean.f1_defined;
  return s;
}

}  // namespace

ModelConfig ModelConfig::defaults(ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  switch (kind) {
    case ModelKind::tree: c.n_estimators = 1; break;
    case ModelKind::bagging: c.n_estimators = 10; break;
    case ModelKind::adaboost:
      c.n_estimators = 40;
      c.max_depth = 3;
      break;
    case ModelKind::linear: c.n_estimators = 1; break;
  }
  return c;
}

void ModelConfig::validate() const {
  if (n_estimators < 1) throw ConfigError("model.n_estimators must be >= 1");
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("model.C must be a positive number");
  if (epochs < 1) throw ConfigError("model.epochs must be >= 1");
}

SparseVector FittedFeatures::transform(const TokenStream& pre_collocation) const {
  return tfidf_vector(collocations.apply(pre_collocation), vocabulary, stats, l2_normalize);
}

std::vector<TokenStream> preprocess_corpus(const Pipeline& pipeline, const std::vector<Noteset>& notesets,
                                           std::size_t threads) {
  std::vector<TokenStream> out(notesets.size());
  parallel_for(notesets.size(), threads, [&](std::size_t i) { out[i] = pipeline.pre_collocation(notesets[i].text); });
  return out;
}

FittedFeatures fit_features(const Pipeline& pipeline, const std::vector<TokenStream>& streams,
                            std::span<const std::size_t> train, const FeatureConfig& config, ModelKind kind) {
  std::vector<TokenStream> train_streams;
  train_streams.reserve(train.size());
  for (auto i : train) train_streams.push_back(streams.at(i));

  FittedFeatures f;
  f.l2_normalize = config.l2_for(kind);
  f.collocations = pipeline.fit_collocations(train_streams);
  for (auto& s : train_streams) s = f.collocations.apply(s);
  auto built = build_vocabulary(train_streams, config.min_df);
  f.vocabulary = std::move(built.vocabulary);
  f.stats = std::move(built.stats);
  if (f.vocabulary.size() == 0) {
    throw DataError("no token reaches min_df = " + std::to_string(config.min_df) + " in the training documents");
  }
  return f;
}

Dataset make_dataset(const FittedFeatures& features, const std::vector<TokenStream>& streams,
                     const std::vector<Noteset>& notesets, std::span<const std::size_t> indices) {
  Dataset data(features.vocabulary.size());
  for (auto i : indices) data.add(features.transform(streams.at(i)), notesets.at(i).label);
  return data;
}

Model train_model(const Dataset& data, const ModelConfig& config, std::uint64_t seed, std::size_t threads,
                  std::uint64_t vocabulary_fingerprint) {
  config.validate();
  Model::Variant v;
  switch (config.kind) {
    case ModelKind::tree:
      v = fit_tree(data, uniform_weights(data.size()), config.max_depth);
      break;
    case ModelKind::bagging: {
      BaggingOptions o;
      o.n_estimators = config.n_estimators;
      o.bootstrap = config.bootstrap;
      o.max_depth = config.max_depth;
      o.seed = seed;
      o.threads = threads;
      v = fit_bagging(data, o);
      break;
    }
    case ModelKind::adaboost: {
      AdaBoostOptions o;
      o.n_estimators = config.n_estimators;
      o.max_depth = config.max_depth;
      o.seed = seed;
      v = fit_adaboost(data, o);
      break;
    }
    case ModelKind::linear: {
      LinearOptions o;
      o.c = config.c;
      o.epochs = config.epochs;
      o.seed = seed;
      v = fit_linear(data, o);
      break;
    }
  }
  return Model(std::move(v), data.dimension(), vocabulary_fingerprint);
}

std::vector<bool> PredictionSet::predicted_labels() const {
  std::vector<bool> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions) out.push_back(p.label);
  return out;
}

std::vector<double> PredictionSet::scores() const {
  std::vector<double> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions) out.push_back(p.score);
  return out;
}

Evaluation PredictionSet::evaluate() const { return metrics(predicted_labels(), labels); }

PredictionSet predict_all(const Model& model, const Dataset& data, const std::vector<Noteset>& notesets,
                          std::span<const std::size_t> indices) {
  if (data.size() != indices.size()) throw std::invalid_argument("predict_all: dataset and index list differ in size");
  PredictionSet out;
  for (std::size_t r = 0; r < data.size(); ++r) {
    out.admission_ids.push_back(notesets.at(indices[r]).admission_id);
    out.labels.push_back(data.label(r));
    out.predictions.push_back(model.predict(data.sample(r)));
  }
  return out;
}

TrainedSystem fit_system(const Pipeline& pipeline, const ExperimentConfig& config, const std::vector<Noteset>& notesets,
                         std::span<const std::size_t> train) {
  if (notesets.empty()) throw DataError("no notesets to train on");
  const auto rows = train.empty() ? all_rows(notesets.size()) : std::vector<std::size_t>(train.begin(), train.end());
  const auto streams = preprocess_corpus(pipeline, notesets, config.threads);
  TrainedSystem sys;
  sys.features = fit_features(pipeline, streams, rows, config.features, config.model.kind);
  const auto data = make_dataset(sys.features, streams, notesets, rows);
  sys.model = train_model(data, config.model, config.seed, config.threads, sys.features.vocabulary.fingerprint());
  return sys;
}

HoldoutResult run_holdout(const Pipeline& pipeline, const ExperimentConfig& config, const std::vector<Noteset>& notesets,
                          std::span<const std::size_t> train, std::span<const std::size_t> test) {
  if (train.empty() || test.empty()) throw ConfigError("holdout needs non-empty train and test splits");
  const auto streams = preprocess_corpus(pipeline, notesets, config.threads);
  HoldoutResult r;
  r.system.features = fit_features(pipeline, streams, train, config.features, config.model.kind);
  const auto train_data = make_dataset(r.system.features, streams, notesets, train);
  const auto test_data = make_dataset(r.system.features, streams, notesets, test);
  r.system.model =
      train_model(train_data, config.model, config.seed, config.threads, r.system.features.vocabulary.fingerprint());
  r.train = predict_all(r.system.model, train_data, notesets, train);
  r.test = predict_all(r.system.model, test_data, notesets, test);
  return r;
}

CvReport cross_validate(const Pipeline& pipeline, const ExperimentConfig& config, const std::vector<Noteset>& notesets,
                        std::size_t k) {
  return cross_validate(pipeline, config, notesets, preprocess_corpus(pipeline, notesets, config.threads), k);
}

CvReport cross_validate(const Pipeline& pipeline, const ExperimentConfig& config, const std::vector<Noteset>& notesets,
                        const std::vector<TokenStream>& streams, std::size_t k) {
  if (streams.size() != notesets.size()) throw std::invalid_argument("cross_validate: stream count mismatch");
  const auto plan = split_kfold(notesets, k, config.seed);
  CvReport report;
  report.k = k;
  report.seed = config.seed;
  report.folds.resize(k);
  // Folds run in parallel; each fold's model then trains single-threaded.
  const std::size_t outer = std::min(resolve_threads(config.threads), k);
  const std::size_t inner = outer > 1 ? 1 : config.threads;
  parallel_for(k, outer, [&](std::size_t fold) {
    const auto train = plan.train_indices(notesets, fold);
    const auto test = plan.test_indices(notesets, fold);
    const auto features = fit_features(pipeline, streams, train, config.features, config.model.kind);
    const auto train_data = make_dataset(features, streams, notesets, train);
    const auto test_data = make_dataset(features, streams, notesets, test);
    const auto model = train_model(train_data, config.model, config.seed, inner, features.vocabulary.fingerprint());
    auto& row = report.folds[fold];
    row.fold = fold;
    row.n_train = train.size();
    row.n_test = test.size();
    row.vocabulary_size = features.vocabulary.size();
    row.evaluation = predict_all(model, test_data, notesets, test).evaluate();
  });
  report.mean = mean_of(report.folds);
  report.stddev = stddev_of(report.folds, report.mean);
  return report;
}

std::vector<SweepRow> estimator_sweep(const Dataset& train, const Dataset& test, ModelConfig model,
                                      std::span<const std::size_t> counts, std::uint64_t seed, std::size_t threads) {
  if (model.kind != ModelKind::bagging && model.kind != ModelKind::adaboost) {
    throw ConfigError("estimator sweep needs an ensemble model (bagging or adaboost)");
  }
  if (counts.empty()) throw ConfigError("estimator sweep needs at least one count");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) throw ConfigError("estimator counts must be >= 1");
    if (i > 0 && counts[i] <= counts[i - 1]) throw ConfigError("estimator counts must be strictly increasing");
  }
  model.n_estimators = counts.back();
  const auto trained = train_model(train, model, seed, threads, 0);

  auto prefix_accuracy = [&](const Dataset& data, std::size_t count) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto p = std::visit(
          [&](const auto& m) -> Prediction {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BaggedEnsemble> || std::is_same_v<T, BoostedEnsemble>) {
              return m.predict_prefix(data.sample(i), count);
            } else {
              return m.predict(data.sample(i));
            }
          },
          trained.variant());
      correct += p.label == data.label(i) ? 1 : 0;
    }
    return data.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(data.size());
  };

  std::vector<SweepRow> rows;
  for (auto c : counts) rows.push_back({c, prefix_accuracy(train, c), prefix_accuracy(test, c)});
  return rows;
}

GridResult grid_search(const Pipeline& pipeline, const ExperimentConfig& config, const std::vector<Noteset>& notesets,
                       const std::vector<ModelConfig>& grid, std::size_t k) {
  if (grid.empty()) throw ConfigError("grid search needs at least one grid point");
  for (const auto& g : grid) g.validate();
  const auto streams = preprocess_corpus(pipeline, notesets, config.threads);
  GridResult result;
  for (const auto& point : grid) {
    auto c = config;
    c.model = point;
    result.rows.push_back({point, cross_validate(pipeline, c, notesets, streams, k)});
  }
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].cv.mean.f1 > result.rows[result.best].cv.mean.f1) result.best = i;
  }
  return result;
}

}  // namespace notecoder
