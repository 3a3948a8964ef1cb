#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "notecoder/ensemble.hpp"
#include "notecoder/linear.hpp"
#include "notecoder/tree.hpp"

namespace notecoder {

enum class ModelKind { tree, bagging, adaboost, linear };

std::string_view model_kind_name(ModelKind kind);
/// Accepts "tree", "bagging", "adaboost", "linear". Throws ConfigError otherwise.
ModelKind parse_model_kind(std::string_view name);

/// A trained classifier plus the feature space it was trained on.
class Model {
 public:
  using Variant = std::variant<DecisionTree, BaggedEnsemble, BoostedEnsemble, LinearModel>;

  Model() = default;
  Model(Variant model, std::size_t dimension, std::uint64_t vocabulary_fingerprint);

  ModelKind kind() const { return static_cast<ModelKind>(model_.index()); }
  const Variant& variant() const { return model_; }
  std::size_t dimension() const { return dimension_; }
  std::uint64_t vocabulary_fingerprint() const { return fingerprint_; }

  /// Throws std::invalid_argument on a dimension mismatch.
  Prediction predict(const SparseVector& x) const;

  /// Number of ensemble members (1 for tree and linear models).
  std::size_t size() const;

 private:
  Variant model_;
  std::size_t dimension_ = 0;
  std::uint64_t fingerprint_ = 0;
};

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const Model& model);
/// Throws DataError on malformed documents or an unsupported version.
Model model_from_json(std::string_view text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace notecoder
