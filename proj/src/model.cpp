#include "notecoder/model.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "notecoder/error.hpp"
#include "notecoder/io.hpp"

namespace notecoder {

namespace {

using Json = nlohmann::ordered_json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw DataError("model: bad vocabulary fingerprint \"" + s + "\"");
  }
  return v;
}

Json depth_json(std::optional<std::size_t> depth) { return depth ? Json(*depth) : Json(nullptr); }

std::optional<std::size_t> depth_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::size_t>();
}

// Column arrays keep large trees compact and easy to diff.
Json tree_json(const DecisionTree& tree) {
  Json feature = Json::array(), threshold = Json::array(), left = Json::array(), right = Json::array(),
       label = Json::array(), fraction = Json::array();
  for (const auto& n : tree.nodes()) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    label.push_back(n.label ? 1 : 0);
    fraction.push_back(n.positive_fraction);
  }
  Json j;
  j["feature"] = std::move(feature);
  j["threshold"] = std::move(threshold);
  j["left"] = std::move(left);
  j["right"] = std::move(right);
  j["label"] = std::move(label);
  j["positive_fraction"] = std::move(fraction);
  return j;
}

DecisionTree tree_from(const Json& j) {
  const auto& feature = j.at("feature");
  const auto n = feature.size();
  for (const char* key : {"threshold", "left", "right", "label", "positive_fraction"}) {
    if (j.at(key).size() != n) throw DataError(std::string("model: tree column \"") + key + "\" has wrong length");
  }
  std::vector<DecisionTree::Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = nodes[i];
    node.feature = feature[i].get<std::int32_t>();
    node.threshold = j["threshold"][i].get<double>();
    node.left = j["left"][i].get<std::int32_t>();
    node.right = j["right"][i].get<std::int32_t>();
    node.label = j["label"][i].get<int>() != 0;
    node.positive_fraction = j["positive_fraction"][i].get<double>();
  }
  return DecisionTree(std::move(nodes));
}

void check_tree_features(const DecisionTree& tree, std::size_t dimension) {
  for (const auto& n : tree.nodes()) {
    if (n.feature >= 0 && static_cast<std::size_t>(n.feature) >= dimension) {
      throw DataError("model: tree feature " + std::to_string(n.feature) + " outside dimension " +
                      std::to_string(dimension));
    }
  }
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::tree: return "tree";
    case ModelKind::bagging: return "bagging";
    case ModelKind::adaboost: return "adaboost";
    case ModelKind::linear: return "linear";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::tree, ModelKind::bagging, ModelKind::adaboost, ModelKind::linear}) {
    if (model_kind_name(k) == name) return k;
  }
  throw ConfigError("unknown model kind \"" + std::string(name) + "\" (expected tree, bagging, adaboost or linear)");
}

Model::Model(Variant model, std::size_t dimension, std::uint64_t vocabulary_fingerprint)
    : model_(std::move(model)), dimension_(dimension), fingerprint_(vocabulary_fingerprint) {
  if (const auto* linear = std::get_if<LinearModel>(&model_); linear && linear->dimension() != dimension_) {
    throw std::invalid_argument("model: linear weights do not match dimension");
  }
}

Prediction Model::predict(const SparseVector& x) const {
  if (x.dimension() != dimension_) {
    throw std::invalid_argument("model expects dimension " + std::to_string(dimension_) + ", got " +
                                std::to_string(x.dimension()));
  }
  return std::visit([&](const auto& m) { return m.predict(x); }, model_);
}

std::size_t Model::size() const {
  return std::visit(Overloaded{[](const BaggedEnsemble& m) { return m.trees().size(); },
                               [](const BoostedEnsemble& m) { return m.stages().size(); },
                               [](const auto&) { return std::size_t{1}; }},
                    model_);
}

std::string model_to_json(const Model& model) {
  Json j;
  j["format"] = "notecoder-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = std::string(model_kind_name(model.kind()));
  j["dimension"] = model.dimension();
  j["vocabulary_fingerprint"] = hex64(model.vocabulary_fingerprint());
  // Features were weighted with ln(N / df); a different base would rescale every idf.
  j["idf_log_base"] = "e";
  std::visit(Overloaded{
                 [&](const DecisionTree& t) {
                   j["hyperparameters"] = Json::object();
                   j["tree"] = tree_json(t);
                 },
                 [&](const BaggedEnsemble& m) {
                   Json hp;
                   hp["n_estimators"] = m.trees().size();
                   hp["bootstrap"] = m.bootstrap();
                   hp["seed"] = m.seed();
                   j["hyperparameters"] = std::move(hp);
                   Json trees = Json::array();
                   for (const auto& t : m.trees()) trees.push_back(tree_json(t));
                   j["trees"] = std::move(trees);
                 },
                 [&](const BoostedEnsemble& m) {
                   Json hp;
                   hp["n_estimators"] = m.max_stages();
                   hp["max_depth"] = depth_json(m.max_depth());
                   j["hyperparameters"] = std::move(hp);
                   Json alphas = Json::array(), trees = Json::array();
                   for (const auto& s : m.stages()) {
                     alphas.push_back(s.alpha);
                     trees.push_back(tree_json(s.tree));
                   }
                   j["alphas"] = std::move(alphas);
                   j["trees"] = std::move(trees);
                 },
                 [&](const LinearModel& m) {
                   Json hp;
                   hp["C"] = m.c();
                   hp["epochs"] = m.epochs();
                   j["hyperparameters"] = std::move(hp);
                   std::vector<SparseVector::Entry> entries;
                   for (std::size_t i = 0; i < m.weights().size(); ++i) {
                     entries.push_back({static_cast<FeatureIndex>(i), m.weights()[i]});
                   }
                   j["weights"] = SparseVector(m.dimension(), std::move(entries)).to_string();
                   j["bias"] = m.bias();
                 }},
             model.variant());
  return j.dump(1) + "\n";
}

Model model_from_json(std::string_view text) {
  try {
    const auto j = Json::parse(text);
    if (j.at("format").get<std::string>() != "notecoder-model") throw DataError("not a notecoder model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError("unsupported model format version " + std::to_string(version));
    }
    const auto kind = parse_model_kind(j.at("kind").get<std::string>());
    const auto dimension = j.at("dimension").get<std::size_t>();
    const auto fingerprint = parse_hex64(j.at("vocabulary_fingerprint").get<std::string>());
    if (j.contains("idf_log_base") && j.at("idf_log_base").get<std::string>() != "e") {
      throw DataError("model expects idf log base " + j.at("idf_log_base").get<std::string>());
    }
    const auto& hp = j.at("hyperparameters");

    Model::Variant v;
    switch (kind) {
      case ModelKind::tree: {
        auto t = tree_from(j.at("tree"));
        check_tree_features(t, dimension);
        v = std::move(t);
        break;
      }
      case ModelKind::bagging: {
        std::vector<DecisionTree> trees;
        for (const auto& t : j.at("trees")) {
          trees.push_back(tree_from(t));
          check_tree_features(trees.back(), dimension);
        }
        v = BaggedEnsemble(std::move(trees), hp.at("bootstrap").get<bool>(), hp.at("seed").get<std::uint64_t>());
        break;
      }
      case ModelKind::adaboost: {
        const auto& alphas = j.at("alphas");
        const auto& trees = j.at("trees");
        if (alphas.size() != trees.size()) throw DataError("model: alphas and trees differ in length");
        std::vector<BoostedEnsemble::Stage> stages;
        for (std::size_t i = 0; i < trees.size(); ++i) {
          stages.push_back({tree_from(trees[i]), alphas[i].get<double>()});
          check_tree_features(stages.back().tree, dimension);
        }
        v = BoostedEnsemble(std::move(stages), hp.at("n_estimators").get<std::size_t>(), depth_from(hp.at("max_depth")));
        break;
      }
      case ModelKind::linear: {
        auto sparse = SparseVector::parse(j.at("weights").get<std::string>(), dimension);
        std::vector<double> w(dimension, 0.0);
        for (const auto& e : sparse.entries()) w[e.index] = e.value;
        v = LinearModel(std::move(w), j.at("bias").get<double>(), hp.at("C").get<double>(),
                        hp.at("epochs").get<std::size_t>());
        break;
      }
    }
    return Model(std::move(v), dimension, fingerprint);
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) { write_text_file(path, model_to_json(model)); }

Model load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_text_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace notecoder
