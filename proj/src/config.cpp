#include "notecoder/config.hpp"

#include <cstdlib>
#include <set>

#include <nlohmann/json.hpp>

#include "notecoder/error.hpp"

namespace notecoder {

namespace {

using Json = nlohmann::ordered_json;

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) {
      std::string list;
      for (const auto& a : ok) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError("unknown key \"" + key + "\" in " + where + " (allowed: " + list + ")");
    }
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

void read_depth(const Json& j, std::optional<std::size_t>& out, const std::string& where) {
  if (!j.contains("max_depth")) return;
  const auto& v = j.at("max_depth");
  if (v.is_null()) {
    out.reset();
  } else if (v.is_number_unsigned()) {
    out = v.get<std::size_t>();
  } else {
    throw ConfigError(where + ".max_depth must be a non-negative integer or null");
  }
}

ModelConfig parse_model(const Json& j, const std::string& where, const ModelConfig& base) {
  check_keys(j, where, {"kind", "n_estimators", "max_depth", "bootstrap", "C", "epochs"});
  ModelConfig m = base;
  if (j.contains("kind")) {
    std::string kind;
    read(j, "kind", kind, where);
    const auto k = parse_model_kind(kind);
    if (k != base.kind) m = ModelConfig::defaults(k);
  }
  read(j, "n_estimators", m.n_estimators, where);
  read_depth(j, m.max_depth, where);
  read(j, "bootstrap", m.bootstrap, where);
  read(j, "C", m.c, where);
  read(j, "epochs", m.epochs, where);
  m.validate();
  return m;
}

Json model_to(const ModelConfig& m) {
  Json j;
  j["kind"] = std::string(model_kind_name(m.kind));
  j["n_estimators"] = m.n_estimators;
  j["max_depth"] = m.max_depth ? Json(*m.max_depth) : Json(nullptr);
  j["bootstrap"] = m.bootstrap;
  j["C"] = m.c;
  j["epochs"] = m.epochs;
  return j;
}

}  // namespace

void RunConfig::validate() const {
  pipeline.validate();
  model.validate();
  for (const auto& g : grid) g.validate();
  synthetic.validate();
  if (k < 2) throw ConfigError("split.k must be >= 2");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("split.test_fraction must lie in (0, 1)");
  if (features.min_df < 1) throw ConfigError("features.min_df must be >= 1");
  for (std::size_t i = 0; i < sweep_counts.size(); ++i) {
    if (sweep_counts[i] == 0 || (i > 0 && sweep_counts[i] <= sweep_counts[i - 1])) {
      throw ConfigError("sweep.counts must be positive and strictly increasing");
    }
  }
}

RunConfig run_config_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  check_keys(j, "config", {"seed", "threads", "input", "output", "pipeline", "features", "model", "split", "sweep",
                           "grid", "importance", "data", "synthetic"});
  read(j, "seed", c.seed, "config");
  read(j, "threads", c.threads, "config");
  read(j, "input", c.input, "config");
  read(j, "output", c.output, "config");

  if (j.contains("pipeline")) {
    const auto& p = j["pipeline"];
    const std::string w = "pipeline";
    check_keys(p, w, {"clean", "lowercase", "semantic_map", "stem", "negation", "stop_words", "collocations",
                      "negation_window", "negation_cues", "npmi_threshold", "min_pair_count", "collocation_passes",
                      "deid_regex", "rules_path", "stopwords_path"});
    auto& pc = c.pipeline;
    read(p, "clean", pc.clean, w);
    read(p, "lowercase", pc.lowercase, w);
    read(p, "semantic_map", pc.semantic_map, w);
    read(p, "stem", pc.stem, w);
    read(p, "negation", pc.negation, w);
    read(p, "stop_words", pc.stop_words, w);
    read(p, "collocations", pc.collocations, w);
    read(p, "negation_window", pc.negation_window, w);
    read(p, "negation_cues", pc.negation_cues, w);
    read(p, "npmi_threshold", pc.npmi_threshold, w);
    read(p, "min_pair_count", pc.min_pair_count, w);
    read(p, "collocation_passes", pc.collocation_passes, w);
    read(p, "deid_regex", pc.deid_regex, w);
    read(p, "rules_path", c.rules_path, w);
    read(p, "stopwords_path", c.stopwords_path, w);
  }
  if (j.contains("features")) {
    const auto& f = j["features"];
    check_keys(f, "features", {"min_df", "l2_normalize"});
    read(f, "min_df", c.features.min_df, "features");
    if (f.contains("l2_normalize")) {
      if (f["l2_normalize"].is_null()) {
        c.features.l2_normalize.reset();
      } else {
        bool v = false;
        read(f, "l2_normalize", v, "features");
        c.features.l2_normalize = v;
      }
    }
  }
  if (j.contains("model")) c.model = parse_model(j["model"], "model", c.model);
  if (j.contains("split")) {
    const auto& s = j["split"];
    check_keys(s, "split", {"k", "test_fraction"});
    read(s, "k", c.k, "split");
    read(s, "test_fraction", c.test_fraction, "split");
  }
  if (j.contains("sweep")) {
    check_keys(j["sweep"], "sweep", {"counts"});
    read(j["sweep"], "counts", c.sweep_counts, "sweep");
  }
  if (j.contains("grid")) {
    if (!j["grid"].is_array()) throw ConfigError("grid must be an array of model objects");
    for (std::size_t i = 0; i < j["grid"].size(); ++i) {
      c.grid.push_back(parse_model(j["grid"][i], "grid[" + std::to_string(i) + "]", c.model));
    }
  }
  if (j.contains("importance")) {
    check_keys(j["importance"], "importance", {"top_k"});
    read(j["importance"], "top_k", c.top_k, "importance");
  }
  if (j.contains("data")) {
    const auto& d = j["data"];
    check_keys(d, "data", {"category_filter"});
    if (d.contains("category_filter") && !d["category_filter"].is_null()) {
      std::vector<std::string> cats;
      read(d, "category_filter", cats, "data");
      c.category_filter = std::move(cats);
    }
  }
  if (j.contains("synthetic")) {
    const auto& s = j["synthetic"];
    const std::string w = "synthetic";
    check_keys(s, w, {"n_positive", "n_negative", "signal_terms", "distractor_terms", "negation_rate",
                      "label_noise_rate", "mean_doc_length", "positive_signal_mentions", "negative_signal_mentions"});
    auto& sc = c.synthetic;
    read(s, "n_positive", sc.n_positive, w);
    read(s, "n_negative", sc.n_negative, w);
    read(s, "signal_terms", sc.signal_terms, w);
    read(s, "distractor_terms", sc.distractor_terms, w);
    read(s, "negation_rate", sc.negation_rate, w);
    read(s, "label_noise_rate", sc.label_noise_rate, w);
    read(s, "mean_doc_length", sc.mean_doc_length, w);
    read(s, "positive_signal_mentions", sc.positive_signal_mentions, w);
    read(s, "negative_signal_mentions", sc.negative_signal_mentions, w);
  }
  c.synthetic.seed = c.seed;
  c.validate();
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["input"] = c.input;
  j["output"] = c.output;

  Json p;
  const auto& pc = c.pipeline;
  p["clean"] = pc.clean;
  p["lowercase"] = pc.lowercase;
  p["semantic_map"] = pc.semantic_map;
  p["stem"] = pc.stem;
  p["negation"] = pc.negation;
  p["stop_words"] = pc.stop_words;
  p["collocations"] = pc.collocations;
  p["negation_window"] = pc.negation_window;
  p["negation_cues"] = pc.negation_cues;
  p["npmi_threshold"] = pc.npmi_threshold;
  p["min_pair_count"] = pc.min_pair_count;
  p["collocation_passes"] = pc.collocation_passes;
  p["deid_regex"] = pc.deid_regex;
  p["rules_path"] = c.rules_path;
  p["stopwords_path"] = c.stopwords_path;
  j["pipeline"] = std::move(p);

  Json f;
  f["min_df"] = c.features.min_df;
  f["l2_normalize"] = c.features.l2_normalize ? Json(*c.features.l2_normalize) : Json(nullptr);
  j["features"] = std::move(f);
  j["model"] = model_to(c.model);
  j["split"] = {{"k", c.k}, {"test_fraction", c.test_fraction}};
  j["sweep"] = {{"counts", c.sweep_counts}};
  Json grid = Json::array();
  for (const auto& g : c.grid) grid.push_back(model_to(g));
  j["grid"] = std::move(grid);
  j["importance"] = {{"top_k", c.top_k}};
  j["data"] = {{"category_filter", c.category_filter ? Json(*c.category_filter) : Json(nullptr)}};

  Json s;
  const auto& sc = c.synthetic;
  s["n_positive"] = sc.n_positive;
  s["n_negative"] = sc.n_negative;
  s["signal_terms"] = sc.signal_terms;
  s["distractor_terms"] = sc.distractor_terms;
  s["negation_rate"] = sc.negation_rate;
  s["label_noise_rate"] = sc.label_noise_rate;
  s["mean_doc_length"] = sc.mean_doc_length;
  s["positive_signal_mentions"] = sc.positive_signal_mentions;
  s["negative_signal_mentions"] = sc.negative_signal_mentions;
  j["synthetic"] = std::move(s);
  return j.dump(2) + "\n";
}

Pipeline make_pipeline(const RunConfig& config) {
  RuleSet rules = config.rules_path.empty() ? default_ruleset() : RuleSet::load(config.rules_path);
  std::string stop_path = config.stopwords_path;
  if (const char* env = std::getenv("NOTECODER_STOPLIST"); env && *env) stop_path = env;
  auto stop = stop_path.empty() ? default_stop_words() : load_stop_words(stop_path);
  return Pipeline(config.pipeline, std::move(rules), std::move(stop));
}

ExperimentConfig experiment_config(const RunConfig& config) {
  ExperimentConfig e;
  e.features = config.features;
  e.model = config.model;
  e.seed = config.seed;
  e.threads = config.threads;
  return e;
}

}  // namespace notecoder
