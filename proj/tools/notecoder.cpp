// notecoder: command-line front end. Every subcommand resolves a RunConfig
// (defaults <- --config file <- flags), echoes it next to its outputs, and
// returns 0 on success, 1 on usage/config errors, 2 on data errors.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "notecoder/config.hpp"
#include "notecoder/corpus.hpp"
#include "notecoder/csv.hpp"
#include "notecoder/error.hpp"
#include "notecoder/experiment.hpp"
#include "notecoder/io.hpp"
#include "notecoder/report.hpp"
#include "notecoder/synthetic.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace notecoder;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

// Flag values; unset ones leave the config file (or defaults) alone.
struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> out;
  std::optional<std::string> input;

  std::optional<std::string> model;
  std::optional<std::size_t> n;
  std::optional<std::string> max_depth;
  std::optional<double> c;
  std::optional<std::size_t> epochs;
  bool no_bootstrap = false;

  std::optional<std::size_t> k;
  std::optional<double> test_fraction;
  std::optional<std::size_t> min_df;
  std::optional<std::string> l2;
  std::optional<std::size_t> top_k;
  std::vector<std::size_t> counts;
  std::vector<std::string> categories;

  std::optional<std::string> rules;
  std::optional<std::string> stopwords;
  std::optional<double> npmi;
  std::optional<std::uint64_t> min_pair_count;
  std::optional<std::size_t> window;
  bool no_semantic_map = false;
  bool no_stem = false;
  bool no_negation = false;
  bool no_stop_words = false;
  bool no_collocations = false;

  std::optional<std::size_t> n_positive;
  std::optional<std::size_t> n_negative;
  std::optional<double> noise;
  std::optional<double> negation_rate;
};

void add_common(CLI::App* sub, Flags& f, bool with_input = true) {
  sub->add_option("--config", f.config_path, "JSON run config; flags override it")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "Seed for every random choice");
  sub->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
  sub->add_option("--out", f.out, "Output path");
  if (with_input) sub->add_option("--input", f.input, "Corpus JSONL (admission_id, text, label)");
}

void add_pipeline(CLI::App* sub, Flags& f) {
  sub->add_option("--rules", f.rules, "Semantic-map rules TSV (default: built-in seed rules)");
  sub->add_option("--stopwords", f.stopwords, "Stop-word list, one word per line");
  sub->add_option("--npmi", f.npmi, "NPMI threshold for merging collocations");
  sub->add_option("--min-pair-count", f.min_pair_count, "Minimum bigram count for a collocation");
  sub->add_option("--window", f.window, "Tokens dropped after a negation cue");
  sub->add_flag("--no-semantic-map", f.no_semantic_map, "Skip semantic mapping");
  sub->add_flag("--no-stem", f.no_stem, "Skip stemming");
  sub->add_flag("--no-negation", f.no_negation, "Skip negation handling");
  sub->add_flag("--no-stop-words", f.no_stop_words, "Keep stop words");
  sub->add_flag("--no-collocations", f.no_collocations, "Skip collocation merging");
  sub->add_option("--min-df", f.min_df, "Minimum document frequency for the vocabulary");
  sub->add_option("--l2", f.l2, "L2-normalize TF-IDF rows: on, off or auto")->check(CLI::IsMember({"on", "off", "auto"}));
}

void add_model(CLI::App* sub, Flags& f) {
  sub->add_option("--model", f.model, "tree, bagging, adaboost or linear")
      ->check(CLI::IsMember({"tree", "bagging", "adaboost", "linear"}));
  sub->add_option("--n", f.n, "Number of trees / boosting stages");
  sub->add_option("--max-depth", f.max_depth, "Tree depth limit, or 'none'");
  sub->add_option("--C", f.c, "Hinge-loss penalty of the linear model");
  sub->add_option("--epochs", f.epochs, "Passes over the data for the linear model");
  sub->add_flag("--no-bootstrap", f.no_bootstrap, "Bagging: train every tree on the full data");
}

void add_split(CLI::App* sub, Flags& f, bool folds) {
  if (folds) {
    sub->add_option("--k", f.k, "Number of cross-validation folds");
  } else {
    sub->add_option("--test-fraction", f.test_fraction, "Held-out share of the corpus");
  }
}

void add_synthetic(CLI::App* sub, Flags& f) {
  sub->add_option("--n-positive", f.n_positive, "Jaundice admissions");
  sub->add_option("--n-negative", f.n_negative, "Other admissions");
  sub->add_option("--noise", f.noise, "Share of labels flipped");
  sub->add_option("--negation-rate", f.negation_rate, "Share of negative-class signal mentions that are negated");
}

RunConfig resolve(const Flags& f) {
  Json j = Json::object();
  if (!f.config_path.empty()) {
    try {
      j = Json::parse(read_text_file(f.config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(f.config_path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(f.config_path + ": config must be a JSON object");
  }
  auto set = [&](const char* section, const char* key, Json value) {
    if (section) {
      j[section][key] = std::move(value);
    } else {
      j[key] = std::move(value);
    }
  };
  if (f.seed) set(nullptr, "seed", *f.seed);
  if (f.threads) set(nullptr, "threads", *f.threads);
  if (f.out) set(nullptr, "output", *f.out);
  if (f.input) set(nullptr, "input", *f.input);

  // a new kind starts from that kind's defaults, not the file's old fields
  if (f.model) {
    const auto old = j.contains("model") && j["model"].contains("kind") ? j["model"]["kind"].get<std::string>() : "";
    if (old != *f.model) j["model"] = Json::object();
    set("model", "kind", *f.model);
  }
  if (f.n) set("model", "n_estimators", *f.n);
  if (f.max_depth) {
    if (*f.max_depth == "none") {
      set("model", "max_depth", nullptr);
    } else {
      try {
        std::size_t pos = 0;
        const auto d = std::stoul(*f.max_depth, &pos);
        if (pos != f.max_depth->size()) throw std::invalid_argument("trailing text");
        set("model", "max_depth", d);
      } catch (const std::exception&) {
        throw ConfigError("--max-depth must be a non-negative integer or 'none'");
      }
    }
  }
  if (f.c) set("model", "C", *f.c);
  if (f.epochs) set("model", "epochs", *f.epochs);
  if (f.no_bootstrap) set("model", "bootstrap", false);

  if (f.k) set("split", "k", *f.k);
  if (f.test_fraction) set("split", "test_fraction", *f.test_fraction);
  if (f.min_df) set("features", "min_df", *f.min_df);
  if (f.l2) set("features", "l2_normalize", *f.l2 == "auto" ? Json(nullptr) : Json(*f.l2 == "on"));
  if (f.top_k) set("importance", "top_k", *f.top_k);
  if (!f.counts.empty()) set("sweep", "counts", f.counts);
  if (!f.categories.empty()) set("data", "category_filter", f.categories);

  if (f.rules) set("pipeline", "rules_path", *f.rules);
  if (f.stopwords) set("pipeline", "stopwords_path", *f.stopwords);
  if (f.npmi) set("pipeline", "npmi_threshold", *f.npmi);
  if (f.min_pair_count) set("pipeline", "min_pair_count", *f.min_pair_count);
  if (f.window) set("pipeline", "negation_window", *f.window);
  if (f.no_semantic_map) set("pipeline", "semantic_map", false);
  if (f.no_stem) set("pipeline", "stem", false);
  if (f.no_negation) set("pipeline", "negation", false);
  if (f.no_stop_words) set("pipeline", "stop_words", false);
  if (f.no_collocations) set("pipeline", "collocations", false);

  if (f.n_positive) set("synthetic", "n_positive", *f.n_positive);
  if (f.n_negative) set("synthetic", "n_negative", *f.n_negative);
  if (f.noise) set("synthetic", "label_noise_rate", *f.noise);
  if (f.negation_rate) set("synthetic", "negation_rate", *f.negation_rate);

  return run_config_from_json(j.dump());
}

fs::path require_out(const RunConfig& c) {
  if (c.output.empty()) throw ConfigError("--out is required");
  return c.output;
}

std::vector<Noteset> load_corpus(const RunConfig& c) {
  if (c.input.empty()) throw ConfigError("--input is required");
  auto notesets = read_notesets_jsonl(c.input);
  if (notesets.empty()) throw DataError(c.input + ": corpus is empty");
  return notesets;
}

// Resolved config for an output directory, or next to an output file.
void echo_config(const RunConfig& c, const fs::path& out, bool out_is_dir) {
  const auto path = out_is_dir ? out / "config.json" : out.parent_path() / (out.stem().string() + ".config.json");
  write_text_file(path, run_config_to_json(c));
}

void note(const std::string& msg) { std::cerr << msg << "\n"; }

std::string metric_line(const std::string& name, const Metrics& m) {
  std::ostringstream s;
  s.precision(4);
  s << std::fixed << name << ": accuracy " << m.accuracy << "  precision " << m.precision << "  recall " << m.recall
    << "  f1 " << m.f1;
  return s.str();
}

// ---- artifacts of a trained system ----

void save_system(const TrainedSystem& sys, const fs::path& dir) {
  save_model(sys.model, dir / "model.json");
  write_text_file(dir / "collocations.tsv", sys.features.collocations.to_tsv());
  write_text_file(dir / "vocabulary.tsv", vocabulary_to_tsv(sys.features.vocabulary, sys.features.stats));
}

TrainedSystem load_system(const fs::path& dir, const RunConfig& c) {
  TrainedSystem sys;
  sys.model = load_model(dir / "model.json");
  sys.features.collocations = CollocationModel::from_tsv(read_text_file(dir / "collocations.tsv"),
                                                         (dir / "collocations.tsv").string());
  auto vb = vocabulary_from_tsv(read_text_file(dir / "vocabulary.tsv"), (dir / "vocabulary.tsv").string());
  sys.features.vocabulary = std::move(vb.vocabulary);
  sys.features.stats = std::move(vb.stats);
  sys.features.l2_normalize = c.features.l2_for(sys.model.kind());
  if (sys.features.vocabulary.fingerprint() != sys.model.vocabulary_fingerprint()) {
    throw DataError(dir.string() + ": model was trained on a different vocabulary");
  }
  return sys;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout(const RunConfig& c, std::size_t n) {
  return split_holdout(n, c.test_fraction, c.seed);
}

std::string split_csv(const std::vector<Noteset>& notesets, const std::vector<std::size_t>& train,
                      const std::vector<std::size_t>& test) {
  std::vector<std::string> role(notesets.size());
  for (auto i : train) role[i] = "train";
  for (auto i : test) role[i] = "test";
  std::string out = "admission_id,split\n";
  for (std::size_t i = 0; i < notesets.size(); ++i) out += notesets[i].admission_id + "," + role[i] + "\n";
  return out;
}

std::map<std::string, std::string> read_split(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  CsvReader reader(in);
  auto header_row = reader.next();
  if (!header_row) throw DataError(path.string() + ": empty split file");
  CsvHeader header(*header_row, path.string());
  const auto id = header.require("admission_id");
  const auto split = header.require("split");
  std::map<std::string, std::string> out;
  while (auto row = reader.next()) out[row->at(id)] = row->at(split);
  return out;
}

// ---- subcommands ----

int cmd_ingest(const RunConfig& c, const std::string& notes, const std::string& diagnoses, const std::string& codes) {
  const auto out = require_out(c);
  MimicCsvOptions opt;
  if (!codes.empty()) opt.jaundice_codes = IcdCodeSet::load(codes);
  if (c.category_filter) opt.category_filter = std::set<std::string>(c.category_filter->begin(), c.category_filter->end());
  const auto notesets = load_mimic_csv(notes, diagnoses, opt);
  write_notesets_jsonl(notesets, out);
  echo_config(c, out, false);
  std::size_t pos = 0;
  for (const auto& n : notesets) pos += n.label ? 1 : 0;
  note("wrote " + std::to_string(notesets.size()) + " notesets (" + std::to_string(pos) + " positive) to " +
       out.string());
  return 0;
}

int cmd_gen_synth(const RunConfig& c, bool mimic_format) {
  const auto out = require_out(c);
  auto sc = c.synthetic;
  sc.seed = c.seed;
  if (mimic_format) {
    // NOTEEVENTS / DIAGNOSES_ICD exports, for category-filtered ingestion
    const auto data = generate_synthetic_records(sc);
    std::string notes = "ROW_ID,HADM_ID,CATEGORY,TEXT\n";
    auto quote = [](const std::string& s) {
      std::string q = "\"";
      for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
      }
      return q + "\"";
    };
    for (const auto& r : data.records) {
      notes += std::to_string(r.chart_order + 1) + "," + r.admission_id + "," + quote(r.category) + "," + quote(r.text) +
               "\n";
    }
    std::string diag = "HADM_ID,ICD9_CODE\n";
    for (const auto& [id, label] : data.labels) diag += id + "," + (label ? "7746" : "V3000") + "\n";
    write_text_file(out / "NOTEEVENTS.csv", notes);
    write_text_file(out / "DIAGNOSES_ICD.csv", diag);
    echo_config(c, out, true);
    note("wrote " + std::to_string(data.records.size()) + " notes to " + out.string());
  } else {
    const auto notesets = generate_synthetic(sc);
    write_notesets_jsonl(notesets, out);
    echo_config(c, out, false);
    note("wrote " + std::to_string(notesets.size()) + " notesets to " + out.string());
  }
  return 0;
}

int cmd_preprocess(const RunConfig& c) {
  const auto out = require_out(c);
  const auto notesets = load_corpus(c);
  const auto pipeline = make_pipeline(c);
  const auto streams = preprocess_corpus(pipeline, notesets, c.threads);
  std::vector<std::size_t> all(notesets.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto features = fit_features(pipeline, streams, all, c.features, c.model.kind);
  std::string tokens;
  for (std::size_t i = 0; i < notesets.size(); ++i) {
    Json j;
    j["admission_id"] = notesets[i].admission_id;
    j["label"] = notesets[i].label;
    j["tokens"] = features.collocations.apply(streams[i]);
    tokens += j.dump() + "\n";
  }
  write_text_file(out / "tokens.jsonl", tokens);
  write_text_file(out / "collocations.tsv", features.collocations.to_tsv());
  write_text_file(out / "vocabulary.tsv", vocabulary_to_tsv(features.vocabulary, features.stats));
  echo_config(c, out, true);
  note("vocabulary: " + std::to_string(features.vocabulary.size()) + " tokens");
  return 0;
}

int cmd_train(const RunConfig& c, bool all_data) {
  const auto out = require_out(c);
  const auto notesets = load_corpus(c);
  const auto pipeline = make_pipeline(c);
  const auto ec = experiment_config(c);
  std::vector<std::size_t> train, test;
  if (all_data) {
    for (std::size_t i = 0; i < notesets.size(); ++i) train.push_back(i);
  } else {
    std::tie(train, test) = holdout(c, notesets.size());
  }
  const auto sys = fit_system(pipeline, ec, notesets, train);
  save_system(sys, out);
  write_text_file(out / "split.csv", split_csv(notesets, train, test));
  echo_config(c, out, true);
  note("trained " + std::string(model_kind_name(c.model.kind)) + " on " + std::to_string(train.size()) +
       " notesets; vocabulary " + std::to_string(sys.features.vocabulary.size()));
  return 0;
}

int cmd_evaluate(Flags f, const std::string& model_dir) {
  const fs::path dir = model_dir;
  f.config_path = (dir / "config.json").string();
  if (!fs::exists(f.config_path)) throw DataError(f.config_path + " not found (run train first)");
  auto c = resolve(f);
  const fs::path out = f.out ? fs::path(*f.out) : dir;
  c.output = out.string();
  const auto sys = load_system(dir, c);
  const auto notesets = load_corpus(c);
  const auto split = read_split(dir / "split.csv");
  const auto pipeline = make_pipeline(c);
  const auto streams = preprocess_corpus(pipeline, notesets, c.threads);

  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < notesets.size(); ++i) {
    auto it = split.find(notesets[i].admission_id);
    (it != split.end() && it->second == "train" ? train : test).push_back(i);
  }
  if (test.empty()) throw DataError("no held-out notesets to evaluate (model was trained on the whole corpus)");

  std::vector<std::pair<std::string, Evaluation>> rows;
  Evaluation train_eval{};
  if (!train.empty()) {
    const auto tr = make_dataset(sys.features, streams, notesets, train);
    train_eval = predict_all(sys.model, tr, notesets, train).evaluate();
    rows.emplace_back("train", train_eval);
  }
  const auto te = make_dataset(sys.features, streams, notesets, test);
  const auto predictions = predict_all(sys.model, te, notesets, test);
  const auto test_eval = predictions.evaluate();
  rows.emplace_back("test", test_eval);

  double auc = std::numeric_limits<double>::quiet_NaN();
  const auto scores = predictions.scores();
  const bool both = std::count(predictions.labels.begin(), predictions.labels.end(), true) > 0 &&
                    std::count(predictions.labels.begin(), predictions.labels.end(), false) > 0;
  if (both) {
    const auto curve = roc(scores, predictions.labels);
    auc = curve.auc;
    const std::vector<std::pair<std::string, RocCurve>> curves = {{std::string(model_kind_name(c.model.kind)), curve}};
    write_text_file(out / "roc.csv", roc_csv(curves));
    write_text_file(out / "roc.svg", roc_svg(curves));
  }
  write_text_file(out / "metrics.csv", metrics_csv(rows));
  write_text_file(out / "predictions.csv", predictions_csv(predictions));
  write_text_file(out / "summary.json", holdout_summary_json(train_eval, test_eval, c.model, auc));
  if (out != dir) echo_config(c, out, true);
  std::cout << metric_line("test", test_eval.metrics) << "\n";
  return 0;
}

int cmd_cv(const RunConfig& c) {
  const auto out = require_out(c);
  const auto notesets = load_corpus(c);
  const auto report = cross_validate(make_pipeline(c), experiment_config(c), notesets, c.k);
  write_text_file(out / "folds.csv", cv_csv(report));
  write_text_file(out / "summary.json", cv_summary_json(report, c.model));
  echo_config(c, out, true);
  std::cout << metric_line(std::to_string(c.k) + "-fold mean", report.mean) << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& c) {
  const auto out = require_out(c);
  const auto notesets = load_corpus(c);
  const auto pipeline = make_pipeline(c);
  const auto [train, test] = holdout(c, notesets.size());
  const auto streams = preprocess_corpus(pipeline, notesets, c.threads);
  const auto features = fit_features(pipeline, streams, train, c.features, c.model.kind);
  const auto tr = make_dataset(features, streams, notesets, train);
  const auto te = make_dataset(features, streams, notesets, test);
  const auto rows = estimator_sweep(tr, te, c.model, c.sweep_counts, c.seed, c.threads);
  write_text_file(out / "sweep.csv", sweep_csv(rows));
  write_text_file(out / "sweep.svg", sweep_svg(rows));
  echo_config(c, out, true);
  const auto& last = rows.back();
  std::cout << last.count << " estimators: train " << last.train_accuracy << "  test " << last.test_accuracy << "\n";
  return 0;
}

int cmd_grid(RunConfig c) {
  const auto out = require_out(c);
  if (c.grid.empty()) {
    // without a grid in the config, vary the main knob of the chosen model
    auto point = [&](auto&& set) {
      auto m = c.model;
      set(m);
      c.grid.push_back(m);
    };
    switch (c.model.kind) {
      case ModelKind::linear:
        for (double v : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) point([&](ModelConfig& m) { m.c = v; });
        break;
      case ModelKind::tree:
        for (std::size_t d : {2, 3, 4, 5, 6, 8, 10}) point([&](ModelConfig& m) { m.max_depth = d; });
        point([](ModelConfig& m) { m.max_depth.reset(); });
        break;
      case ModelKind::bagging:
      case ModelKind::adaboost:
        for (std::size_t n : {10, 20, 40, 80}) point([&](ModelConfig& m) { m.n_estimators = n; });
        break;
    }
  }
  const auto notesets = load_corpus(c);
  const auto result = grid_search(make_pipeline(c), experiment_config(c), notesets, c.grid, c.k);
  write_text_file(out / "grid.csv", grid_csv(result));
  write_text_file(out / "summary.json", grid_summary_json(result));
  echo_config(c, out, true);
  const auto& best = result.rows[result.best];
  std::cout << "best: grid point " << result.best << " (" << model_kind_name(best.model.kind) << "), mean f1 "
            << best.cv.mean.f1 << "\n";
  return 0;
}

int cmd_features(RunConfig c) {
  const auto out = require_out(c);
  if (c.model.kind != ModelKind::linear) c.model = ModelConfig::defaults(ModelKind::linear);
  const auto notesets = load_corpus(c);
  const auto [train, test] = holdout(c, notesets.size());
  const auto sys = fit_system(make_pipeline(c), experiment_config(c), notesets, train);
  const auto& linear = std::get<LinearModel>(sys.model.variant());
  const auto ranked = feature_importance(linear, sys.features.vocabulary.tokens(), c.top_k);
  write_text_file(out / "features.csv", features_csv(ranked));
  echo_config(c, out, true);
  for (const auto& [token, w] : ranked) std::cout << token << "\t" << w << "\n";
  return 0;
}

int cmd_roc(const RunConfig& c, const std::vector<std::string>& kinds) {
  const auto out = require_out(c);
  const auto notesets = load_corpus(c);
  const auto pipeline = make_pipeline(c);
  const auto [train, test] = holdout(c, notesets.size());
  std::vector<std::pair<std::string, RocCurve>> curves;
  std::vector<std::pair<std::string, Evaluation>> rows;
  for (const auto& name : kinds) {
    auto ec = experiment_config(c);
    const auto kind = parse_model_kind(name);
    ec.model = kind == c.model.kind ? c.model : ModelConfig::defaults(kind);
    const auto r = run_holdout(pipeline, ec, notesets, train, test);
    curves.emplace_back(name, roc(r.test.scores(), r.test.labels));
    rows.emplace_back(name, r.test.evaluate());
    std::cout << name << " auc " << curves.back().second.auc << "\n";
  }
  write_text_file(out / "roc.csv", roc_csv(curves));
  write_text_file(out / "roc.svg", roc_svg(curves));
  write_text_file(out / "metrics.csv", metrics_csv(rows));
  echo_config(c, out, true);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automatic ICD-9 coding of neonatal jaundice from clinical notes"};
  app.require_subcommand(1);
  Flags f;

  auto* ingest = app.add_subcommand("ingest-mimic", "Build notesets from NOTEEVENTS / DIAGNOSES_ICD CSV exports");
  std::string notes_csv, diag_csv, codes_file;
  add_common(ingest, f, false);
  ingest->add_option("--notes", notes_csv, "NOTEEVENTS.csv")->required()->check(CLI::ExistingFile);
  ingest->add_option("--diagnoses", diag_csv, "DIAGNOSES_ICD.csv")->required()->check(CLI::ExistingFile);
  ingest->add_option("--codes", codes_file, "Positive ICD-9 codes, one per line")->check(CLI::ExistingFile);
  ingest->add_option("--category", f.categories, "Keep only notes of this category (repeatable)");

  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic corpus");
  bool mimic_format = false;
  add_common(gen, f, false);
  add_synthetic(gen, f);
  gen->add_flag("--mimic", mimic_format, "Write NOTEEVENTS.csv and DIAGNOSES_ICD.csv into the --out directory");

  auto* pre = app.add_subcommand("preprocess", "Run the text pipeline and write tokens, collocations, vocabulary");
  add_common(pre, f);
  add_pipeline(pre, f);

  auto* train = app.add_subcommand("train", "Fit a model on the training split");
  bool train_all = false;
  add_common(train, f);
  add_pipeline(train, f);
  add_model(train, f);
  add_split(train, f, false);
  train->add_flag("--all", train_all, "Train on the whole corpus (nothing held out)");

  auto* evaluate = app.add_subcommand("evaluate", "Score a trained model on its held-out split");
  std::string model_dir;
  add_common(evaluate, f);
  evaluate->add_option("--model-dir", model_dir, "Directory written by train")->required()->check(CLI::ExistingDirectory);

  auto* cv = app.add_subcommand("cv", "k-fold cross-validation");
  add_common(cv, f);
  add_pipeline(cv, f);
  add_model(cv, f);
  add_split(cv, f, true);

  auto* sweep = app.add_subcommand("sweep", "Train/test accuracy against ensemble size");
  add_common(sweep, f);
  add_pipeline(sweep, f);
  add_model(sweep, f);
  add_split(sweep, f, false);
  sweep->add_option("--counts", f.counts, "Ensemble sizes, strictly increasing");

  auto* grid = app.add_subcommand("grid", "Grid search by cross-validated mean F1");
  add_common(grid, f);
  add_pipeline(grid, f);
  add_model(grid, f);
  add_split(grid, f, true);

  auto* features = app.add_subcommand("features", "Rank tokens by linear-model coefficient");
  add_common(features, f);
  add_pipeline(features, f);
  add_model(features, f);
  add_split(features, f, false);
  features->add_option("--top-k", f.top_k, "Number of tokens to report");

  auto* roc_cmd = app.add_subcommand("roc", "ROC curves of several models on one held-out split");
  std::vector<std::string> roc_models = {"tree", "bagging", "adaboost", "linear"};
  add_common(roc_cmd, f);
  add_pipeline(roc_cmd, f);
  add_model(roc_cmd, f);
  add_split(roc_cmd, f, false);
  roc_cmd->add_option("--models", roc_models, "Models to compare")
      ->check(CLI::IsMember({"tree", "bagging", "adaboost", "linear"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    std::cerr << (parsed.empty() ? app.help() : parsed.back()->help());
    return kUsageError;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(resolve(f), notes_csv, diag_csv, codes_file);
    if (gen->parsed()) return cmd_gen_synth(resolve(f), mimic_format);
    if (pre->parsed()) return cmd_preprocess(resolve(f));
    if (train->parsed()) return cmd_train(resolve(f), train_all);
    if (evaluate->parsed()) return cmd_evaluate(f, model_dir);
    if (cv->parsed()) return cmd_cv(resolve(f));
    if (sweep->parsed()) return cmd_sweep(resolve(f));
    if (grid->parsed()) return cmd_grid(resolve(f));
    if (features->parsed()) return cmd_features(resolve(f));
    if (roc_cmd->parsed()) return cmd_roc(resolve(f), roc_models);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}
