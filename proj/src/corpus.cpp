#include "notecoder/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "notecoder/csv.hpp"
#include "notecoder/error.hpp"
#include "notecoder/io.hpp"
#include "notecoder/rng.hpp"

namespace notecoder {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

IcdCodeSet::IcdCodeSet(std::initializer_list<std::string_view> codes) {
  for (auto c : codes) insert(c);
}

std::string IcdCodeSet::normalize(std::string_view code) {
  std::string out;
  out.reserve(code.size());
  for (char c : code) {
    if (c == '.' || std::isspace(static_cast<unsigned char>(c))) continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

IcdCodeSet IcdCodeSet::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  IcdCodeSet set;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    set.insert(t);
  }
  return set;
}

const IcdCodeSet& default_jaundice_codes() {
  // 773.2 stands in for the second "773.0" row of the published code table,
  // which is described as "unknown" hemolytic disease.
  static const IcdCodeSet codes{"773.0", "773.1", "773.2", "774.1", "774.2",
                                "774.30", "774.31", "774.39", "774.6"};
  return codes;
}

bool label_admission(const IcdCodeSet& codes, const IcdCodeSet& jaundice_codes) {
  const auto& a = codes.codes();
  const auto& b = jaundice_codes.codes();
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) return true;
    if (*ia < *ib) ++ia; else ++ib;
  }
  return false;
}

std::vector<Noteset> build_notesets(const std::vector<NoteRecord>& records,
                                    const std::map<std::string, bool>& labels,
                                    const std::optional<std::set<std::string>>& category_filter) {
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::string> order;
  std::vector<std::vector<const NoteRecord*>> grouped;

  for (const auto& r : records) {
    if (!labels.count(r.admission_id)) {
      throw DataError("no label for admission_id \"" + r.admission_id + "\"");
    }
    if (category_filter && !category_filter->count(r.category)) continue;
    auto [it, inserted] = slot.try_emplace(r.admission_id, order.size());
    if (inserted) {
      order.push_back(r.admission_id);
      grouped.emplace_back();
    }
    grouped[it->second].push_back(&r);
  }

  std::vector<Noteset> out;
  out.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& notes = grouped[i];
    std::stable_sort(notes.begin(), notes.end(),
                     [](const NoteRecord* a, const NoteRecord* b) { return a->chart_order < b->chart_order; });
    Noteset ns;
    ns.admission_id = order[i];
    ns.label = labels.at(order[i]);
    for (std::size_t j = 0; j < notes.size(); ++j) {
      if (j) ns.text.push_back('\n');
      ns.text += notes[j]->text;
    }
    out.push_back(std::move(ns));
  }
  return out;
}

std::vector<NoteRecord> read_note_records(const std::filesystem::path& noteevents_path,
                                          const std::string& chart_order_column) {
  auto in = open_input(noteevents_path);
  CsvReader reader(in);
  auto header_row = reader.next();
  if (!header_row) throw DataError(noteevents_path.string() + ": empty file");
  CsvHeader header(*header_row, noteevents_path.string());
  const auto c_id = header.require("HADM_ID");
  const auto c_cat = header.require("CATEGORY");
  const auto c_text = header.require("TEXT");
  const auto c_order = header.find(chart_order_column);

  std::vector<NoteRecord> records;
  std::int64_t row_index = 0;
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;  // blank line
    if (row->size() != header.size()) {
      throw DataError(noteevents_path.string() + ": row " + std::to_string(reader.row()) + " has " +
                      std::to_string(row->size()) + " fields, expected " + std::to_string(header.size()));
    }
    NoteRecord r;
    r.admission_id = trim((*row)[c_id]);
    if (r.admission_id.empty()) continue;
    r.category = trim((*row)[c_cat]);
    r.text = std::move((*row)[c_text]);
    if (c_order) {
      auto field = trim((*row)[*c_order]);
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), r.chart_order);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw DataError(noteevents_path.string() + ": row " + std::to_string(reader.row()) + ": column " +
                        chart_order_column + " is not an integer: \"" + field + "\"");
      }
    } else {
      r.chart_order = row_index;
    }
    ++row_index;
    records.push_back(std::move(r));
  }
  return records;
}

std::map<std::string, bool> read_admission_labels(const std::filesystem::path& diagnoses_path,
                                                  const IcdCodeSet& jaundice_codes) {
  auto in = open_input(diagnoses_path);
  CsvReader reader(in);
  auto header_row = reader.next();
  if (!header_row) throw DataError(diagnoses_path.string() + ": empty file");
  CsvHeader header(*header_row, diagnoses_path.string());
  const auto c_id = header.require("HADM_ID");
  const auto c_code = header.require("ICD9_CODE");

  std::map<std::string, IcdCodeSet> codes;
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    if (row->size() != header.size()) {
      throw DataError(diagnoses_path.string() + ": row " + std::to_string(reader.row()) + " has " +
                      std::to_string(row->size()) + " fields, expected " + std::to_string(header.size()));
    }
    auto id = trim((*row)[c_id]);
    if (id.empty()) continue;
    auto& set = codes[id];
    auto code = trim((*row)[c_code]);
    if (!code.empty()) set.insert(code);
  }

  std::map<std::string, bool> labels;
  for (const auto& [id, set] : codes) labels[id] = label_admission(set, jaundice_codes);
  return labels;
}

std::vector<Noteset> load_mimic_csv(const std::filesystem::path& noteevents_path,
                                    const std::filesystem::path& diagnoses_path, const MimicCsvOptions& options) {
  auto labels = read_admission_labels(diagnoses_path, options.jaundice_codes);
  auto records = read_note_records(noteevents_path, options.chart_order_column);
  return build_notesets(records, labels, options.category_filter);
}

std::string notesets_to_jsonl(const std::vector<Noteset>& notesets) {
  std::string out;
  for (const auto& ns : notesets) {
    nlohmann::ordered_json j;
    j["admission_id"] = ns.admission_id;
    j["text"] = ns.text;
    j["label"] = ns.label;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

void write_notesets_jsonl(const std::vector<Noteset>& notesets, const std::filesystem::path& path) {
  write_text_file(path, notesets_to_jsonl(notesets));
}

std::vector<Noteset> read_notesets_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<Noteset> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!j.is_object()) throw DataError(where + ": expected a JSON object");
    Noteset ns;
    try {
      ns.admission_id = j.at("admission_id").get<std::string>();
      ns.text = j.at("text").get<std::string>();
      const auto& label = j.at("label");
      if (label.is_boolean()) {
        ns.label = label.get<bool>();
      } else if (label.is_number_integer() && (label == 0 || label == 1)) {
        ns.label = label.get<int>() == 1;
      } else {
        throw DataError(where + ": label must be true/false or 0/1");
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    if (ns.admission_id.empty()) throw DataError(where + ": empty admission_id");
    if (!seen.insert(ns.admission_id).second) {
      throw DataError(where + ": duplicate admission_id \"" + ns.admission_id + "\"");
    }
    out.push_back(std::move(ns));
  }
  return out;
}

std::vector<std::size_t> SplitPlan::test_indices(const std::vector<Noteset>& notesets, std::size_t fold) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < notesets.size(); ++i) {
    if (fold_of.at(notesets[i].admission_id) == fold) idx.push_back(i);
  }
  return idx;
}

std::vector<std::size_t> SplitPlan::train_indices(const std::vector<Noteset>& notesets, std::size_t fold) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < notesets.size(); ++i) {
    if (fold_of.at(notesets[i].admission_id) != fold) idx.push_back(i);
  }
  return idx;
}

SplitPlan split_kfold(const std::vector<Noteset>& notesets, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold split needs k >= 2, got " + std::to_string(k));
  if (k > notesets.size()) {
    throw ConfigError("k-fold split: k = " + std::to_string(k) + " exceeds the " +
                      std::to_string(notesets.size()) + " available notesets");
  }
  std::vector<std::size_t> order(notesets.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  SplitPlan plan;
  plan.k = k;
  plan.seed = seed;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& id = notesets[order[pos]].admission_id;
    if (!plan.fold_of.emplace(id, pos % k).second) {
      throw DataError("duplicate admission_id \"" + id + "\" in k-fold split");
    }
  }
  return plan;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_holdout(std::size_t n, double test_fraction,
                                                                            std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test >= n) throw ConfigError("holdout split leaves an empty train or test set");
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {std::move(train), std::move(test)};
}

}  // namespace notecoder
