#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "notecoder/corpus.hpp"
#include "notecoder/csv.hpp"
#include "notecoder/error.hpp"
#include "notecoder/io.hpp"
#include "notecoder/rng.hpp"
#include "notecoder/synthetic.hpp"

using namespace notecoder;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("notecoder_corpus_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

TEST_CASE("label_admission") {
  const auto& j = default_jaundice_codes();
  CHECK(label_admission({"7746"}, j));
  CHECK_FALSE(label_admission({"V3000"}, j));
  CHECK(label_admission({"77430", "486"}, j));
  CHECK_FALSE(label_admission({}, j));
  CHECK(label_admission({"774.6"}, j));
}

TEST_CASE("default code set") {
  const auto& j = default_jaundice_codes();
  const std::set<std::string> expected = {"7730", "7731", "7732", "7741", "7742", "77430", "77431", "77439", "7746"};
  CHECK(j.codes() == expected);
}

TEST_CASE("icd normalization is idempotent") {
  for (const char* code : {"774.6", " v30.00 ", "7746", "E812.0"}) {
    const auto once = IcdCodeSet::normalize(code);
    CHECK(IcdCodeSet::normalize(once) == once);
  }
  CHECK(IcdCodeSet::normalize(" v30.00 ") == "V3000");
}

TEST_CASE("label_admission matches brute-force intersection") {
  Rng rng(11);
  const std::vector<std::string> pool = {"7730", "7731", "7746", "486", "V3000", "7742", "V290", "77431"};
  for (int trial = 0; trial < 200; ++trial) {
    IcdCodeSet a, b;
    for (const auto& c : pool) {
      if (rng.bernoulli(0.3)) a.insert(c);
      if (rng.bernoulli(0.3)) b.insert(c);
    }
    bool meet = false;
    for (const auto& c : a.codes()) meet = meet || b.codes().count(c) > 0;
    CHECK(label_admission(a, b) == meet);
    CHECK(label_admission(b, a) == meet);
  }
}

TEST_CASE("build_notesets") {
  SUBCASE("chart order") {
    std::vector<NoteRecord> records = {
        {"A", "Nursing", "second", 2},
        {"A", "Nursing", "first", 1},
        {"A", "Physician", "third", 3},
    };
    auto out = build_notesets(records, {{"A", true}});
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "first\nsecond\nthird");
    CHECK(out[0].label);
  }
  SUBCASE("ties keep input order") {
    std::vector<NoteRecord> records = {{"A", "Nursing", "x", 1}, {"A", "Nursing", "y", 1}};
    CHECK(build_notesets(records, {{"A", false}})[0].text == "x\ny");
  }
  SUBCASE("discharge filter") {
    std::vector<NoteRecord> records = {
        {"A", "Nursing", "n1", 1},
        {"A", "Nursing", "n2", 2},
        {"A", "Discharge summary", "discharge", 3},
        {"B", "Nursing", "only nursing", 4},
    };
    auto out = build_notesets(records, {{"A", true}, {"B", false}}, std::set<std::string>{"Discharge summary"});
    REQUIRE(out.size() == 1);
    CHECK(out[0].admission_id == "A");
    CHECK(out[0].text == "discharge");
  }
  SUBCASE("empty") { CHECK(build_notesets({}, {}).empty()); }
  SUBCASE("missing label names the admission") {
    std::vector<NoteRecord> records = {{"A", "Nursing", "x", 1}, {"Q17", "Nursing", "y", 2}};
    try {
      build_notesets(records, {{"A", true}});
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("Q17") != std::string::npos);
    }
  }
  SUBCASE("one noteset per distinct admission") {
    Rng rng(3);
    std::vector<NoteRecord> records;
    std::map<std::string, bool> labels;
    std::set<std::string> ids;
    for (int i = 0; i < 100; ++i) {
      const auto id = "H" + std::to_string(rng.index(20));
      records.push_back({id, rng.bernoulli(0.5) ? "Nursing" : "Discharge summary", "t", i});
      labels[id] = false;
      ids.insert(id);
    }
    CHECK(build_notesets(records, labels).size() == ids.size());
  }
}

TEST_CASE("csv reader") {
  std::istringstream in("a,b\r\n\"x, y\",\"he said \"\"hi\"\"\"\n1,\"multi\nline\"\n");
  CsvReader r(in);
  CHECK(*r.next() == std::vector<std::string>{"a", "b"});
  CHECK(*r.next() == std::vector<std::string>{"x, y", "he said \"hi\""});
  CHECK(*r.next() == std::vector<std::string>{"1", "multi\nline"});
  CHECK_FALSE(r.next().has_value());

  std::istringstream bad("a,b\n\"unterminated,1\n");
  CsvReader r2(bad);
  r2.next();
  CHECK_THROWS_AS(r2.next(), DataError);
}

TEST_CASE("load_mimic_csv") {
  const auto dir = scratch_dir("mimic");
  const auto notes = dir / "NOTEEVENTS.csv";
  const auto diag = dir / "DIAGNOSES_ICD.csv";

  SUBCASE("two admissions, one jaundiced") {
    write_text_file(notes,
                    "ROW_ID,SUBJECT_ID,HADM_ID,CATEGORY,TEXT\n"
                    "1,10,100,Nursing,\"Baby under bili lights.\"\n"
                    "2,11,200,Nursing,\"Feeding well.\"\n");
    write_text_file(diag,
                    "ROW_ID,SUBJECT_ID,HADM_ID,SEQ_NUM,ICD9_CODE\n"
                    "1,10,100,1,7746\n"
                    "2,11,200,1,V3000\n");
    auto out = load_mimic_csv(notes, diag);
    REQUIRE(out.size() == 2);
    CHECK(out[0].admission_id == "100");
    CHECK(out[0].label);
    CHECK(out[1].admission_id == "200");
    CHECK_FALSE(out[1].label);
  }
  SUBCASE("multi-line quoted text") {
    write_text_file(notes,
                    "ROW_ID,HADM_ID,CATEGORY,TEXT\n"
                    "1,100,Nursing,\"line one\nline two, with comma\n\"\"quoted\"\"\"\n");
    write_text_file(diag, "HADM_ID,ICD9_CODE\n100,7741\n");
    auto out = load_mimic_csv(notes, diag);
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "line one\nline two, with comma\n\"quoted\"");
  }
  SUBCASE("missing ICD9_CODE column") {
    write_text_file(notes, "ROW_ID,HADM_ID,CATEGORY,TEXT\n1,100,Nursing,x\n");
    write_text_file(diag, "HADM_ID,CODE\n100,7741\n");
    try {
      load_mimic_csv(notes, diag);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("ICD9_CODE") != std::string::npos);
    }
  }
  SUBCASE("short row reports its row number") {
    write_text_file(notes, "ROW_ID,HADM_ID,CATEGORY,TEXT\n1,100,Nursing,x\n2,100\n");
    write_text_file(diag, "HADM_ID,ICD9_CODE\n100,7741\n");
    try {
      load_mimic_csv(notes, diag);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("jsonl round trip") {
  std::vector<Noteset> sets = {{"1", "a \"quoted\"\nline", true}, {"2", "", false}};
  const auto dir = scratch_dir("jsonl");
  write_notesets_jsonl(sets, dir / "c.jsonl");
  CHECK(read_notesets_jsonl(dir / "c.jsonl") == sets);
  fs::remove_all(dir);
}

TEST_CASE("generate_synthetic") {
  SyntheticConfig c;
  c.n_positive = 5;
  c.n_negative = 5;
  c.seed = 7;
  SUBCASE("deterministic") { CHECK(notesets_to_jsonl(generate_synthetic(c)) == notesets_to_jsonl(generate_synthetic(c))); }
  SUBCASE("seed matters") {
    auto d = c;
    d.seed = 8;
    CHECK(notesets_to_jsonl(generate_synthetic(c)) != notesets_to_jsonl(generate_synthetic(d)));
  }
  SUBCASE("no noise keeps the positive count") {
    c.n_positive = 37;
    c.n_negative = 51;
    c.label_noise_rate = 0.0;
    auto sets = generate_synthetic(c);
    CHECK(sets.size() == 88);
    CHECK(std::count_if(sets.begin(), sets.end(), [](const Noteset& s) { return s.label; }) == 37);
  }
  SUBCASE("noise flips an exact share") {
    c.n_positive = 100;
    c.n_negative = 100;
    c.label_noise_rate = 0.1;
    auto noisy = generate_synthetic_records(c);
    c.label_noise_rate = 0.0;
    auto clean = generate_synthetic_records(c);
    CHECK(noisy.records.size() == clean.records.size());
    int flips = 0;
    for (const auto& [id, label] : clean.labels) flips += noisy.labels.at(id) != label;
    CHECK(flips == 20);
  }
  SUBCASE("full negation puts a cue before every negative mention") {
    c.n_positive = 0;
    c.n_negative = 40;
    c.signal_terms = {"zzsignal"};
    c.negation_rate = 1.0;
    c.negative_signal_mentions = 3.0;
    std::size_t seen = 0;
    for (const auto& s : generate_synthetic(c)) {
      const auto text = lower(s.text);
      for (auto pos = text.find("zzsignal"); pos != std::string::npos; pos = text.find("zzsignal", pos + 1)) {
        ++seen;
        const auto before = text.substr(0, pos);
        bool cued = false;
        for (const auto& cue : synthetic_negation_cues()) {
          const auto tail = cue + " ";
          cued = cued || (before.size() >= tail.size() && before.compare(before.size() - tail.size(), tail.size(), tail) == 0);
        }
        CHECK(cued);
      }
    }
    CHECK(seen > 50);
  }
  SUBCASE("text exercises the cleaner") {
    c.n_positive = 20;
    c.n_negative = 20;
    std::string all;
    for (const auto& s : generate_synthetic(c)) all += s.text;
    CHECK(all.find("[**") != std::string::npos);
    CHECK(std::any_of(all.begin(), all.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }));
    CHECK(all.find('.') != std::string::npos);
  }
  SUBCASE("invalid rates") {
    c.negation_rate = 1.5;
    CHECK_THROWS_AS(generate_synthetic(c), ConfigError);
  }
}

namespace {

std::vector<Noteset> numbered(std::size_t n) {
  std::vector<Noteset> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"N" + std::to_string(i), "", i % 2 == 0});
  return out;
}

void check_plan(const std::vector<Noteset>& sets, const SplitPlan& plan) {
  std::vector<std::size_t> sizes(plan.k, 0);
  std::multiset<std::size_t> all;
  for (std::size_t f = 0; f < plan.k; ++f) {
    const auto test = plan.test_indices(sets, f);
    const auto train = plan.train_indices(sets, f);
    sizes[f] = test.size();
    CHECK(test.size() + train.size() == sets.size());
    for (auto i : test) all.insert(i);
    for (auto i : test) CHECK(std::find(train.begin(), train.end(), i) == train.end());
  }
  CHECK(all.size() == sets.size());
  CHECK(std::set<std::size_t>(all.begin(), all.end()).size() == sets.size());
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  CHECK(*hi - *lo <= 1);
}

}  // namespace

TEST_CASE("split_kfold") {
  SUBCASE("10 into 10") {
    auto sets = numbered(10);
    auto plan = split_kfold(sets, 10, 1);
    for (std::size_t f = 0; f < 10; ++f) CHECK(plan.test_indices(sets, f).size() == 1);
    check_plan(sets, plan);
  }
  SUBCASE("23 into 10") {
    auto sets = numbered(23);
    auto plan = split_kfold(sets, 10, 5);
    int twos = 0, threes = 0;
    for (std::size_t f = 0; f < 10; ++f) {
      const auto n = plan.test_indices(sets, f).size();
      twos += n == 2;
      threes += n == 3;
    }
    CHECK(twos == 7);
    CHECK(threes == 3);
    check_plan(sets, plan);
  }
  SUBCASE("deterministic") {
    auto sets = numbered(57);
    CHECK(split_kfold(sets, 4, 9).fold_of == split_kfold(sets, 4, 9).fold_of);
    CHECK(split_kfold(sets, 4, 9).fold_of != split_kfold(sets, 4, 10).fold_of);
  }
  SUBCASE("random sizes") {
    Rng rng(2);
    for (int t = 0; t < 30; ++t) {
      const auto n = 2 + rng.index(80);
      const auto k = 2 + rng.index(std::min<std::size_t>(n - 1, 12));
      auto sets = numbered(n);
      check_plan(sets, split_kfold(sets, k, t));
    }
  }
  SUBCASE("errors") {
    auto sets = numbered(5);
    CHECK_THROWS_AS(split_kfold(sets, 6, 0), ConfigError);
    CHECK_THROWS_AS(split_kfold(sets, 1, 0), ConfigError);
    sets[1].admission_id = sets[0].admission_id;
    CHECK_THROWS_AS(split_kfold(sets, 2, 0), DataError);
  }
}

TEST_CASE("split_holdout") {
  auto [train, test] = split_holdout(2500, 0.2, 7);
  CHECK(test.size() == 500);
  CHECK(train.size() == 2000);
  std::set<std::size_t> all(train.begin(), train.end());
  all.insert(test.begin(), test.end());
  CHECK(all.size() == 2500);
  CHECK(split_holdout(2500, 0.2, 7) == split_holdout(2500, 0.2, 7));
}
