#include <doctest.h>

#include <cmath>
#include <set>

#include "notecoder/error.hpp"
#include "notecoder/io.hpp"
#include "notecoder/preprocess.hpp"
#include "notecoder/rng.hpp"
#include "notecoder/synthetic.hpp"

using namespace notecoder;
using TS = TokenStream;

TEST_CASE("clean") {
  CHECK(clean("Bili 9.2 [**2101-1-5**] stable.") == "bili stable");
  CHECK(clean("") == "");
  CHECK(clean("[**Name (NI) 123**]phototherapy ON") == "phototherapy on");
  CHECK(clean("Bili 9.2", false) == "Bili");
  CHECK(clean("a--b\t\tc\n") == "a b c");
  CHECK(clean("x 12abc") == "x abc");
}

TEST_CASE("clean with a custom de-id pattern") {
  std::regex deid("<PHI>[^<]*</PHI>");
  CHECK(clean("seen by <PHI>Dr Smith</PHI> today", true, deid) == "seen by today");
}

TEST_CASE("clean is idempotent") {
  Rng rng(5);
  const std::string alphabet = "aZ 9.,[*]-_\n\t'é";
  for (int t = 0; t < 500; ++t) {
    std::string s;
    const auto n = rng.index(40);
    for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[rng.index(alphabet.size())]);
    const auto once = clean(s);
    CHECK(clean(once) == once);
  }
  SyntheticConfig c;
  c.n_positive = 5;
  c.n_negative = 5;
  for (const auto& s : generate_synthetic(c)) CHECK(clean(clean(s.text)) == clean(s.text));
}

TEST_CASE("tokenize") {
  CHECK(tokenize("bili stable") == TS{"bili", "stable"});
  CHECK(tokenize("  a  b ") == TS{"a", "b"});
  CHECK(tokenize("").empty());
}

TEST_CASE("semantic map with shipped rules") {
  const auto& r = default_ruleset();
  CHECK(apply_semantic_map("raises concern", r) == "RISK");
  CHECK(apply_semantic_map("no evidence of", r) == "NEGEX");
  CHECK(apply_semantic_map("cannot rule out sepsis", r) == "RISK sepsis");
  CHECK(apply_semantic_map("rule out sepsis", r) == "NEGEX sepsis");
  CHECK(apply_semantic_map("on bili lights today", r) == "on phototherapy today");
  CHECK(apply_semantic_map("photo therapy", r) == "phototherapy");
  CHECK(apply_semantic_map("hyperbili", r) == "hyperbilirubinemia");
  CHECK(apply_semantic_map(clean("R/O sepsis"), r) == "NEGEX sepsis");
  // word boundaries: "temp" must not fire inside "temporal"
  CHECK(apply_semantic_map("temporal temp", r) == "temporal temperature");
}

TEST_CASE("rules: longest match, then earlier rule") {
  auto rules = RuleSet::parse("a b\tX\tliteral\na b c\tY\tliteral\nb c\tZ\tliteral\nb c\tW\tliteral\n");
  CHECK(rules.apply("a b c d") == "Y d");
  CHECK(rules.apply("a b d") == "X d");
  CHECK(rules.apply("q b c") == "q Z");
  // produced tokens are not re-scanned
  auto chain = RuleSet::parse("x\ty\tliteral\ny\tQ\tliteral\n");
  CHECK(chain.apply("x") == "y");
  CHECK(chain.apply("x y") == "y Q");
}

TEST_CASE("rule file errors name the line") {
  try {
    RuleSet::parse("# header\nok\tOK\tliteral\nbad(\tX\tregex\n", "r.tsv");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("r.tsv:3") != std::string::npos);
  }
  CHECK_THROWS_AS(RuleSet::parse("only one column\n"), ConfigError);
  CHECK_THROWS_AS(RuleSet::parse("a\tb c\tliteral\n"), ConfigError);
  CHECK_THROWS_AS(RuleSet::parse("a\tB\tfuzzy\n"), ConfigError);
}

TEST_CASE("shipped data files match the built-in defaults") {
  const std::string dir = NOTECODER_DATA_DIR;
  CHECK(read_text_file(dir + "/rules_seed.tsv") == default_ruleset_tsv());
  CHECK(read_text_file(dir + "/stopwords_en.txt") == default_stop_words_text());
  CHECK(load_stop_words(dir + "/stopwords_en.txt") == default_stop_words());
  CHECK(RuleSet::load(dir + "/rules_seed.tsv").rules().size() == default_ruleset().rules().size());
}

TEST_CASE("handle_negation") {
  const std::vector<Phrase> cues = {{"no"}, {"rule", "out"}};
  CHECK(handle_negation({"NEGEX", "jaundice", "noted", "today", "feeding"}, cues, 3) == TS{"NEGEX", "feeding"});
  CHECK(handle_negation({"no", "jaundice"}, cues, 3) == TS{"NEGEX"});
  CHECK(handle_negation({"feeding", "well"}, cues, 3) == TS{"feeding", "well"});
  CHECK(handle_negation({"a", "rule", "out", "sepsis", "b"}, cues, 1) == TS{"a", "NEGEX", "b"});
  CHECK(handle_negation({"no", "x", "no", "y", "z"}, cues, 0) == TS{"NEGEX", "x", "NEGEX", "y", "z"});
  // a cue inside a dropped window is dropped with it
  CHECK(handle_negation({"no", "no", "a", "b"}, cues, 1) == TS{"NEGEX", "a", "b"});
}

TEST_CASE("handle_negation never grows and removes a bounded number of tokens") {
  Rng rng(17);
  const std::vector<std::string> words = {"no", "rule", "out", "a", "b", "NEGEX", "c"};
  const std::vector<Phrase> cues = {{"no"}, {"rule", "out"}};
  for (int t = 0; t < 500; ++t) {
    TS s;
    const auto n = rng.index(20);
    for (std::size_t i = 0; i < n; ++i) s.push_back(words[rng.index(words.size())]);
    const std::size_t window = rng.index(5);
    const auto out = handle_negation(s, cues, window);
    CHECK(out.size() <= s.size());
    const auto negex = static_cast<std::size_t>(std::count(out.begin(), out.end(), std::string(kNegationToken)));
    // each cue occurrence costs at most window + (cue length - 1) tokens
    CHECK(s.size() - out.size() <= negex * (window + 1));
  }
}

TEST_CASE("remove_stop_words") {
  const std::unordered_set<std::string> stop(default_stop_words().begin(), default_stop_words().end());
  CHECK(remove_stop_words({"the", "patient", "is"}, stop) == TS{"patient"});
  CHECK(remove_stop_words({}, stop).empty());
  CHECK(remove_stop_words({"bilirubin", "rising"}, stop) == TS{"bilirubin", "rising"});

  Rng rng(8);
  const std::vector<std::string> words = {"the", "a", "bili", "is", "x", "y"};
  for (int t = 0; t < 200; ++t) {
    TS s;
    for (std::size_t i = 0, n = rng.index(15); i < n; ++i) s.push_back(words[rng.index(words.size())]);
    const auto out = remove_stop_words(s, stop);
    // subsequence check
    std::size_t j = 0;
    for (std::size_t i = 0; i < s.size() && j < out.size(); ++i) j += s[i] == out[j];
    CHECK(j == out.size());
  }
}

TEST_CASE("npmi fixtures") {
  CHECK(npmi(4, 4, 4, 8) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(npmi(2, 4, 4, 8)) < 1e-12);
  CHECK(npmi(1, 4, 4, 8) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(npmi(1, 8, 8, 16) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(npmi(3, 3, 3, 3) == 1.0);
}

TEST_CASE("npmi over streams") {
  PairStats stats;
  for (int i = 0; i < 10; ++i) stats.add({"heart", "attack"});
  CHECK(stats.total == 10);
  CHECK(npmi("heart", "attack", stats) == 1.0);

  PairStats a, b, both;
  a.add({"x", "y", "z"});
  b.add({"y", "z", "x", "y"});
  both.add({"x", "y", "z"});
  both.add({"y", "z", "x", "y"});
  a.merge(b);
  CHECK(a.total == both.total);
  CHECK(a.pair_counts == both.pair_counts);
  CHECK(a.left_counts == both.left_counts);
  CHECK(a.right_counts == both.right_counts);
}

TEST_CASE("npmi stays in (-1, 1]") {
  Rng rng(1234);
  for (int t = 0; t < 1000; ++t) {
    const std::uint64_t total = 1 + rng.index(1000);
    const std::uint64_t left = 1 + rng.index(total);
    const std::uint64_t right = 1 + rng.index(total);
    // a pair can occur no more often than either of its marginals, and
    // left + right - pair cannot exceed the bigram total
    const std::uint64_t hi = std::min(left, right);
    const std::uint64_t lo = left + right > total ? left + right - total : 1;
    if (lo > hi) continue;
    const std::uint64_t pair = lo + rng.index(hi - lo + 1);
    const double v = npmi(pair, left, right, total);
    CHECK(v > -1.0);
    CHECK(v <= 1.0 + 1e-12);
    const bool perfect = pair == left && pair == right;
    CHECK((std::abs(v - 1.0) < 1e-12) == perfect);
  }
}

TEST_CASE("collocations") {
  SUBCASE("heart attack") {
    std::vector<TS> corpus(10, TS{"heart", "attack"});
    auto r = detect_and_merge_collocations(corpus, 0.5, 5, 1);
    for (const auto& s : r.corpus) CHECK(s == TS{"heart_attack"});
    REQUIRE(r.model.passes.size() == 1);
    CHECK(r.model.passes[0].size() == 1);
  }
  SUBCASE("threshold 1 rejects imperfect pairs") {
    std::vector<TS> corpus;
    for (int i = 0; i < 10; ++i) corpus.push_back(i % 2 ? TS{"heart", "attack"} : TS{"heart", "rate"});
    auto r = detect_and_merge_collocations(corpus, 1.0, 1, 1);
    CHECK(r.corpus == corpus);
  }
  SUBCASE("greedy non-overlap") {
    std::vector<TS> corpus(10, TS{"a", "b", "b", "a"});
    auto r = detect_and_merge_collocations(corpus, -1.0, 1, 1);
    for (const auto& s : r.corpus) CHECK(s == TS{"a_b", "b_a"});
  }
  SUBCASE("min count") {
    std::vector<TS> corpus(4, TS{"heart", "attack"});
    auto r = detect_and_merge_collocations(corpus, 0.5, 5, 1);
    CHECK(r.corpus == corpus);
    CHECK(r.model.empty());
  }
  SUBCASE("second pass builds trigrams") {
    std::vector<TS> corpus(10, TS{"car", "seat", "test"});
    auto r = detect_and_merge_collocations(corpus, 0.5, 5, 2);
    for (const auto& s : r.corpus) CHECK(s.size() == 1);
  }
  SUBCASE("model applies to new streams and round-trips") {
    std::vector<TS> corpus(10, TS{"heart", "attack", "today"});
    auto r = detect_and_merge_collocations(corpus, 0.5, 5, 1);
    const TS fresh = {"x", "heart", "attack", "heart"};
    const auto back = CollocationModel::from_tsv(r.model.to_tsv());
    CHECK(back.apply(fresh) == r.model.apply(fresh));
    CHECK(back.to_tsv() == r.model.to_tsv());
  }
}

TEST_CASE("run_pipeline") {
  const Noteset note{"1", "No evidence of jaundice today. Bili 4.1.", false};
  PipelineConfig c;
  CHECK(run_pipeline(note, c, default_ruleset(), {}) == TS{"NEGEX"});
  c.negation_window = 2;
  CHECK(run_pipeline(note, c, default_ruleset(), {}) == TS{"NEGEX", "bili"});

  PipelineConfig off;
  off.clean = off.semantic_map = off.stem = off.negation = off.stop_words = off.collocations = false;
  off.lowercase = false;
  CHECK(run_pipeline({"1", "The  Baby, 9.2\tok", false}, off, default_ruleset(), {}) ==
        TS{"The", "Baby,", "9.2", "ok"});

  Pipeline p;
  const std::string raw = "Neonate under bili lights; cannot rule out sepsis. The patient is stable.";
  CHECK(p.pre_collocation(raw) == p.pre_collocation(raw));
  CHECK(p.pre_collocation(raw) == TS{"neonat", "phototherapi", "RISK", "sepsi", "patient", "stabl"});
}

TEST_CASE("pipeline cues follow token normalization") {
  Pipeline p;
  std::set<Phrase> cues(p.cues().begin(), p.cues().end());
  CHECK(cues.count({"no"}));
  CHECK(handle_negation({"NEGEX", "a", "b"}, p.cues(), 1) == TS{"NEGEX", "b"});
  CHECK(cues.count({"deni"}));  // "denies" as stemmed
}

TEST_CASE("pipeline output tokens are well formed") {
  SyntheticConfig c;
  c.n_positive = 10;
  c.n_negative = 10;
  Pipeline p;
  std::vector<TS> streams;
  for (const auto& s : generate_synthetic(c)) streams.push_back(p.pre_collocation(s.text));
  const auto coll = p.fit_collocations(streams);
  for (const auto& s : streams) {
    for (const auto& tok : coll.apply(s)) {
      CHECK(!tok.empty());
      for (char ch : tok) CHECK((std::isalpha(static_cast<unsigned char>(ch)) || ch == '_'));
    }
  }
}

TEST_CASE("pipeline reduces vocabulary on note text") {
  SyntheticConfig c;
  c.n_positive = 30;
  c.n_negative = 30;
  Pipeline p;
  std::set<std::string> raw_vocab, out_vocab;
  std::vector<TS> streams;
  for (const auto& s : generate_synthetic(c)) {
    for (auto& t : tokenize(clean(s.text))) raw_vocab.insert(t);
    streams.push_back(p.pre_collocation(s.text));
  }
  const auto coll = p.fit_collocations(streams);
  for (const auto& s : streams) {
    for (const auto& t : coll.apply(s)) out_vocab.insert(t);
  }
  CHECK(out_vocab.size() < raw_vocab.size());
}

TEST_CASE("pipeline config validation") {
  PipelineConfig c;
  c.min_pair_count = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.npmi_threshold = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
