#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "notecoder/corpus.hpp"

namespace notecoder {

using TokenStream = std::vector<std::string>;

/// Token emitted for negation phrases, both by semantic-map rules and by cue handling.
inline constexpr std::string_view kNegationToken = "NEGEX";

// ---------------------------------------------------------------------------
// Cleaning and tokenization

/// Removes de-identification markers (`[** ... **]`, or matches of `deid` when
/// given), then deletes digits, turns every other non-letter into a space,
/// optionally lowercases, and collapses whitespace. Idempotent.
std::string clean(std::string_view raw, bool lowercase = true, const std::optional<std::regex>& deid = std::nullopt);

/// Whitespace split; never yields empty tokens.
TokenStream tokenize(std::string_view text);

// ---------------------------------------------------------------------------
// Semantic mapping

enum class RuleKind { literal, regex };

struct Rule {
  std::string pattern;
  std::string replacement;
  RuleKind kind = RuleKind::literal;
  std::size_t line = 0;  // source line, for diagnostics
};

/// Ordered phrase -> token replacement rules.
///
/// Literal patterns are matched word-by-word (ASCII case-insensitive) on
/// cleaned text, so "r/o" in a rules file matches the cleaned "r o". Regex
/// patterns are ECMAScript, case-insensitive, and must start and end on word
/// boundaries of the cleaned text. At each word the longest match wins; equal
/// lengths go to the earlier rule. Produced tokens are never re-scanned.
class RuleSet {
 public:
  RuleSet() = default;

  /// TSV: pattern <TAB> replacement <TAB> kind(literal|regex); '#' comments.
  /// Throws ConfigError naming the offending line.
  static RuleSet parse(std::string_view tsv, const std::string& source = "<rules>");
  static RuleSet load(const std::filesystem::path& path);

  void add(Rule rule);
  const std::vector<Rule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

  std::string apply(std::string_view cleaned_text) const;

 private:
  struct Compiled {
    std::vector<std::string> words;  // lowercased literal words
    std::optional<std::regex> regex;
  };

  std::vector<Rule> rules_;
  std::vector<Compiled> compiled_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_word_;
  std::vector<std::size_t> regex_rules_;
};

/// Rules shipped with the library (also in data/rules_seed.tsv).
const RuleSet& default_ruleset();
std::string_view default_ruleset_tsv();

std::string apply_semantic_map(std::string_view text, const RuleSet& rules);

// ---------------------------------------------------------------------------
// Negation and stop words

using Phrase = std::vector<std::string>;

/// Each cue occurrence becomes a single NEGEX token and the next `window`
/// tokens are dropped. NEGEX itself is always a cue. Multi-word cues match
/// longest-first; scanning resumes after the dropped window.
TokenStream handle_negation(const TokenStream& stream, const std::vector<Phrase>& cues, std::size_t window);

TokenStream remove_stop_words(const TokenStream& stream, const std::unordered_set<std::string>& stop_list);

/// English stop list shipped with the library (also in data/stopwords_en.txt).
const std::vector<std::string>& default_stop_words();
std::string_view default_stop_words_text();

/// One token per line; blank lines and '#' comments skipped.
std::vector<std::string> load_stop_words(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Collocations

using TokenPair = std::pair<std::string, std::string>;

struct TokenPairHash {
  std::size_t operator()(const TokenPair& p) const noexcept {
    const auto h1 = std::hash<std::string>{}(p.first);
    const auto h2 = std::hash<std::string>{}(p.second);
    return h1 ^ (h2 + 0x9E3779B97F4A7C15ULL + (h1 << 6) + (h1 >> 2));
  }
};

/// Adjacent-bigram statistics. p(x,y) = c(x,y)/T; the marginals use the
/// bigram positions: p(x) = (bigrams starting with x)/T and
/// p(y) = (bigrams ending with y)/T, which keeps NPMI within [-1, 1].
struct PairStats {
  std::unordered_map<TokenPair, std::uint64_t, TokenPairHash> pair_counts;
  std::unordered_map<std::string, std::uint64_t> left_counts;
  std::unordered_map<std::string, std::uint64_t> right_counts;
  std::uint64_t total = 0;

  void add(const TokenStream& stream);
  /// Sum of partial counts.
  void merge(const PairStats& other);

  std::uint64_t pair_count(const std::string& x, const std::string& y) const;
};

/// Normalized PMI from raw counts. Requires pair_count >= 1. When
/// p(x,y) == 1 the value is 1 by continuity.
double npmi(std::uint64_t pair_count, std::uint64_t left_count, std::uint64_t right_count, std::uint64_t total);
double npmi(const std::string& x, const std::string& y, const PairStats& stats);

struct Collocation {
  std::string first;
  std::string second;
  std::uint64_t count = 0;
  double npmi = 0.0;

  std::string merged() const { return first + "_" + second; }
};

/// Selected pairs per merge pass, applied in order.
class CollocationModel {
 public:
  std::vector<std::vector<Collocation>> passes;

  bool empty() const;
  /// Greedy left-to-right, non-overlapping merge, pass by pass.
  TokenStream apply(const TokenStream& stream) const;

  /// TSV with header `pass first second count npmi`.
  std::string to_tsv() const;
  static CollocationModel from_tsv(std::string_view tsv, const std::string& source = "<collocations>");
};

/// Merges every selected pair in one greedy left-to-right pass.
TokenStream merge_pairs(const TokenStream& stream,
                        const std::unordered_set<TokenPair, TokenPairHash>& selected);

struct CollocationResult {
  std::vector<TokenStream> corpus;
  CollocationModel model;
};

/// Counts adjacent pairs over the corpus, selects pairs with count >=
/// min_pair_count and npmi >= threshold, merges them, and repeats `passes` times.
CollocationResult detect_and_merge_collocations(std::vector<TokenStream> corpus, double threshold,
                                                std::uint64_t min_pair_count, std::size_t passes);

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineConfig {
  bool clean = true;
  bool semantic_map = true;
  bool stem = true;
  bool negation = true;
  bool stop_words = true;
  bool collocations = true;
  bool lowercase = true;

  std::size_t negation_window = 3;
  std::vector<std::string> negation_cues = {"no", "not", "without", "denies"};
  double npmi_threshold = 0.5;
  std::uint64_t min_pair_count = 5;
  std::size_t collocation_passes = 1;
  /// Regex for de-identification spans; empty means the `[** ... **]` form.
  std::string deid_regex;

  void validate() const;
};

/// Stage composition: clean -> semantic map -> tokenize -> stem ->
/// negation -> stop words -> collocation merge. Disabled stages are identity.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, RuleSet rules, std::vector<std::string> stop_words);
  /// Default rules and stop list.
  explicit Pipeline(PipelineConfig config = {});

  const PipelineConfig& config() const { return config_; }
  const RuleSet& rules() const { return rules_; }

  /// Every stage before collocation merging.
  TokenStream pre_collocation(std::string_view raw) const;

  TokenStream run(std::string_view raw, const CollocationModel& collocations) const;

  /// Collocation model fit over already pre-processed streams; empty when the stage is disabled.
  CollocationModel fit_collocations(const std::vector<TokenStream>& streams) const;

  /// Cue phrases after the same normalization the tokens receive.
  const std::vector<Phrase>& cues() const { return cues_; }
  const std::unordered_set<std::string>& stop_set() const { return stop_set_; }

 private:
  void prepare();

  PipelineConfig config_;
  RuleSet rules_;
  std::vector<std::string> stop_words_;
  std::optional<std::regex> deid_;
  std::vector<Phrase> cues_;
  std::unordered_set<std::string> stop_set_;
};

TokenStream run_pipeline(const Noteset& noteset, const PipelineConfig& config, const RuleSet& rules,
                         const CollocationModel& collocations);

}  // namespace notecoder
