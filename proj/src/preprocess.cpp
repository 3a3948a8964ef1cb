#include "notecoder/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "notecoder/error.hpp"
#include "notecoder/io.hpp"
#include "notecoder/stemmer.hpp"

namespace notecoder {

namespace detail {
extern const std::string_view kDefaultRulesTsv;
extern const std::string_view kDefaultStopWords;
}  // namespace detail

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = lower(c);
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (lower(a[i]) != lower(b[i])) return false;
  }
  return true;
}

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

// whitespace-delimited words with their byte offsets
struct Word {
  std::string_view text;
  std::size_t begin;
  std::size_t end;
};

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i >= text.size()) break;
    auto start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    words.push_back({text.substr(start, i - start), start, i});
  }
  return words;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string clean(std::string_view raw, bool lowercase_text, const std::optional<std::regex>& deid) {
  std::string stripped;
  if (deid) {
    stripped = std::regex_replace(std::string(raw), *deid, " ");
  } else {
    stripped.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw.compare(i, 3, "[**") == 0) {
        auto close = raw.find("**]", i + 3);
        if (close != std::string_view::npos) {
          stripped.push_back(' ');
          i = close + 3;
          continue;
        }
      }
      stripped.push_back(raw[i++]);
    }
  }

  std::string out;
  out.reserve(stripped.size());
  bool pending_space = false;
  for (char c : stripped) {
    if (is_digit(c)) continue;
    if (is_alpha(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(lowercase_text ? lower(c) : c);
    } else {
      pending_space = true;
    }
  }
  return out;
}

TokenStream tokenize(std::string_view text) {
  TokenStream tokens;
  for (const auto& w : split_words(text)) tokens.emplace_back(w.text);
  return tokens;
}

// ---------------------------------------------------------------------------

void RuleSet::add(Rule rule) {
  auto fail = [&](const std::string& what) {
    throw ConfigError("rule on line " + std::to_string(rule.line) + " (\"" + rule.pattern + "\"): " + what);
  };
  if (rule.pattern.empty()) fail("empty pattern");
  if (rule.replacement.empty()) fail("empty replacement");
  if (std::any_of(rule.replacement.begin(), rule.replacement.end(), is_space)) {
    fail("replacement must be a single token");
  }

  Compiled compiled;
  if (rule.kind == RuleKind::literal) {
    compiled.words = tokenize(clean(rule.pattern, true));
    if (compiled.words.empty()) fail("pattern has no words after cleaning");
    by_first_word_[compiled.words.front()].push_back(rules_.size());
  } else {
    try {
      compiled.regex.emplace(rule.pattern, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    } catch (const std::regex_error& e) {
      fail(std::string("invalid regex: ") + e.what());
    }
    regex_rules_.push_back(rules_.size());
  }
  rules_.push_back(std::move(rule));
  compiled_.push_back(std::move(compiled));
}

RuleSet RuleSet::parse(std::string_view tsv, const std::string& source) {
  RuleSet set;
  auto lines = split_lines(tsv);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    auto line = lines[n];
    auto content = trim_view(line);
    if (content.empty() || content.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    const auto where = source + ":" + std::to_string(n + 1);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ConfigError(where + ": expected pattern<TAB>replacement[<TAB>kind], got " +
                        std::to_string(fields.size()) + " field(s)");
    }
    Rule rule;
    rule.pattern = std::string(trim_view(fields[0]));
    rule.replacement = std::string(trim_view(fields[1]));
    rule.line = n + 1;
    const auto kind = fields.size() == 3 ? trim_view(fields[2]) : std::string_view("literal");
    if (kind == "literal") {
      rule.kind = RuleKind::literal;
    } else if (kind == "regex") {
      rule.kind = RuleKind::regex;
    } else {
      throw ConfigError(where + ": unknown rule kind \"" + std::string(kind) + "\" (expected literal or regex)");
    }
    try {
      set.add(std::move(rule));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return set;
}

RuleSet RuleSet::load(const std::filesystem::path& path) { return parse(read_text_file(path), path.string()); }

std::string RuleSet::apply(std::string_view text) const {
  const auto words = split_words(text);
  std::string out;
  out.reserve(text.size());
  auto emit = [&](std::string_view token) {
    if (!out.empty()) out.push_back(' ');
    out += token;
  };

  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t best_rule = rules_.size();
    std::size_t best_chars = 0;
    std::size_t best_words = 0;
    auto consider = [&](std::size_t rule, std::size_t chars, std::size_t n_words) {
      if (chars > best_chars || (chars == best_chars && chars > 0 && rule < best_rule)) {
        best_rule = rule;
        best_chars = chars;
        best_words = n_words;
      }
    };

    if (auto it = by_first_word_.find(lowercase(words[i].text)); it != by_first_word_.end()) {
      for (auto r : it->second) {
        const auto& pattern = compiled_[r].words;
        if (i + pattern.size() > words.size()) continue;
        bool match = true;
        for (std::size_t k = 0; k < pattern.size() && match; ++k) match = iequals(words[i + k].text, pattern[k]);
        if (match) consider(r, words[i + pattern.size() - 1].end - words[i].begin, pattern.size());
      }
    }

    for (auto r : regex_rules_) {
      std::match_results<std::string_view::const_iterator> m;
      auto flags = std::regex_constants::match_continuous;
      if (words[i].begin > 0) flags |= std::regex_constants::match_prev_avail;
      if (!std::regex_search(text.begin() + static_cast<std::ptrdiff_t>(words[i].begin), text.end(), m,
                             *compiled_[r].regex, flags)) {
        continue;
      }
      const auto len = static_cast<std::size_t>(m.length(0));
      if (len == 0) continue;
      const auto end = words[i].begin + len;
      // must stop exactly at the end of some word
      std::size_t j = i;
      while (j < words.size() && words[j].end < end) ++j;
      if (j < words.size() && words[j].end == end) consider(r, len, j - i + 1);
    }

    if (best_rule < rules_.size()) {
      emit(rules_[best_rule].replacement);
      i += best_words;
    } else {
      emit(words[i].text);
      ++i;
    }
  }
  return out;
}

const RuleSet& default_ruleset() {
  static const RuleSet rules = RuleSet::parse(detail::kDefaultRulesTsv, "rules_seed.tsv");
  return rules;
}

std::string_view default_ruleset_tsv() { return detail::kDefaultRulesTsv; }

std::string apply_semantic_map(std::string_view text, const RuleSet& rules) { return rules.apply(text); }

// ---------------------------------------------------------------------------

TokenStream handle_negation(const TokenStream& stream, const std::vector<Phrase>& cues, std::size_t window) {
  TokenStream out;
  out.reserve(stream.size());
  std::size_t i = 0;
  const auto n = stream.size();
  while (i < n) {
    std::size_t cue_len = stream[i] == kNegationToken ? 1 : 0;
    for (const auto& cue : cues) {
      if (cue.empty() || cue.size() <= cue_len || i + cue.size() > n) continue;
      if (std::equal(cue.begin(), cue.end(), stream.begin() + static_cast<std::ptrdiff_t>(i))) cue_len = cue.size();
    }
    if (cue_len == 0) {
      out.push_back(stream[i]);
      ++i;
      continue;
    }
    out.emplace_back(kNegationToken);
    i += cue_len;
    i += std::min(window, n - i);
  }
  return out;
}

TokenStream remove_stop_words(const TokenStream& stream, const std::unordered_set<std::string>& stop_list) {
  TokenStream out;
  out.reserve(stream.size());
  for (const auto& t : stream) {
    if (!stop_list.count(t)) out.push_back(t);
  }
  return out;
}

namespace {

std::vector<std::string> parse_stop_words(std::string_view text) {
  std::vector<std::string> words;
  for (auto line : split_lines(text)) {
    auto t = trim_view(line);
    if (t.empty() || t.front() == '#') continue;
    words.emplace_back(t);
  }
  return words;
}

}  // namespace

const std::vector<std::string>& default_stop_words() {
  static const std::vector<std::string> words = parse_stop_words(detail::kDefaultStopWords);
  return words;
}

std::string_view default_stop_words_text() { return detail::kDefaultStopWords; }

std::vector<std::string> load_stop_words(const std::filesystem::path& path) {
  return parse_stop_words(read_text_file(path));
}

// ---------------------------------------------------------------------------

void PairStats::add(const TokenStream& stream) {
  for (std::size_t i = 0; i + 1 < stream.size(); ++i) {
    ++pair_counts[{stream[i], stream[i + 1]}];
    ++left_counts[stream[i]];
    ++right_counts[stream[i + 1]];
    ++total;
  }
}

void PairStats::merge(const PairStats& other) {
  for (const auto& [k, v] : other.pair_counts) pair_counts[k] += v;
  for (const auto& [k, v] : other.left_counts) left_counts[k] += v;
  for (const auto& [k, v] : other.right_counts) right_counts[k] += v;
  total += other.total;
}

std::uint64_t PairStats::pair_count(const std::string& x, const std::string& y) const {
  auto it = pair_counts.find({x, y});
  return it == pair_counts.end() ? 0 : it->second;
}

double npmi(std::uint64_t pair_count, std::uint64_t left_count, std::uint64_t right_count, std::uint64_t total) {
  if (pair_count == 0) throw std::invalid_argument("npmi: pair count must be >= 1");
  if (pair_count > left_count || pair_count > right_count || left_count > total || right_count > total) {
    throw std::invalid_argument("npmi: inconsistent counts");
  }
  // p(x,y) == p(x) == p(y) (covers p(x,y) == 1)
  if (pair_count == left_count && pair_count == right_count) return 1.0;
  const double c_xy = static_cast<double>(pair_count);
  const double t = static_cast<double>(total);
  const double pmi = std::log((c_xy * t) / (static_cast<double>(left_count) * static_cast<double>(right_count)));
  return pmi / std::log(t / c_xy);
}

double npmi(const std::string& x, const std::string& y, const PairStats& stats) {
  auto count_of = [](const auto& map, const std::string& key) -> std::uint64_t {
    auto it = map.find(key);
    return it == map.end() ? 0 : it->second;
  };
  return npmi(stats.pair_count(x, y), count_of(stats.left_counts, x), count_of(stats.right_counts, y), stats.total);
}

TokenStream merge_pairs(const TokenStream& stream, const std::unordered_set<TokenPair, TokenPairHash>& selected) {
  if (selected.empty()) return stream;
  TokenStream out;
  out.reserve(stream.size());
  std::size_t i = 0;
  while (i < stream.size()) {
    if (i + 1 < stream.size() && selected.count({stream[i], stream[i + 1]})) {
      out.push_back(stream[i] + "_" + stream[i + 1]);
      i += 2;
    } else {
      out.push_back(stream[i]);
      ++i;
    }
  }
  return out;
}

bool CollocationModel::empty() const {
  return std::all_of(passes.begin(), passes.end(), [](const auto& p) { return p.empty(); });
}

TokenStream CollocationModel::apply(const TokenStream& stream) const {
  TokenStream current = stream;
  for (const auto& pass : passes) {
    std::unordered_set<TokenPair, TokenPairHash> selected;
    for (const auto& c : pass) selected.insert({c.first, c.second});
    current = merge_pairs(current, selected);
  }
  return current;
}

std::string CollocationModel::to_tsv() const {
  std::string out = "pass\tfirst\tsecond\tcount\tnpmi\n";
  for (std::size_t p = 0; p < passes.size(); ++p) {
    for (const auto& c : passes[p]) {
      out += std::to_string(p) + "\t" + c.first + "\t" + c.second + "\t" + std::to_string(c.count) + "\t" +
             format_double(c.npmi) + "\n";
    }
  }
  return out;
}

CollocationModel CollocationModel::from_tsv(std::string_view tsv, const std::string& source) {
  CollocationModel model;
  auto lines = split_lines(tsv);
  bool header = true;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim_view(lines[n]).empty()) continue;
    if (header) {
      header = false;
      if (lines[n].rfind("pass\t", 0) == 0) continue;
    }
    std::vector<std::string> f;
    std::string field;
    std::istringstream ss{std::string(lines[n])};
    while (std::getline(ss, field, '\t')) f.push_back(field);
    const auto where = source + ":" + std::to_string(n + 1);
    if (f.size() != 5) throw DataError(where + ": expected 5 tab-separated fields");
    std::size_t pass = 0;
    Collocation c;
    c.first = f[1];
    c.second = f[2];
    auto ok = [](const std::string& s, auto& value) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      return ec == std::errc() && ptr == s.data() + s.size();
    };
    if (!ok(f[0], pass) || !ok(f[3], c.count) || !ok(f[4], c.npmi)) throw DataError(where + ": malformed number");
    if (model.passes.size() <= pass) model.passes.resize(pass + 1);
    model.passes[pass].push_back(std::move(c));
  }
  return model;
}

CollocationResult detect_and_merge_collocations(std::vector<TokenStream> corpus, double threshold,
                                                std::uint64_t min_pair_count, std::size_t passes) {
  CollocationResult result;
  for (std::size_t p = 0; p < passes; ++p) {
    PairStats stats;
    for (const auto& s : corpus) stats.add(s);

    std::vector<Collocation> selected;
    for (const auto& [pair, count] : stats.pair_counts) {
      if (count < min_pair_count) continue;
      const double score =
          npmi(count, stats.left_counts.at(pair.first), stats.right_counts.at(pair.second), stats.total);
      if (score >= threshold) selected.push_back({pair.first, pair.second, count, score});
    }
    if (selected.empty()) break;
    std::sort(selected.begin(), selected.end(), [](const Collocation& a, const Collocation& b) {
      return std::tie(a.first, a.second) < std::tie(b.first, b.second);
    });

    std::unordered_set<TokenPair, TokenPairHash> set;
    for (const auto& c : selected) set.insert({c.first, c.second});
    for (auto& s : corpus) s = merge_pairs(s, set);
    result.model.passes.push_back(std::move(selected));
  }
  result.corpus = std::move(corpus);
  return result;
}

// ---------------------------------------------------------------------------

void PipelineConfig::validate() const {
  if (min_pair_count < 1) throw ConfigError("min_pair_count must be >= 1");
  if (!(npmi_threshold > -1.0 && npmi_threshold <= 1.0)) throw ConfigError("npmi_threshold must lie in (-1, 1]");
  if (!deid_regex.empty()) {
    try {
      std::regex re(deid_regex);
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid deid_regex: " + std::string(e.what()));
    }
  }
}

Pipeline::Pipeline(PipelineConfig config, RuleSet rules, std::vector<std::string> stop_words)
    : config_(std::move(config)), rules_(std::move(rules)), stop_words_(std::move(stop_words)) {
  prepare();
}

Pipeline::Pipeline(PipelineConfig config) : Pipeline(std::move(config), default_ruleset(), default_stop_words()) {}

void Pipeline::prepare() {
  config_.validate();
  if (!config_.deid_regex.empty()) deid_.emplace(config_.deid_regex);

  // cue phrases get the same clean/stem treatment as note tokens
  auto normalize = [&](std::string_view phrase) {
    auto words = tokenize(config_.clean ? clean(phrase, config_.lowercase) : std::string(phrase));
    if (config_.stem) {
      for (auto& w : words) w = stem(w);
    }
    return words;
  };
  std::vector<std::string> phrases = config_.negation_cues;
  for (const auto& r : rules_.rules()) {
    if (r.kind == RuleKind::literal && r.replacement == kNegationToken) phrases.push_back(r.pattern);
  }
  for (const auto& p : phrases) {
    auto words = normalize(p);
    if (!words.empty() && std::find(cues_.begin(), cues_.end(), words) == cues_.end()) cues_.push_back(std::move(words));
  }

  for (const auto& w : stop_words_) {
    stop_set_.insert(w);
    if (config_.stem) stop_set_.insert(stem(w));
  }
}

TokenStream Pipeline::pre_collocation(std::string_view raw) const {
  std::string text = config_.clean ? clean(raw, config_.lowercase, deid_) : std::string(raw);
  if (config_.semantic_map) text = rules_.apply(text);
  auto tokens = tokenize(text);
  if (config_.stem) {
    for (auto& t : tokens) t = stem(t);
  }
  if (config_.negation) tokens = handle_negation(tokens, cues_, config_.negation_window);
  if (config_.stop_words) tokens = remove_stop_words(tokens, stop_set_);
  return tokens;
}

TokenStream Pipeline::run(std::string_view raw, const CollocationModel& collocations) const {
  auto tokens = pre_collocation(raw);
  if (config_.collocations) tokens = collocations.apply(tokens);
  return tokens;
}

CollocationModel Pipeline::fit_collocations(const std::vector<TokenStream>& streams) const {
  if (!config_.collocations) return {};
  return detect_and_merge_collocations(streams, config_.npmi_threshold, config_.min_pair_count,
                                       config_.collocation_passes)
      .model;
}

TokenStream run_pipeline(const Noteset& noteset, const PipelineConfig& config, const RuleSet& rules,
                         const CollocationModel& collocations) {
  Pipeline pipeline(config, rules, default_stop_words());
  return pipeline.run(noteset.text, collocations);
}

}  // namespace notecoder
