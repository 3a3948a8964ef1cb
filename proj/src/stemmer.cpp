#include "notecoder/stemmer.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <utility>

namespace notecoder {

namespace {

bool is_vowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
      return true;
    default:
      return false;
  }
}

bool is_vowel_wxy(char c) { return is_vowel(c) || c == 'w' || c == 'x' || c == 'Y'; }

bool is_valid_li(char c) {
  switch (c) {
    case 'c': case 'd': case 'e': case 'g': case 'h': case 'k': case 'm': case 'n': case 'r': case 't':
      return true;
    default:
      return false;
  }
}

bool ends_with(const std::string& w, std::string_view suffix) {
  return w.size() >= suffix.size() && std::string_view(w).substr(w.size() - suffix.size()) == suffix;
}

/// Longest entry of `suffixes` that ends `w`, or npos.
template <std::size_t N>
std::size_t longest_suffix(const std::string& w, const std::array<std::string_view, N>& suffixes) {
  std::size_t best = std::string::npos;
  for (std::size_t i = 0; i < N; ++i) {
    if (ends_with(w, suffixes[i]) && (best == std::string::npos || suffixes[i].size() > suffixes[best].size())) {
      best = i;
    }
  }
  return best;
}

class Porter2 {
 public:
  explicit Porter2(std::string word) : w_(std::move(word)) {}

  std::string run() {
    prelude();
    mark_regions();
    step_1a();
    if (!exception2()) {
      step_1b();
      step_1c();
      step_2();
      step_3();
      step_4();
      step_5();
    }
    if (y_found_) std::replace(w_.begin(), w_.end(), 'Y', 'y');
    return std::move(w_);
  }

 private:
  void prelude() {
    if (!w_.empty() && w_[0] == '\'') w_.erase(0, 1);
    if (!w_.empty() && w_[0] == 'y') {
      w_[0] = 'Y';
      y_found_ = true;
    }
    for (std::size_t i = 1; i < w_.size(); ++i) {
      if (w_[i] == 'y' && is_vowel(w_[i - 1])) {
        w_[i] = 'Y';
        y_found_ = true;
      }
    }
  }

  // position just past the first non-vowel that follows a vowel, searching from `from`
  std::size_t region_after(std::size_t from) const {
    std::size_t i = from;
    while (i < w_.size() && !is_vowel(w_[i])) ++i;
    if (i >= w_.size()) return w_.size();
    ++i;
    while (i < w_.size() && is_vowel(w_[i])) ++i;
    if (i >= w_.size()) return w_.size();
    return i + 1;
  }

  void mark_regions() {
    static constexpr std::array<std::string_view, 3> special = {"gener", "commun", "arsen"};
    p1_ = std::string::npos;
    for (auto prefix : special) {
      if (std::string_view(w_).substr(0, prefix.size()) == prefix) {
        p1_ = prefix.size();
        break;
      }
    }
    if (p1_ == std::string::npos) p1_ = region_after(0);
    p2_ = p1_ >= w_.size() ? w_.size() : region_after(p1_);
  }

  std::size_t suffix_start(std::string_view suffix) const { return w_.size() - suffix.size(); }
  bool in_r1(std::string_view suffix) const { return suffix_start(suffix) >= p1_; }
  bool in_r2(std::string_view suffix) const { return suffix_start(suffix) >= p2_; }

  void replace_suffix(std::string_view suffix, std::string_view with) {
    w_.replace(suffix_start(suffix), suffix.size(), with);
  }

  bool has_vowel(std::size_t end) const {
    return std::any_of(w_.begin(), w_.begin() + static_cast<std::ptrdiff_t>(end), is_vowel);
  }

  // short syllable ending at position `end` (exclusive)
  bool short_syllable_at(std::size_t end) const {
    if (end >= 3 && !is_vowel_wxy(w_[end - 1]) && is_vowel(w_[end - 2]) && !is_vowel(w_[end - 3])) return true;
    return end == 2 && !is_vowel(w_[1]) && is_vowel(w_[0]);
  }

  void step_1a() {
    static constexpr std::array<std::string_view, 3> apostrophes = {"'", "'s", "'s'"};
    if (auto i = longest_suffix(w_, apostrophes); i != std::string::npos) {
      w_.erase(suffix_start(apostrophes[i]));
    }
    static constexpr std::array<std::string_view, 6> suffixes = {"sses", "ied", "ies", "s", "us", "ss"};
    auto i = longest_suffix(w_, suffixes);
    if (i == std::string::npos) return;
    const auto suffix = suffixes[i];
    if (suffix == "sses") {
      replace_suffix(suffix, "ss");
    } else if (suffix == "ied" || suffix == "ies") {
      replace_suffix(suffix, suffix_start(suffix) >= 2 ? "i" : "ie");
    } else if (suffix == "s") {
      // a vowel somewhere before the letter preceding the s
      const auto start = suffix_start(suffix);
      if (start >= 2 && has_vowel(start - 1)) w_.erase(start);
    }
  }

  bool exception2() const {
    static constexpr std::array<std::string_view, 8> words = {"inning",  "outing", "canning", "herring",
                                                               "earring", "proceed", "exceed", "succeed"};
    return std::find(words.begin(), words.end(), w_) != words.end();
  }

  void step_1b() {
    static constexpr std::array<std::string_view, 6> suffixes = {"eed", "eedly", "ed", "edly", "ing", "ingly"};
    auto i = longest_suffix(w_, suffixes);
    if (i == std::string::npos) return;
    const auto suffix = suffixes[i];
    if (suffix == "eed" || suffix == "eedly") {
      if (in_r1(suffix)) replace_suffix(suffix, "ee");
      return;
    }
    if (!has_vowel(suffix_start(suffix))) return;
    w_.erase(suffix_start(suffix));
    if (ends_with(w_, "at") || ends_with(w_, "bl") || ends_with(w_, "iz")) {
      w_.push_back('e');
      return;
    }
    static constexpr std::array<std::string_view, 9> doubles = {"bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt"};
    if (longest_suffix(w_, doubles) != std::string::npos) {
      w_.pop_back();
      return;
    }
    if (w_.size() == p1_ && short_syllable_at(w_.size())) w_.push_back('e');
  }

  void step_1c() {
    const auto n = w_.size();
    if (n >= 3 && (w_[n - 1] == 'y' || w_[n - 1] == 'Y') && !is_vowel(w_[n - 2])) w_[n - 1] = 'i';
  }

  void step_2() {
    static constexpr std::array<std::string_view, 24> suffixes = {
        "tional", "enci",  "anci",    "abli",  "entli", "izer",    "ization", "ational",
        "ation",  "ator",  "alism",   "aliti", "alli",  "fulness", "ousli",   "ousness",
        "iveness", "iviti", "biliti", "bli",   "ogi",   "fulli",   "lessli",  "li"};
    auto i = longest_suffix(w_, suffixes);
    if (i == std::string::npos) return;
    const auto s = suffixes[i];
    if (!in_r1(s)) return;
    if (s == "tional") replace_suffix(s, "tion");
    else if (s == "enci") replace_suffix(s, "ence");
    else if (s == "anci") replace_suffix(s, "ance");
    else if (s == "abli") replace_suffix(s, "able");
    else if (s == "entli") replace_suffix(s, "ent");
    else if (s == "izer" || s == "ization") replace_suffix(s, "ize");
    else if (s == "ational" || s == "ation" || s == "ator") replace_suffix(s, "ate");
    else if (s == "alism" || s == "aliti" || s == "alli") replace_suffix(s, "al");
    else if (s == "fulness") replace_suffix(s, "ful");
    else if (s == "ousli" || s == "ousness") replace_suffix(s, "ous");
    else if (s == "iveness" || s == "iviti") replace_suffix(s, "ive");
    else if (s == "biliti" || s == "bli") replace_suffix(s, "ble");
    else if (s == "ogi") {
      const auto start = suffix_start(s);
      if (start >= 1 && w_[start - 1] == 'l') replace_suffix(s, "og");
    } else if (s == "fulli") replace_suffix(s, "ful");
    else if (s == "lessli") replace_suffix(s, "less");
    else if (s == "li") {
      const auto start = suffix_start(s);
      if (start >= 1 && is_valid_li(w_[start - 1])) w_.erase(start);
    }
  }

  void step_3() {
    static constexpr std::array<std::string_view, 9> suffixes = {"tional", "ational", "alize", "icate", "iciti",
                                                                 "ical",   "ful",     "ness",  "ative"};
    auto i = longest_suffix(w_, suffixes);
    if (i == std::string::npos) return;
    const auto s = suffixes[i];
    if (!in_r1(s)) return;
    if (s == "tional") replace_suffix(s, "tion");
    else if (s == "ational") replace_suffix(s, "ate");
    else if (s == "alize") replace_suffix(s, "al");
    else if (s == "icate" || s == "iciti" || s == "ical") replace_suffix(s, "ic");
    else if (s == "ful" || s == "ness") w_.erase(suffix_start(s));
    else if (s == "ative" && in_r2(s)) w_.erase(suffix_start(s));
  }

  void step_4() {
    static constexpr std::array<std::string_view, 18> suffixes = {
        "al", "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement",
        "ment", "ent", "ism", "ate", "iti", "ous",  "ive",  "ize", "ion"};
    auto i = longest_suffix(w_, suffixes);
    if (i == std::string::npos) return;
    const auto s = suffixes[i];
    if (!in_r2(s)) return;
    const auto start = suffix_start(s);
    if (s == "ion") {
      if (start >= 1 && (w_[start - 1] == 's' || w_[start - 1] == 't')) w_.erase(start);
    } else {
      w_.erase(start);
    }
  }

  void step_5() {
    if (w_.empty()) return;
    const auto start = w_.size() - 1;
    if (w_.back() == 'e') {
      if (start >= p2_ || (start >= p1_ && !short_syllable_at(start))) w_.erase(start);
    } else if (w_.back() == 'l') {
      if (start >= p2_ && start >= 1 && w_[start - 1] == 'l') w_.erase(start);
    }
  }

  std::string w_;
  std::size_t p1_ = 0;
  std::size_t p2_ = 0;
  bool y_found_ = false;
};

std::optional<std::string_view> exception1(std::string_view w) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 18> table = {{
      {"skis", "ski"},     {"skies", "sky"},   {"dying", "die"},     {"lying", "lie"},   {"tying", "tie"},
      {"idly", "idl"},     {"gently", "gentl"}, {"ugly", "ugli"},    {"early", "earli"}, {"only", "onli"},
      {"singly", "singl"}, {"sky", "sky"},     {"news", "news"},     {"howe", "howe"},   {"atlas", "atlas"},
      {"cosmos", "cosmos"}, {"bias", "bias"},  {"andes", "andes"},
  }};
  for (const auto& [from, to] : table) {
    if (from == w) return to;
  }
  return std::nullopt;
}

}  // namespace

std::string stem(std::string_view word) {
  for (char c : word) {
    if (c == '_' || (c >= 'A' && c <= 'Z')) return std::string(word);
  }
  if (auto special = exception1(word)) return std::string(*special);
  if (word.size() < 3) return std::string(word);
  return Porter2(std::string(word)).run();
}

}  // namespace notecoder
