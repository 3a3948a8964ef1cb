#include "notecoder/vectorize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "notecoder/error.hpp"

namespace notecoder {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
bool parse_number(std::string_view s, T& value) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

SparseVector::SparseVector(std::size_t dimension, std::vector<Entry> entries) : dimension_(dimension) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].index >= dimension) throw std::invalid_argument("sparse index out of range");
    if (i > 0 && entries[i].index == entries[i - 1].index) throw std::invalid_argument("duplicate sparse index");
  }
  std::erase_if(entries, [](const Entry& e) { return e.value == 0.0; });
  entries_ = std::move(entries);
}

double SparseVector::at(FeatureIndex index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, FeatureIndex i) { return e.index < i; });
  return (it != entries_.end() && it->index == index) ? it->value : 0.0;
}

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (const auto& e : entries_) {
    if (e.index < dense.size()) sum += e.value * dense[e.index];
  }
  return sum;
}

double SparseVector::norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.value * e.value;
  return std::sqrt(sum);
}

void SparseVector::scale(double factor) {
  for (auto& e : entries_) e.value *= factor;
  std::erase_if(entries_, [](const Entry& e) { return e.value == 0.0; });
}

std::string SparseVector::to_string() const {
  std::string out;
  for (const auto& e : entries_) {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(e.index);
    out.push_back(':');
    out += format_double(e.value);
  }
  return out;
}

SparseVector SparseVector::parse(std::string_view text, std::size_t dimension) {
  std::vector<Entry> entries;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    if (i >= text.size()) break;
    auto end = text.find(' ', i);
    if (end == std::string_view::npos) end = text.size();
    auto item = text.substr(i, end - i);
    auto colon = item.find(':');
    Entry e{};
    if (colon == std::string_view::npos || !parse_number(item.substr(0, colon), e.index) ||
        !parse_number(item.substr(colon + 1), e.value)) {
      throw DataError("malformed sparse entry \"" + std::string(item) + "\"");
    }
    entries.push_back(e);
    i = end;
  }
  return SparseVector(dimension, std::move(entries));
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::size_t min_df)
    : tokens_(std::move(tokens)), min_df_(min_df) {
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], static_cast<FeatureIndex>(i));
}

std::int64_t Vocabulary::find(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& t : tokens_) {
    for (char c : t) mix(static_cast<unsigned char>(c));
    mix(0);
  }
  return h;
}

VocabularyBuild build_vocabulary(const std::vector<TokenStream>& corpus, std::size_t min_df) {
  if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    std::set<std::string_view> seen(doc.begin(), doc.end());
    for (auto t : seen) ++df[std::string(t)];
  }
  std::vector<std::string> kept;
  for (const auto& [token, count] : df) {
    if (count >= min_df) kept.push_back(token);
  }
  VocabularyBuild out{Vocabulary(std::move(kept), min_df), {}};
  out.stats.n_documents = corpus.size();
  out.stats.document_frequency.reserve(out.vocabulary.size());
  for (const auto& t : out.vocabulary.tokens()) out.stats.document_frequency.push_back(df.at(t));
  return out;
}

SparseVector count_vector(const TokenStream& tokens, const Vocabulary& vocab) {
  std::map<FeatureIndex, double> counts;
  for (const auto& t : tokens) {
    auto idx = vocab.find(t);
    if (idx >= 0) counts[static_cast<FeatureIndex>(idx)] += 1.0;
  }
  std::vector<SparseVector::Entry> entries;
  entries.reserve(counts.size());
  for (const auto& [i, c] : counts) entries.push_back({i, c});
  return SparseVector(vocab.size(), std::move(entries));
}

double idf(std::size_t n_documents, std::size_t document_frequency) {
  if (document_frequency == 0) throw std::domain_error("idf undefined for a token with document frequency 0");
  return std::log(static_cast<double>(n_documents) / static_cast<double>(document_frequency));
}

double idf(FeatureIndex index, const CorpusStats& stats) {
  return idf(stats.n_documents, stats.document_frequency.at(index));
}

SparseVector tfidf_vector(const TokenStream& tokens, const Vocabulary& vocab, const CorpusStats& stats,
                          bool l2_normalize) {
  auto counts = count_vector(tokens, vocab);
  double length = 0.0;
  for (const auto& e : counts.entries()) length += e.value;
  if (length == 0.0) return SparseVector(vocab.size());

  std::vector<SparseVector::Entry> entries;
  entries.reserve(counts.nnz());
  for (const auto& e : counts.entries()) entries.push_back({e.index, (e.value / length) * idf(e.index, stats)});
  SparseVector v(vocab.size(), std::move(entries));
  if (l2_normalize) {
    const double n = v.norm();
    if (n > 0.0) v.scale(1.0 / n);
  }
  return v;
}

std::string vocabulary_to_tsv(const Vocabulary& vocab, const CorpusStats& stats) {
  std::string out = "#N=" + std::to_string(stats.n_documents) + "\tmin_df=" + std::to_string(vocab.min_df()) + "\n";
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out += vocab.token(static_cast<FeatureIndex>(i)) + "\t" + std::to_string(i) + "\t" +
           std::to_string(stats.document_frequency[i]) + "\n";
  }
  return out;
}

VocabularyBuild vocabulary_from_tsv(std::string_view tsv, const std::string& source) {
  std::istringstream in{std::string(tsv)};
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty vocabulary file");
  std::size_t n_docs = 0;
  std::size_t min_df = 0;
  {
    auto tab = line.find('\t');
    if (line.rfind("#N=", 0) != 0 || tab == std::string::npos || line.compare(tab + 1, 7, "min_df=") != 0 ||
        !parse_number(std::string_view(line).substr(3, tab - 3), n_docs) ||
        !parse_number(std::string_view(line).substr(tab + 8), min_df)) {
      throw DataError(source + ":1: expected header \"#N=<n>\\tmin_df=<m>\"");
    }
  }
  std::vector<std::string> tokens;
  std::vector<std::size_t> df;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    std::size_t index = 0;
    std::size_t freq = 0;
    if (t2 == std::string::npos || !parse_number(std::string_view(line).substr(t1 + 1, t2 - t1 - 1), index) ||
        !parse_number(std::string_view(line).substr(t2 + 1), freq)) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected token<TAB>index<TAB>df");
    }
    if (index != tokens.size()) throw DataError(source + ":" + std::to_string(line_no) + ": indices must be dense");
    if (freq < 1 || freq > n_docs) throw DataError(source + ":" + std::to_string(line_no) + ": df out of range");
    tokens.push_back(line.substr(0, t1));
    df.push_back(freq);
  }
  VocabularyBuild out{Vocabulary(tokens, min_df), {n_docs, std::move(df)}};
  if (out.vocabulary.tokens() != tokens) throw DataError(source + ": tokens must be unique and sorted");
  return out;
}

}  // namespace notecoder
