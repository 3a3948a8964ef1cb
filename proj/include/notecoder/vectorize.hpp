#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "notecoder/preprocess.hpp"

namespace notecoder {

using FeatureIndex = std::uint32_t;

/// Sparse feature vector: strictly increasing indices below `dimension`, no stored zeros.
class SparseVector {
 public:
  struct Entry {
    FeatureIndex index;
    double value;
    bool operator==(const Entry&) const = default;
  };

  SparseVector() = default;
  explicit SparseVector(std::size_t dimension) : dimension_(dimension) {}
  /// Entries are sorted and validated; zeros are dropped. Throws std::invalid_argument
  /// on out-of-range or duplicate indices.
  SparseVector(std::size_t dimension, std::vector<Entry> entries);

  std::size_t dimension() const { return dimension_; }
  std::span<const Entry> entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Value at `index` (0 when absent). O(log nnz).
  double at(FeatureIndex index) const;
  double dot(std::span<const double> dense) const;
  double norm() const;
  void scale(double factor);

  /// "index:value" pairs, space separated, shortest round-trip formatting.
  std::string to_string() const;
  static SparseVector parse(std::string_view text, std::size_t dimension);

  bool operator==(const SparseVector&) const = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<Entry> entries_;
};

/// Document count and per-token document frequency over the training corpus.
struct CorpusStats {
  std::size_t n_documents = 0;
  std::vector<std::size_t> document_frequency;  // by feature index
};

/// Token <-> feature index map; indices follow lexicographic token order.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> tokens, std::size_t min_df);

  std::size_t size() const { return tokens_.size(); }
  std::size_t min_df() const { return min_df_; }
  const std::string& token(FeatureIndex index) const { return tokens_.at(index); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  /// Index of `token`, or -1 when out of vocabulary.
  std::int64_t find(const std::string& token) const;

  /// FNV-1a over the ordered token list; models store it to detect mismatched vocabularies.
  std::uint64_t fingerprint() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, FeatureIndex> index_;
  std::size_t min_df_ = 1;
};

struct VocabularyBuild {
  Vocabulary vocabulary;
  CorpusStats stats;
};

/// Keeps tokens with document frequency >= min_df. Throws DataError on an empty corpus.
VocabularyBuild build_vocabulary(const std::vector<TokenStream>& corpus, std::size_t min_df);

/// Raw occurrence counts of in-vocabulary tokens.
SparseVector count_vector(const TokenStream& tokens, const Vocabulary& vocab);

/// ln(N / df). Throws std::domain_error when df is 0.
double idf(std::size_t n_documents, std::size_t document_frequency);
double idf(FeatureIndex index, const CorpusStats& stats);

/// (count / |d|) * idf with |d| the number of in-vocabulary tokens, optionally
/// scaled to unit L2 norm. An empty (or all-zero) document gives the zero vector.
SparseVector tfidf_vector(const TokenStream& tokens, const Vocabulary& vocab, const CorpusStats& stats,
                          bool l2_normalize);

/// Vocabulary TSV: header `#N=<n>\tmin_df=<m>`, then token <TAB> index <TAB> df.
std::string vocabulary_to_tsv(const Vocabulary& vocab, const CorpusStats& stats);
VocabularyBuild vocabulary_from_tsv(std::string_view tsv, const std::string& source = "<vocabulary>");

}  // namespace notecoder
