#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "notecoder/corpus.hpp"

namespace notecoder {

// Synthetic stand-in for credentialed clinical note exports. Each admission
// gets several notes (the last one a discharge summary); positive admissions
// mention the signal terms at an elevated rate, negative admissions mention
// them rarely and, with probability negation_rate, inside a negation phrase.
// Notes also carry de-identification markers, numbers and punctuation.
struct SyntheticConfig {
  std::size_t n_positive = 1000;
  std::size_t n_negative = 1500;
  std::vector<std::string> signal_terms;      // empty -> default_signal_terms()
  std::vector<std::string> distractor_terms;  // empty -> default_distractor_terms()
  double negation_rate = 0.3;
  double label_noise_rate = 0.05;
  double mean_doc_length = 120.0;           // tokens per admission, all notes together
  double positive_signal_mentions = 10.0;   // Poisson mean per positive admission
  double negative_signal_mentions = 0.25;   // Poisson mean per negative admission
  std::uint64_t seed = 7;

  /// Throws ConfigError when a rate is outside [0, 1] or a mean is negative.
  void validate() const;
};

const std::vector<std::string>& default_signal_terms();
const std::vector<std::string>& default_distractor_terms();

/// Negation phrases the generator places before negated signal mentions.
const std::vector<std::string>& synthetic_negation_cues();

struct SyntheticRecords {
  std::vector<NoteRecord> records;
  std::map<std::string, bool> labels;  // after label noise
};

/// Note-level output, for category-filtered runs.
SyntheticRecords generate_synthetic_records(const SyntheticConfig& config);

/// Notesets built from generate_synthetic_records without a category filter.
std::vector<Noteset> generate_synthetic(const SyntheticConfig& config);

}  // namespace notecoder
