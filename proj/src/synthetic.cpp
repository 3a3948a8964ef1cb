#include "notecoder/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "notecoder/error.hpp"
#include "notecoder/rng.hpp"

namespace notecoder {

namespace {

const std::vector<std::string> kFiller = {
    "the", "patient", "is", "was", "with", "and", "for", "of", "to", "on", "in", "at", "infant", "baby",
    "today", "noted", "continues", "remains", "plan", "will", "be", "given", "per", "team", "this", "has",
    "been", "are", "an", "a", "by", "as", "overnight", "morning", "evening", "shift", "care", "well",
    "tolerating", "status", "assessment", "reviewed", "family", "mother", "father", "update", "continue",
    "monitor", "following", "repeat", "check", "levels", "day", "life", "weeks", "gestation", "born",
    "delivered", "vaginal", "cesarean", "nursery", "unit", "admitted", "transferred", "comfortable",
    "alert", "active", "pink", "warm", "skin", "intact", "lungs", "heart", "rate", "regular", "rhythm",
    "exam", "normal", "findings", "improving", "discussed", "attending", "resident", "note", "stable",
    "labs", "drawn", "sent", "pending", "results", "within", "limits", "orders", "written", "increase",
    "decrease", "volume", "every", "hours", "hour", "small", "large", "amount", "good", "fair", "poor",
};

// Multiword phrases kept intact so collocation detection has something to find.
const std::vector<std::string> kPhrases = {
    "room air", "breast milk", "car seat", "blood culture", "heart attack", "head ultrasound",
    "chest xray", "heart rate", "bowel sounds", "anterior fontanelle",
};

const std::vector<std::string> kCategories = {"Nursing", "Physician", "Radiology", "Nursing/other"};
const std::string kDischarge = "Discharge summary";

std::string deid_marker(Rng& rng) {
  char buf[64];
  switch (rng.index(4)) {
    case 0:
      std::snprintf(buf, sizeof buf, "[**21%02zu-%zu-%zu**]", rng.index(100), 1 + rng.index(12), 1 + rng.index(28));
      break;
    case 1:
      std::snprintf(buf, sizeof buf, "[**Name (NI) %zu**]", 100 + rng.index(900));
      break;
    case 2:
      std::snprintf(buf, sizeof buf, "[**Hospital %zu**]", 1 + rng.index(9));
      break;
    default:
      std::snprintf(buf, sizeof buf, "[**Telephone/Fax (%zu) %zu**]", 1 + rng.index(5), 1000 + rng.index(9000));
  }
  return buf;
}

std::string number_token(Rng& rng) {
  char buf[32];
  if (rng.bernoulli(0.5)) {
    std::snprintf(buf, sizeof buf, "%zu.%zu", rng.index(40), rng.index(10));
  } else {
    std::snprintf(buf, sizeof buf, "%zu", rng.index(200));
  }
  return buf;
}

// Index in [0, n) with probability proportional to 1 / (index + 1): the first
// terms dominate, as a few words do in real notes.
std::size_t pick_ranked(std::size_t n, Rng& rng) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += 1.0 / static_cast<double>(i + 1);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < n; ++i) {
    u -= 1.0 / static_cast<double>(i + 1);
    if (u < 0.0) return i;
  }
  return n - 1;
}

// A note is built as a list of units (words, phrases, markers, numbers) and
// rendered with sentence punctuation afterwards, so planted mentions can be
// inserted at unit boundaries without splitting anything.
using Units = std::vector<std::string>;

Units filler_units(std::size_t length, const std::vector<std::string>& distractors, Rng& rng) {
  Units units;
  units.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double u = rng.uniform();
    if (u < 0.03) {
      units.push_back(deid_marker(rng));
    } else if (u < 0.08) {
      units.push_back(number_token(rng));
    } else if (u < 0.14) {
      units.push_back(kPhrases[rng.index(kPhrases.size())]);
    } else if (u < 0.44) {
      units.push_back(distractors[rng.index(distractors.size())]);
    } else {
      units.push_back(kFiller[rng.index(kFiller.size())]);
    }
  }
  return units;
}

std::string render(const Units& units, Rng& rng) {
  std::string out;
  bool sentence_start = true;
  std::size_t since_stop = 0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    std::string unit = units[i];
    if (sentence_start && !unit.empty() && std::islower(static_cast<unsigned char>(unit[0]))) {
      unit[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(unit[0])));
    }
    if (!out.empty()) out.push_back(' ');
    out += unit;
    sentence_start = false;
    ++since_stop;
    if (since_stop >= 6 && rng.bernoulli(0.18)) {
      out += rng.bernoulli(0.85) ? "." : ";";
      sentence_start = true;
      since_stop = 0;
    } else if (rng.bernoulli(0.05)) {
      out += rng.bernoulli(0.5) ? "," : ":";
    }
  }
  if (!out.empty()) out.push_back('.');
  return out;
}

}  // namespace

void SyntheticConfig::validate() const {
  auto rate = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  rate(negation_rate, "negation_rate");
  rate(label_noise_rate, "label_noise_rate");
  if (!(mean_doc_length > 0.0)) throw ConfigError("mean_doc_length must be positive");
  if (!(positive_signal_mentions >= 0.0) || !(negative_signal_mentions >= 0.0)) {
    throw ConfigError("signal mention means must be non-negative");
  }
  if (signal_terms.empty() && default_signal_terms().empty()) throw ConfigError("no signal terms");
}

const std::vector<std::string>& default_signal_terms() {
  static const std::vector<std::string> terms = {
      "bilirubin", "phototherapy", "jaundice", "hyperbilirubinemia", "icterus",
      "bililights", "coombs", "yellow", "biliblanket", "hemolysis",
  };
  return terms;
}

const std::vector<std::string>& default_distractor_terms() {
  static const std::vector<std::string> terms = {
      "feeding", "apnea", "bradycardia", "temperature", "weight", "gavage", "isolette", "respiratory",
      "sepsis", "antibiotics", "murmur", "cpap", "ventilator", "surfactant", "glucose", "hypoglycemia",
      "caffeine", "breath", "clear", "abdomen", "soft", "voiding", "stooling", "parents", "visited",
      "crib", "formula", "ampicillin", "gentamicin", "culture", "echo", "desaturation", "oxygen",
      "prematurity", "length", "circumference", "immunization", "hepatitis", "vaccine", "hearing",
      "screen", "ophthalmology", "retinopathy", "hernia", "circumcision", "reflux", "nasal", "cannula",
      "suction", "secretions", "grunting", "retractions", "tachypnea", "dextrose", "intravenous",
      "umbilical", "catheter", "line", "xray", "bottle",
  };
  return terms;
}

const std::vector<std::string>& synthetic_negation_cues() {
  static const std::vector<std::string> cues = {"rule out", "no", "no evidence of", "r/o", "without", "negative for"};
  return cues;
}

SyntheticRecords generate_synthetic_records(const SyntheticConfig& config) {
  config.validate();
  const auto& signal = config.signal_terms.empty() ? default_signal_terms() : config.signal_terms;
  const auto& distractors = config.distractor_terms.empty() ? default_distractor_terms() : config.distractor_terms;
  const auto& cues = synthetic_negation_cues();

  Rng rng(config.seed);
  const std::size_t total = config.n_positive + config.n_negative;

  // true labels, shuffled so positives and negatives interleave
  std::vector<bool> truth(total, false);
  std::fill(truth.begin(), truth.begin() + static_cast<std::ptrdiff_t>(config.n_positive), true);
  rng.shuffle(truth);

  SyntheticRecords out;
  std::int64_t chart_order = 0;
  for (std::size_t a = 0; a < total; ++a) {
    char id[32];
    std::snprintf(id, sizeof id, "SYN%06zu", a + 1);

    const std::size_t n_notes = 2 + rng.index(4);
    const double scale = 0.5 + rng.uniform();
    const auto length = static_cast<std::size_t>(std::max(4.0, std::round(config.mean_doc_length * scale)));
    std::vector<Units> notes;
    for (std::size_t n = 0; n < n_notes; ++n) notes.push_back(filler_units(length / n_notes + 1, distractors, rng));

    const bool positive = truth[a];
    const unsigned mentions = rng.poisson(positive ? config.positive_signal_mentions : config.negative_signal_mentions);
    for (unsigned m = 0; m < mentions; ++m) {
      std::string mention = signal[pick_ranked(signal.size(), rng)];
      if (!positive && rng.bernoulli(config.negation_rate)) {
        mention = cues[rng.index(cues.size())] + " " + mention;
      }
      auto& note = notes[rng.index(notes.size())];
      note.insert(note.begin() + static_cast<std::ptrdiff_t>(rng.index(note.size() + 1)), std::move(mention));
    }

    for (std::size_t n = 0; n < n_notes; ++n) {
      NoteRecord r;
      r.admission_id = id;
      r.category = n + 1 == n_notes ? kDischarge : kCategories[rng.index(kCategories.size())];
      r.text = render(notes[n], rng);
      r.chart_order = chart_order++;
      out.records.push_back(std::move(r));
    }
    out.labels[id] = positive;
  }

  // flip an exact number of labels
  const auto n_flip = static_cast<std::size_t>(std::llround(config.label_noise_rate * static_cast<double>(total)));
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (std::size_t i = 0; i < n_flip && i < total; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "SYN%06zu", order[i] + 1);
    out.labels[id] = !out.labels[id];
  }
  return out;
}

std::vector<Noteset> generate_synthetic(const SyntheticConfig& config) {
  auto data = generate_synthetic_records(config);
  return build_notesets(data.records, data.labels);
}

}  // namespace notecoder
