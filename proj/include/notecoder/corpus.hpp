#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace notecoder {

/// One clinical note as exported by the hospital record system.
struct NoteRecord {
  std::string admission_id;  // HADM_ID
  std::string category;      // e.g. "Nursing", "Discharge summary"
  std::string text;
  std::int64_t chart_order = 0;
};

/// All notes of one hospitalization, concatenated, plus the jaundice label.
struct Noteset {
  std::string admission_id;
  std::string text;
  bool label = false;

  bool operator==(const Noteset&) const = default;
};

/// Set of ICD-9 codes in normalized form (dots and whitespace stripped, uppercased).
class IcdCodeSet {
 public:
  IcdCodeSet() = default;
  IcdCodeSet(std::initializer_list<std::string_view> codes);

  static std::string normalize(std::string_view code);

  /// One code per line, '#' comments and blank lines ignored.
  static IcdCodeSet load(const std::filesystem::path& path);

  void insert(std::string_view code) { codes_.insert(normalize(code)); }
  bool contains(std::string_view code) const { return codes_.count(normalize(code)) > 0; }
  bool empty() const { return codes_.empty(); }
  std::size_t size() const { return codes_.size(); }
  const std::set<std::string>& codes() const { return codes_; }

 private:
  std::set<std::string> codes_;
};

/// Neonatal jaundice codes: 773.0-773.2, 774.1, 774.2, 774.30/31/39, 774.6.
const IcdCodeSet& default_jaundice_codes();

/// True iff the admission carries at least one jaundice code.
bool label_admission(const IcdCodeSet& codes, const IcdCodeSet& jaundice_codes);

/// Groups records into one noteset per admission, ordered by first appearance.
/// Within an admission, texts are joined by '\n' in chart_order (stable on ties).
/// With a category filter, only matching records are kept and admissions left
/// with no records are dropped. Throws DataError for an admission without a label.
std::vector<Noteset> build_notesets(const std::vector<NoteRecord>& records,
                                    const std::map<std::string, bool>& labels,
                                    const std::optional<std::set<std::string>>& category_filter = std::nullopt);

struct MimicCsvOptions {
  IcdCodeSet jaundice_codes = default_jaundice_codes();
  std::optional<std::set<std::string>> category_filter;
  /// Integer column giving chart order; when absent from the file, row order is used.
  std::string chart_order_column = "ROW_ID";
};

/// Reads NOTEEVENTS-style (HADM_ID, CATEGORY, TEXT) and DIAGNOSES_ICD-style
/// (HADM_ID, ICD9_CODE) CSV exports. Notes with an empty HADM_ID are skipped.
std::vector<NoteRecord> read_note_records(const std::filesystem::path& noteevents_path,
                                          const std::string& chart_order_column = "ROW_ID");
std::map<std::string, bool> read_admission_labels(const std::filesystem::path& diagnoses_path,
                                                  const IcdCodeSet& jaundice_codes);
std::vector<Noteset> load_mimic_csv(const std::filesystem::path& noteevents_path,
                                    const std::filesystem::path& diagnoses_path,
                                    const MimicCsvOptions& options = {});

/// Canonical JSONL: one {"admission_id", "text", "label"} object per line.
void write_notesets_jsonl(const std::vector<Noteset>& notesets, const std::filesystem::path& path);
std::string notesets_to_jsonl(const std::vector<Noteset>& notesets);
std::vector<Noteset> read_notesets_jsonl(const std::filesystem::path& path);

/// Fold assignment for k-fold cross-validation.
struct SplitPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::size_t> fold_of;  // admission_id -> fold in [0, k)

  /// Indices into the original noteset list for one fold (test) or its complement (train).
  std::vector<std::size_t> test_indices(const std::vector<Noteset>& notesets, std::size_t fold) const;
  std::vector<std::size_t> train_indices(const std::vector<Noteset>& notesets, std::size_t fold) const;
};

/// Seeded shuffle followed by round-robin assignment. Throws ConfigError if
/// k < 2 or k exceeds the number of notesets, DataError on duplicate ids.
SplitPlan split_kfold(const std::vector<Noteset>& notesets, std::size_t k, std::uint64_t seed);

/// Seeded holdout: returns (train, test) index lists with round(test_fraction * n) test items.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_holdout(std::size_t n, double test_fraction,
                                                                            std::uint64_t seed);

}  // namespace notecoder
