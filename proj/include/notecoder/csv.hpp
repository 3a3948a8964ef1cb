#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace notecoder {

/// Streaming RFC 4180 reader: comma separated, '"' quoting with "" escapes,
/// quoted fields may span lines. CRLF and LF line endings are accepted.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Next record, or nullopt at end of input. Throws DataError on malformed quoting.
  std::optional<std::vector<std::string>> next();

  /// 1-based record number of the record last returned (the header is row 1).
  std::size_t row() const { return row_; }

 private:
  std::istream& in_;
  std::size_t row_ = 0;
};

/// Column lookup over a header record.
class CsvHeader {
 public:
  CsvHeader(std::vector<std::string> names, std::string source);

  /// Index of a required column; throws DataError naming the column.
  std::size_t require(std::string_view name) const;
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::string source_;
};

}  // namespace notecoder
