#include "notecoder/csv.hpp"

#include "notecoder/error.hpp"

namespace notecoder {

std::optional<std::vector<std::string>> CsvReader::next() {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool any = false;
  const std::size_t this_row = row_ + 1;

  auto fail = [&](const std::string& what) {
    throw DataError("CSV row " + std::to_string(this_row) + ": " + what);
  };

  int c;
  while ((c = in_.get()) != std::char_traits<char>::eof()) {
    any = true;
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field.empty() || field_was_quoted) fail("unexpected quote inside unquoted field");
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        break;
      case '\r':
        if (in_.peek() == '\n') break;
        [[fallthrough]];
      case '\n':
        fields.push_back(std::move(field));
        row_ = this_row;
        return fields;
      default:
        if (field_was_quoted) fail("characters after closing quote");
        field.push_back(ch);
    }
  }
  if (in_quotes) fail("unterminated quoted field");
  if (!any) return std::nullopt;
  fields.push_back(std::move(field));
  row_ = this_row;
  return fields;
}

CsvHeader::CsvHeader(std::vector<std::string> names, std::string source)
    : names_(std::move(names)), source_(std::move(source)) {
  // tolerate a UTF-8 byte order mark on the first column
  if (!names_.empty() && names_[0].rfind("\xEF\xBB\xBF", 0) == 0) names_[0].erase(0, 3);
}

std::optional<std::size_t> CsvHeader::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvHeader::require(std::string_view name) const {
  if (auto idx = find(name)) return *idx;
  throw DataError(source_ + ": missing required column \"" + std::string(name) + "\"");
}

}  // namespace notecoder
