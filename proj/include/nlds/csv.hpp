#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nlds::csv {

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;

  /// Index of `column` in the header or -1.
  [[nodiscard]] int column(std::string_view name) const;
};

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
/// A trailing empty line is ignored. Throws IoError if the file cannot be opened.
Table read_file(const std::filesystem::path& path);
Table parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape_field(std::string_view field);
void write_row(std::ostream& out, const Row& row);

}  // namespace nlds::csv
