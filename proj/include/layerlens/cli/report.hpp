#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace layerlens::cli {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

/// Reads a whole file; throws Error(io).
std::string read_file(const std::string& path);

/// "# layerlens <version> config=sha256:<hex> inputs=<name>=sha256:<hex>;..."
struct Provenance {
  std::string config_hash;
  /// (file name, content hash) in argument order.
  std::vector<std::pair<std::string, std::string>> inputs;

  void add_input(const std::string& path);
  std::string header_line() const;
};

/// Shortest round-trip decimal.
std::string format_number(double value);
/// Empty field for an absent value.
std::string format_number(const std::optional<double>& value);

std::string csv_field(std::string_view value);
std::string csv_row(const std::vector<std::string>& fields);

/// CSV document with a provenance line, a header row and LF line endings.
class CsvReport {
 public:
  CsvReport(const Provenance& provenance, std::vector<std::string> columns);

  void add_row(std::vector<std::string> fields);
  std::size_t rows() const noexcept { return rows_; }
  const std::string& str() const noexcept { return text_; }

 private:
  std::size_t width_;
  std::size_t rows_ = 0;
  std::string text_;
};

/// RFC-4180 parse. Lines starting with '#' before the header are skipped.
/// CRLF is accepted. Throws ParseError on an unterminated quote or ragged row.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws Error(parse) naming the missing column.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable load_csv(const std::string& path);

/// Writes to `path`, or to stdout when `path` is empty or "-".
void write_output(const std::string& path, const std::string& content);

}  // namespace layerlens::cli
