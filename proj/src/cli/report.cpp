#include "layerlens/cli/report.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "layerlens/error.hpp"

#ifndef LAYERLENS_VERSION
#define LAYERLENS_VERSION "0.0.0"
#endif

namespace layerlens::cli {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error(ErrorCategory::io, "SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::io, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

void Provenance::add_input(const std::string& path) {
  inputs.emplace_back(std::filesystem::path(path).filename().string(), sha256_file(path));
}

std::string Provenance::header_line() const {
  std::string line = "# layerlens " LAYERLENS_VERSION " config=sha256:" + config_hash + " inputs=";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i) line += ';';
    line += inputs[i].first + "=sha256:" + inputs[i].second;
  }
  return line;
}

std::string format_number(double value) { return fmt::format("{}", value); }

std::string format_number(const std::optional<double>& value) { return value ? format_number(*value) : ""; }

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  line += '\n';
  return line;
}

CsvReport::CsvReport(const Provenance& provenance, std::vector<std::string> columns)
    : width_(columns.size()), text_(provenance.header_line() + "\n" + csv_row(columns)) {}

void CsvReport::add_row(std::vector<std::string> fields) {
  if (fields.size() != width_) {
    throw Error(ErrorCategory::shape, "report row has " + std::to_string(fields.size()) + " fields, expected " +
                                          std::to_string(width_));
  }
  text_ += csv_row(fields);
  ++rows_;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw Error(ErrorCategory::parse, "missing CSV column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;
  std::size_t line = 1, i = 0;
  bool header_seen = false;
  while (i < text.size()) {
    if (!header_seen && text[i] == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      ++i;
      ++line;
      continue;
    }
    std::vector<std::string> record;
    std::string field;
    const std::size_t record_line = line;
    bool done = false;
    while (!done) {
      if (i < text.size() && text[i] == '"') {
        ++i;
        while (true) {
          if (i >= text.size()) throw ParseError(record_line, "unterminated quoted field");
          if (text[i] == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field += '"';
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (text[i] == '\n') ++line;
          field += text[i++];
        }
      }
      while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
        if (text[i] == '"') throw ParseError(line, "stray quote in unquoted field");
        field += text[i++];
      }
      record.push_back(std::move(field));
      field.clear();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == '\r') ++i;
      if (i < text.size() && text[i] == '\n') ++i;
      ++line;
      done = true;
    }
    if (record.size() == 1 && record[0].empty()) continue;  // blank line
    header_seen = true;
    records.push_back(std::move(record));
    record_lines.push_back(record_line);
  }
  CsvTable table;
  if (records.empty()) return table;
  table.columns = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.columns.size()) {
      throw ParseError(record_lines[r], "row has " + std::to_string(records[r].size()) + " fields, header has " +
                                  std::to_string(table.columns.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable load_csv(const std::string& path) {
  try {
    return parse_csv(read_file(path));
  } catch (const ParseError& e) {
    throw Error(ErrorCategory::parse, path + ": " + e.what());
  }
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorCategory::io, "failed writing '" + path + "'");
}

}  // namespace layerlens::cli
