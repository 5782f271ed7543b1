#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace layerlens {

/// Coarse error category; the CLI prints it on stderr as a stable token.
enum class ErrorCategory {
  io,
  format,
  validation,
  bounds,
  shape,
  empty,
  numeric,
  degenerate,
  parse,
  config,
  lookup,
  generation,
  rank,
  usage,
};

std::string_view category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Malformed archive or model file; carries the byte offset where reading failed.
class FormatError : public Error {
 public:
  FormatError(std::uint64_t offset, const std::string& what)
      : Error(ErrorCategory::format, what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// CoNLL-U / CSV syntax error with a 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCategory::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Statistic undefined on the given input (zero variance, constant vector).
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what) : Error(ErrorCategory::degenerate, what) {}
};

class RankError : public Error {
 public:
  RankError(long rank, const std::string& what)
      : Error(ErrorCategory::rank, what + " (rank " + std::to_string(rank) + ")"), rank_(rank) {}

  long rank() const noexcept { return rank_; }

 private:
  long rank_;
};

}  // namespace layerlens
