#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "teleop/error.hpp"

namespace teleop::text {

/// Reads a line-oriented text format: blank lines and lines starting with '#'
/// are skipped, everything else is split on whitespace. Errors carry the
/// 1-based line number of the offending record.
class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  /// Next record's tokens; false at end of input.
  bool next(std::vector<std::string>& tokens);
  /// Next record, or a ParseError naming `expected` at end of input.
  std::vector<std::string> expect(std::string_view expected);
  /// Fails unless the input has no more records.
  void expect_end();

  int line() const { return line_; }
  const std::string& source() const { return source_; }
  [[noreturn]] void fail(const std::string& what) const;

  double to_double(const std::string& token) const;
  long long to_int(const std::string& token) const;
  /// Checks token count and (optionally) the leading keyword.
  void require(const std::vector<std::string>& tokens, std::size_t count, std::string_view keyword = {}) const;

 private:
  std::istream& in_;
  std::string source_;
  int line_ = 0;
};

}  // namespace teleop::text
