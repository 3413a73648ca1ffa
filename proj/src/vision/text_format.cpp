#include "teleop/vision/text_format.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace teleop::text {

bool LineReader::next(std::vector<std::string>& tokens) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    tokens.clear();
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    return true;
  }
  return false;
}

std::vector<std::string> LineReader::expect(std::string_view expected) {
  std::vector<std::string> tokens;
  if (!next(tokens)) {
    ++line_;
    fail("unexpected end of input, expected " + std::string(expected));
  }
  return tokens;
}

void LineReader::expect_end() {
  std::vector<std::string> tokens;
  if (next(tokens)) fail("unexpected extra record '" + tokens.front() + "'");
}

void LineReader::fail(const std::string& what) const { throw ParseError(source_, line_, what); }

double LineReader::to_double(const std::string& token) const {
  const char* begin = token.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || std::isnan(v)) fail("invalid number '" + token + "'");
  return v;
}

long long LineReader::to_int(const std::string& token) const {
  const char* begin = token.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE) fail("invalid integer '" + token + "'");
  return v;
}

void LineReader::require(const std::vector<std::string>& tokens, std::size_t count,
                         std::string_view keyword) const {
  if (!keyword.empty() && (tokens.empty() || tokens.front() != keyword))
    fail("expected '" + std::string(keyword) + "' record, found '" + (tokens.empty() ? "" : tokens.front()) + "'");
  if (tokens.size() != count)
    fail("expected " + std::to_string(count) + " fields, found " + std::to_string(tokens.size()));
}

}  // namespace teleop::text
