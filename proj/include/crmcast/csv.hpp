#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crmcast {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Strict parse of a whole field; throws std::invalid_argument.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

/// Splits one line on commas. No quoting: none of the files we write need it.
std::vector<std::string> split_csv(std::string_view line);

std::string_view trim(std::string_view text);

/// Error raised while reading a text file; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace crmcast
