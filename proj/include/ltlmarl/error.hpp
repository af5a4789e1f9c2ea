#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ltlmarl {

/// Malformed or inconsistent input data (task files, maps, configs, game files).
/// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in a formula or task file. Carries the 1-based position of the
/// offending token and the set of tokens that would have been accepted there.
class ParseError : public DataError {
 public:
  ParseError(std::string message, int line, int column, std::vector<std::string> expected)
      : DataError(format(message, line, column, expected)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(const std::string& message, int line, int column,
                            const std::vector<std::string>& expected) {
    std::ostringstream out;
    out << "line " << line << ", column " << column << ": " << message;
    if (!expected.empty()) {
      out << "; expected one of:";
      for (const auto& e : expected) out << ' ' << e;
    }
    return out.str();
  }

  int line_;
  int column_;
  std::vector<std::string> expected_;
};

}  // namespace ltlmarl
