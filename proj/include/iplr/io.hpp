#pragma once

#include "iplr/problem.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace iplr {

/// Malformed input file; the message carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Observed entries as `s,t,value` lines with 1-based indices. Blank lines
/// and lines starting with '#' are skipped; a first data line `s,t,value` is
/// taken as a header. Returned entries are 0-based.
std::vector<ObservedEntry> read_observed(std::istream& in, const std::string& source = "<stream>");
std::vector<ObservedEntry> read_observed_file(const std::string& path);
void write_observed(std::ostream& out, const std::vector<ObservedEntry>& entries);
void write_observed_file(const std::string& path, const std::vector<ObservedEntry>& entries);

/// Dense CSV, one row per line. The literal NA reads as NaN and NaN is
/// written as NA. All rows must have the same length.
Matrix read_dense(std::istream& in, const std::string& source = "<stream>");
Matrix read_dense_file(const std::string& path);
void write_dense(std::ostream& out, const Matrix& M);
void write_dense_file(const std::string& path, const Matrix& M);

}  // namespace iplr
