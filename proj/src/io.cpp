#include "iplr/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

namespace iplr {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    fields.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_index(std::string_view s, long long& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

// Shortest representation that reads back to the same double.
void put_double(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

std::vector<ObservedEntry> read_observed(std::istream& in, const std::string& source) {
  std::vector<ObservedEntry> entries;
  std::string raw;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line);
    if (!seen_data && fields.size() == 3 && fields[0] == "s" && fields[1] == "t" && fields[2] == "value") {
      seen_data = true;
      continue;
    }
    seen_data = true;
    if (fields.size() != 3) throw ParseError(source, lineno, "expected 3 fields s,t,value");
    long long s = 0, t = 0;
    double v = 0.0;
    if (!parse_index(fields[0], s) || !parse_index(fields[1], t)) {
      throw ParseError(source, lineno, "indices must be integers");
    }
    if (s < 1 || t < 1) throw ParseError(source, lineno, "indices are 1-based and must be positive");
    if (!parse_double(fields[2], v)) throw ParseError(source, lineno, "value is not a finite number");
    entries.push_back({static_cast<Index>(s - 1), static_cast<Index>(t - 1), v});
  }
  return entries;
}

std::vector<ObservedEntry> read_observed_file(const std::string& path) {
  auto in = open_in(path);
  return read_observed(in, path);
}

void write_observed(std::ostream& out, const std::vector<ObservedEntry>& entries) {
  out << "s,t,value\n";
  for (const auto& e : entries) {
    out << e.s + 1 << ',' << e.t + 1 << ',';
    put_double(out, e.value);
    out << '\n';
  }
}

void write_observed_file(const std::string& path, const std::vector<ObservedEntry>& entries) {
  auto out = open_out(path);
  write_observed(out, entries);
}

Matrix read_dense(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    for (const auto field : split(line)) {
      double v = 0.0;
      if (field == "NA") {
        v = std::numeric_limits<double>::quiet_NaN();
      } else if (!parse_double(field, v)) {
        throw ParseError(source, lineno, "field '" + std::string(field) + "' is not a number or NA");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source, lineno,
                       "row has " + std::to_string(row.size()) + " fields, expected " +
                           std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source, lineno, "no data rows");
  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return M;
}

Matrix read_dense_file(const std::string& path) {
  auto in = open_in(path);
  return read_dense(in, path);
}

void write_dense(std::ostream& out, const Matrix& M) {
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j > 0) out << ',';
      if (std::isnan(M(i, j))) {
        out << "NA";
      } else {
        put_double(out, M(i, j));
      }
    }
    out << '\n';
  }
}

void write_dense_file(const std::string& path, const Matrix& M) {
  auto out = open_out(path);
  write_dense(out, M);
}

}  // namespace iplr
