#include "ebfission/csv.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "ebfission/error.hpp"

namespace ebfission {

std::string format_double(double v) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& f : fields) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
  }
  return fields;
}

}  // namespace

std::vector<double> read_csv_column(std::istream& is, std::string_view column) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("CSV input is empty");
  const auto header = split_fields(line);
  std::size_t col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == column) col = c;
  }
  if (col == header.size()) {
    throw InputError("CSV header has no column '" + std::string(column) + "'");
  }

  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (split_fields(line) == std::vector<std::string_view>{""}) continue;
    ++row;
    const auto fields = split_fields(line);
    if (fields.size() <= col) {
      throw InputError("row " + std::to_string(row) + ": missing column '" + std::string(column) + "'");
    }
    const auto field = fields[col];
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw InputError("row " + std::to_string(row) + ": not a number: '" + std::string(field) + "'");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace ebfission
