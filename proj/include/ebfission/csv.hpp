#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace ebfission {

/// `%.17g`: 17 significant digits, lossless for doubles.
std::string format_double(double v);

/// Reads the column named `column` from a comma-separated stream with a
/// header row. Blank lines are skipped. Throws InputError naming the
/// 1-based data row on a malformed number.
std::vector<double> read_csv_column(std::istream& is, std::string_view column);

}  // namespace ebfission
