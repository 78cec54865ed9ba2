#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "effdim/linalg.hpp"

namespace effdim::csv {

/// Parses a comma-separated numeric matrix, one row per line. A first row
/// containing any non-numeric cell is taken as a header and skipped. Errors
/// name the offending line and column.
Matrix parse_matrix(std::istream& in, std::string_view source);
Matrix read_matrix(const std::string& path);

/// Writes with 17 significant digits, so parse_matrix returns the identical matrix.
void write_matrix(std::ostream& out, const Matrix& m);

/// "%.17g" rendering.
std::string format_double(double x);

/// Comma-separated list of integers, e.g. "10,100,1000".
std::vector<std::int64_t> parse_int_list(std::string_view text);

}  // namespace effdim::csv
