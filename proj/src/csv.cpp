#include "effdim/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "effdim/error.hpp"

namespace effdim::csv {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

}  // namespace

Matrix parse_matrix(std::istream& in, std::string_view source) {
  const std::string where(source);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool seen_first = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    std::vector<double> row;
    row.reserve(cells.size());
    std::optional<std::size_t> bad_column;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        bad_column = c + 1;
        break;
      }
      row.push_back(*v);
    }
    if (!seen_first) {
      seen_first = true;
      width = cells.size();
      if (bad_column) continue;  // header row
    }
    if (bad_column) {
      throw Error(ErrorCode::kParseError, where + ": line " + std::to_string(line_no) + ", column " +
                                              std::to_string(*bad_column) + ": non-numeric cell '" +
                                              std::string(cells[*bad_column - 1]) + "'");
    }
    if (cells.size() != width) {
      throw Error(ErrorCode::kParseError, where + ": line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(width) + " columns, got " +
                                              std::to_string(cells.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::kParseError, where + ": no numeric rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Matrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open '" + path + "'");
  return parse_matrix(in, path);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

std::vector<std::int64_t> parse_int_list(std::string_view text) {
  std::vector<std::int64_t> values;
  for (const auto cell : split(text)) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw Error(ErrorCode::kParseError, "not an integer: '" + std::string(cell) + "'");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace effdim::csv
