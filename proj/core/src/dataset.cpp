#include "bbspline/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "bbspline/error.hpp"

namespace bbspline {
namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  Table table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    for (auto& f : fields) f = trim(f);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty()) throw Error(ErrorCode::kParse, "'" + path + "' is empty");
  return table;
}

std::size_t column_index(const Table& table, const std::string& name, const std::string& path) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) throw Error(ErrorCode::kParse, "column '" + name + "' not found in '" + path + "'");
  return static_cast<std::size_t>(it - table.header.begin());
}

double parse_cell(const Table& table, std::size_t row, std::size_t col, const std::string& path) {
  const auto where = "'" + path + "' line " + std::to_string(table.line_numbers[row]) + ", column '" +
                     table.header[col] + "'";
  const auto& fields = table.rows[row];
  if (col >= fields.size() || fields[col].empty()) throw Error(ErrorCode::kParse, "missing value at " + where);
  const std::string& s = fields[col];
  double v = 0.0;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kParse, "non-numeric value '" + s + "' at " + where);
  }
  return v;
}

}  // namespace

const char* to_string(GridMapping mapping) noexcept {
  return mapping == GridMapping::kRank ? "rank" : "none";
}

GridMapping parse_grid_mapping(const std::string& name) {
  if (name == "rank") return GridMapping::kRank;
  if (name == "none") return GridMapping::kNone;
  throw Error(ErrorCode::kConfiguration, "mapping must be 'rank' or 'none', got '" + name + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r' && c != '\n') {
      out.back() += c;
    }
  }
  return out;
}

Dataset ingest_csv(const std::string& path, const std::string& x_column, const std::string& y_column,
                   GridMapping mapping) {
  const Table table = read_table(path);
  const auto xc = column_index(table, x_column, path);
  const auto yc = column_index(table, y_column, path);
  const std::size_t n = table.rows.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = parse_cell(table, i, xc, path);
    y[i] = parse_cell(table, i, yc, path);
  }
  if (n < static_cast<std::size_t>(kMinDatasetSize)) {
    throw Error(ErrorCode::kTooFewPoints,
                "'" + path + "' has " + std::to_string(n) + " rows, at least 8 are needed");
  }

  Dataset data;
  if (mapping == GridMapping::kRank) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    data.x.reserve(n);
    data.y.reserve(n);
    for (auto i : order) {
      data.x.push_back(x[i]);
      data.y.push_back(y[i]);
    }
    data.mapped_grid = true;
    return data;
  }

  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] == x[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "tied x at line " + std::to_string(table.line_numbers[i]) +
                                                   "; use mapping 'rank' for tied or irregular designs");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = (i + 1) / static_cast<double>(n);
    if (std::abs(x[i] - expected) > 1e-9) {
      throw Error(ErrorCode::kInvalidArgument, "x at line " + std::to_string(table.line_numbers[i]) +
                                                   " is not on the grid i/n; use mapping 'rank'");
    }
  }
  data.x = std::move(x);
  data.y = std::move(y);
  data.mapped_grid = false;
  return data;
}

std::vector<double> read_grid_csv(const std::string& path, int n) {
  const Table table = read_table(path);
  const auto it = std::find(table.header.begin(), table.header.end(), "f_star");
  const std::size_t col = it == table.header.end() ? 0 : static_cast<std::size_t>(it - table.header.begin());
  if (table.rows.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kDimensionMismatch, "'" + path + "' has " + std::to_string(table.rows.size()) +
                                                   " rows, the data has " + std::to_string(n));
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = parse_cell(table, i, col, path);
  return out;
}

}  // namespace bbspline
