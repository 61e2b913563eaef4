#pragma once

#include <string>
#include <vector>

namespace bbspline {

enum class GridMapping { kRank, kNone };

const char* to_string(GridMapping mapping) noexcept;
GridMapping parse_grid_mapping(const std::string& name);

struct Dataset {
  std::vector<double> x;  // original covariate, in design order after mapping
  std::vector<double> y;  // response in design order: y[i] sits at (i + 1)/n
  bool mapped_grid = false;

  int n() const noexcept { return static_cast<int>(y.size()); }
};

inline constexpr int kMinDatasetSize = 8;

// Reads two named columns of a header-first CSV file.
//   kRank: stable sort by x, point i of the sorted order goes to (i + 1)/n.
//   kNone: x must already be (1/n, ..., 1) within 1e-9.
// Errors: kIo (missing file), kParse (unknown column, non-numeric or empty cell,
// reported with its 1-based line number), kInvalidArgument (ties or off-grid x
// under kNone), kTooFewPoints (n < 8).
Dataset ingest_csv(const std::string& path, const std::string& x_column, const std::string& y_column,
                   GridMapping mapping = GridMapping::kRank);

// A null function on the grid: column `f_star` if present, else the first
// column. Must have exactly n rows.
std::vector<double> read_grid_csv(const std::string& path, int n);

// Splits one CSV line on commas; double quotes group a field and "" escapes a quote.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace bbspline
