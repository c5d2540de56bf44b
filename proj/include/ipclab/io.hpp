#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ipclab {

/// Shortest round-trip text is not required; all floats use 17 significant digits.
std::string format_double(double x);

/// Comma-separated table with a header row. Fields are kept as text.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::out_of_range if missing.
  std::size_t column(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
};

CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

/// Writes `text` to `path` via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& text);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 720;
  int height = 440;
};

/// Standalone SVG line chart with axes, ticks and a legend.
std::string svg_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt);

/// Several charts stacked vertically in one SVG document.
std::string svg_stack(const std::vector<std::string>& charts, int width, int height_each);

}  // namespace ipclab
