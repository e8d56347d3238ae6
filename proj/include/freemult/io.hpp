#pragma once

// CSV and SVG output.

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace freemult {

inline constexpr char kVersion[] = "1.0.0";

/// Shortest round-trip decimal form; identical across runs and platforms with IEEE doubles.
std::string fmt_num(double x);

/// CSV with a `# freemult-lab v<semver> <subcommand>` first line.
class CsvWriter {
public:
  CsvWriter(std::ostream& os, std::string const& subcommand, std::vector<std::string> const& columns);
  CsvWriter& row(std::vector<std::string> const& cells);
  CsvWriter& row(std::vector<double> const& cells);

private:
  std::ostream& os_;
  std::size_t width_;
};

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Self-contained SVG line plot with axes, ticks and a legend.
void write_svg_plot(std::ostream& os, std::string const& title, std::string const& xlabel, std::string const& ylabel,
                    std::vector<SvgSeries> const& series);

} // namespace freemult
