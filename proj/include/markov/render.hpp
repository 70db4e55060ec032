#pragma once

// Grayscale board heatmaps. Values are min-max normalised over the plotted
// squares: the smallest value renders white, the largest black, and a board
// whose values are all equal renders uniform 50% gray.

#include <cstdint>
#include <string>
#include <vector>

namespace markov {

enum class PlotLayout {
  Strip,     // one row, square 1 on the left
  Ring,      // perimeter of the smallest square grid that fits every square
  Monopoly,  // 11x11 perimeter, Go bottom-right, Jail bottom-left
};

struct HeatCell {
  int row = 0;
  int col = 0;
  int square = 0;  // 1-based
  std::string label;
  double value = 0.0;
  std::uint8_t gray = 0;  // 0 = black, 255 = white
};

struct Heatmap {
  int rows = 0;
  int cols = 0;
  std::string title;
  std::vector<HeatCell> cells;  // one per square, in square order
};

/// 255 for the minimum, 0 for the maximum, 128 when max and min agree to
/// within 1e-12 relative.
std::uint8_t gray_level(double value, double min, double max);

/// Throws markov::Error(InvalidArgument) when the layout cannot hold the
/// squares (Monopoly needs exactly 40) or values/labels disagree in length.
Heatmap make_heatmap(const std::vector<double>& values, const std::vector<std::string>& labels,
                     PlotLayout layout, std::string title = {});

std::string render_svg(const Heatmap& map, int cell_px = 64);

/// Binary PPM (P6). Cells are separated by a one-pixel grid line; PPM has no
/// text, so labels appear only in the SVG output.
std::string render_ppm(const Heatmap& map, int cell_px = 32);

}  // namespace markov
