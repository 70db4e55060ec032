#include "markov/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "markov/error.hpp"
#include "markov/report.hpp"

namespace markov {
namespace {

// Clockwise perimeter walk of a side x side grid starting at the
// bottom-right corner and heading left, as on a Monopoly board.
std::vector<std::pair<int, int>> perimeter(int side) {
  std::vector<std::pair<int, int>> cells;
  if (side == 1) return {{0, 0}};
  const int last = side - 1;
  for (int c = last; c > 0; --c) cells.emplace_back(last, c);   // bottom, right to left
  for (int r = last; r > 0; --r) cells.emplace_back(r, 0);      // left, bottom to top
  for (int c = 0; c < last; ++c) cells.emplace_back(0, c);      // top, left to right
  for (int r = 0; r < last; ++r) cells.emplace_back(r, last);   // right, top to bottom
  return cells;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::uint8_t gray_level(double value, double min, double max) {
  // Float solves of a uniform vector differ in the last bits; that is still uniform.
  if (!(max - min > 1e-12 * std::max(1.0, std::fabs(max)))) return 128;
  const double t = std::clamp((value - min) / (max - min), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)));
}

Heatmap make_heatmap(const std::vector<double>& values, const std::vector<std::string>& labels,
                     PlotLayout layout, std::string title) {
  const int n = static_cast<int>(values.size());
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "nothing to plot");
  if (!labels.empty() && labels.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, "label count does not match value count");
  }
  Heatmap map;
  map.title = std::move(title);
  std::vector<std::pair<int, int>> positions;
  switch (layout) {
    case PlotLayout::Strip:
      map.rows = 1;
      map.cols = n;
      for (int k = 0; k < n; ++k) positions.emplace_back(0, k);
      break;
    case PlotLayout::Monopoly:
      if (n != 40) {
        throw Error(ErrorCode::InvalidArgument,
                    "monopoly layout needs 40 squares, board has " + std::to_string(n));
      }
      [[fallthrough]];
    case PlotLayout::Ring: {
      int side = 2;
      while (4 * (side - 1) < n) ++side;
      map.rows = map.cols = side;
      positions = perimeter(side);
      positions.resize(static_cast<std::size_t>(n));
      break;
    }
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  for (int k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    HeatCell cell;
    cell.row = positions[i].first;
    cell.col = positions[i].second;
    cell.square = k + 1;
    cell.label = labels.empty() || labels[i].empty() ? std::to_string(k + 1) : labels[i];
    cell.value = values[i];
    cell.gray = gray_level(values[i], *lo, *hi);
    map.cells.push_back(std::move(cell));
  }
  return map;
}

std::string render_svg(const Heatmap& map, int cell_px) {
  const int title_px = map.title.empty() ? 0 : 24;
  const int width = map.cols * cell_px;
  const int height = map.rows * cell_px + title_px;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  if (!map.title.empty()) {
    os << "  <text x=\"" << width / 2 << "\" y=\"17\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"14\">" << escape_xml(map.title) << "</text>\n";
  }
  const int font = std::max(6, cell_px / 7);
  for (const HeatCell& c : map.cells) {
    const int x = c.col * cell_px;
    const int y = c.row * cell_px + title_px;
    const int g = c.gray;
    const char* ink = g < 128 ? "#ffffff" : "#000000";
    os << "  <g class=\"square\" data-square=\"" << c.square << "\" data-value=\""
       << format_significant(c.value) << "\">\n"
       << "    <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_px << "\" height=\""
       << cell_px << "\" fill=\"rgb(" << g << ',' << g << ',' << g
       << ")\" stroke=\"#808080\" stroke-width=\"1\"/>\n"
       << "    <text x=\"" << x + cell_px / 2 << "\" y=\"" << y + cell_px / 2 - font / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"" << font
       << "\" fill=\"" << ink << "\">" << escape_xml(c.label) << "</text>\n"
       << "    <text x=\"" << x + cell_px / 2 << "\" y=\"" << y + cell_px / 2 + font
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"" << font
       << "\" fill=\"" << ink << "\">" << format_significant(c.value, 4) << "</text>\n"
       << "  </g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_ppm(const Heatmap& map, int cell_px) {
  const int width = map.cols * cell_px;
  const int height = map.rows * cell_px;
  constexpr std::uint8_t kBackground = 255;
  constexpr std::uint8_t kGrid = 128;
  std::string pixels(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3,
                     static_cast<char>(kBackground));
  for (const HeatCell& c : map.cells) {
    for (int dy = 0; dy < cell_px; ++dy) {
      for (int dx = 0; dx < cell_px; ++dx) {
        const bool edge = dx == 0 || dy == 0 || dx == cell_px - 1 || dy == cell_px - 1;
        const auto v = static_cast<char>(edge ? kGrid : c.gray);
        const std::size_t px = static_cast<std::size_t>((c.row * cell_px + dy) * width +
                                                        c.col * cell_px + dx) * 3;
        pixels[px] = pixels[px + 1] = pixels[px + 2] = v;
      }
    }
  }
  return "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n" + pixels;
}

}  // namespace markov
