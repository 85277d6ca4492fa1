#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pwsim::svg {

// A polyline in data coordinates.
struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f6fb2";
  double width = 1.2;
  bool dashed = false;
};

// A single labelled point.
struct Marker {
  double x = 0.0;
  double y = 0.0;
  std::string color = "#c23b22";
  double radius = 3.0;
  bool filled = true;
  std::string label;
};

// Self-contained 2-D figure. Rendering is deterministic: same figure,
// same bytes.
struct Figure {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width_px = 760;
  int height_px = 520;
  std::vector<Series> series;
  std::vector<Marker> markers;
  // When unset, ranges are fitted to the data with a 5% pad.
  std::optional<double> x_min, x_max, y_min, y_max;
};

// Render to a standalone SVG document (XML header included).
std::string render(const Figure& fig);

// Render and write to disk. Throws IoError on failure.
void write_file(const Figure& fig, const std::string& path);

}  // namespace pwsim::svg
