///
/// \file svg.hpp
///
/// Minimal self-contained SVG output: line plots and grayscale heatmaps.
///
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hankelmc
{

struct Series
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot
{
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<Series> series;
};

/// Cell (i, j) is drawn at row i (top to bottom is reversed so row 0 is at
/// the bottom) and column j. Values are clamped to [vmin, vmax]; vmax maps to
/// white.
struct Heatmap
{
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> x_ticks;
    std::vector<std::string> y_ticks;
    Eigen::MatrixXd values;
    double vmin = 0.0;
    double vmax = 1.0;
};

std::string render_svg(const LinePlot& plot);
std::string render_svg(const Heatmap& map);

void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

} // namespace hankelmc
