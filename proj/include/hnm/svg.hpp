#pragma once

// Minimal SVG line/scatter plots with linear axes.

#include <string>
#include <vector>

#include "hnm/map_core.hpp"

namespace hnm {

class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel);

    void polyline(const std::vector<PlanarPoint>& pts, const std::string& color, double width = 1.5);
    void points(const std::vector<PlanarPoint>& pts, const std::string& color, double radius = 2.5);
    void segment(PlanarPoint a, PlanarPoint b, const std::string& color, double width = 3.0);
    void legend(const std::string& label, const std::string& color);

    std::string render(int width = 720, int height = 480) const;

private:
    struct Item {
        enum class Kind { Line, Dots, Segment } kind;
        std::vector<PlanarPoint> pts;
        std::string color;
        double size;
    };
    std::string title_, xlabel_, ylabel_;
    std::vector<Item> items_;
    std::vector<std::pair<std::string, std::string>> legend_;
};

/// Distinct colours for series i = 0, 1, ...
std::string series_color(std::size_t i);

}  // namespace hnm
