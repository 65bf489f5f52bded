#pragma once

#include <string>
#include <vector>

namespace mati::cli {

struct Series {
    std::string name;
    std::vector<double> x, y;
};

// Minimal standalone SVG line chart with axes, ticks and a legend.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series);

}  // namespace mati::cli
