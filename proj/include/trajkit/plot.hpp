// plot.hpp
#ifndef TRAJKIT_PLOT_HPP_
#define TRAJKIT_PLOT_HPP_

#include "trajkit/io.hpp"

#include <span>
#include <string>
#include <vector>

namespace trajkit {

struct BarGroup {
    std::string label;
    double with = 0.0;
    double without = 0.0;
};

struct BarPanel {
    std::string title;
    std::vector<BarGroup> groups;
};

/// One panel per method: per-state and overall mean error with and without
/// recognition. Accepts a full report or just its "comparison" object.
std::vector<BarPanel> error_panels(const io::Json& report);

/// Side-by-side grouped bar charts, one per panel, sharing a legend.
std::string grouped_bar_svg(std::span<const BarPanel> panels, const std::string& title);

/// method,group,with,without
std::string bar_series_csv(std::span<const BarPanel> panels);

} // namespace trajkit

#endif // TRAJKIT_PLOT_HPP_
