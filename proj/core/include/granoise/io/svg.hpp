#pragma once

#include <optional>
#include <string>

#include "granoise/io/table.hpp"

namespace granoise::io {

enum class PlotKind { line, heatmap };

PlotKind plot_kind_from_string(std::string_view s);

struct PlotSpec {
    PlotKind kind = PlotKind::line;
    std::string x;
    std::string y;
    /// Colour column of a heatmap.
    std::string z;
    /// Line plots: one polyline per distinct value of this column.
    std::optional<std::string> group;
    bool log_x = false;
    bool log_y = false;
    bool log_z = false;
    std::string title;
};

/// Static SVG document. Heatmaps draw exactly one <rect class="cell"> per
/// table row. Throws ConfigError for a missing column, Error for an empty table.
std::string emit_svg(const Table& table, const PlotSpec& spec);

}  // namespace granoise::io
