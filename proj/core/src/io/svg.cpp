#include "granoise/io/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "granoise/errors.hpp"

namespace granoise::io {

namespace {

constexpr double width = 720.0;
constexpr double height = 480.0;
constexpr double left = 80.0;
constexpr double right = 150.0;
constexpr double top = 40.0;
constexpr double bottom = 60.0;

std::string xml_escape(std::string_view s) {
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

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    bool log = false;

    void include(double v) {
        if (!std::isfinite(v) || (log && v <= 0.0)) return;
        const double t = log ? std::log10(v) : v;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
    void finalize() {
        if (!(lo <= hi)) lo = 0.0, hi = 1.0;
        if (lo == hi) lo -= 0.5, hi += 0.5;
    }
    double unit(double v) const { return ((log ? std::log10(v) : v) - lo) / (hi - lo); }
};

// Perceptually ordered dark-blue to yellow ramp.
std::string colour(double t) {
    static const std::array<std::array<double, 3>, 5> stops = {
        {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    const double f = t - static_cast<double>(i);
    std::ostringstream s;
    s << "rgb(";
    for (int c = 0; c < 3; ++c) s << (c ? "," : "") << static_cast<int>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c])));
    s << ")";
    return s.str();
}

void axes(std::ostringstream& svg, const PlotSpec& spec, const Range& xr, const Range& yr) {
    const double pw = width - left - right, ph = height - top - bottom;
    svg << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
        << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n"
        << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int k = 0; k <= 4; ++k) {
        const double t = k / 4.0;
        const double xv = xr.lo + t * (xr.hi - xr.lo), yv = yr.lo + t * (yr.hi - yr.lo);
        svg << "<text x=\"" << left + t * pw << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
            << (xr.log ? "1e" + fmt(xv) : fmt(xv)) << "</text>\n"
            << "<text x=\"" << left - 6 << "\" y=\"" << top + ph - t * ph + 4 << "\" text-anchor=\"end\">"
            << (yr.log ? "1e" + fmt(yv) : fmt(yv)) << "</text>\n";
    }
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
        << xml_escape(spec.x) << "</text>\n"
        << "<text x=\"20\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 20 " << top + ph / 2
        << ")\" text-anchor=\"middle\">" << xml_escape(spec.y) << "</text>\n";
    if (!spec.title.empty())
        svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
            << xml_escape(spec.title) << "</text>\n";
    svg << "</g>\n";
}

double value_or_nan(const Table& t, std::size_t row, std::size_t col) {
    const Cell& c = t.rows[row][col];
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    return std::numeric_limits<double>::quiet_NaN();
}

std::string cell_label(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return fmt(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    return "";
}

}  // namespace

PlotKind plot_kind_from_string(std::string_view s) {
    if (s == "line") return PlotKind::line;
    if (s == "heatmap") return PlotKind::heatmap;
    throw ConfigError("unknown plot kind '" + std::string(s) + "' (expected line|heatmap)");
}

std::string emit_svg(const Table& table, const PlotSpec& spec) {
    if (table.rows.empty()) throw Error("emit_svg: table has no data rows");
    const std::size_t cx = table.column_index(spec.x);
    const std::size_t cy = table.column_index(spec.y);
    const double pw = width - left - right, ph = height - top - bottom;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";

    Range xr{.log = spec.log_x}, yr{.log = spec.log_y};
    if (spec.kind == PlotKind::line) {
        std::map<std::string, std::vector<std::size_t>> groups;
        std::vector<std::string> order;
        const std::optional<std::size_t> cg =
            spec.group ? std::optional<std::size_t>(table.column_index(*spec.group)) : std::nullopt;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const std::string key = cg ? cell_label(table.rows[r][*cg]) : "";
            if (!groups.count(key)) order.push_back(key);
            groups[key].push_back(r);
            xr.include(value_or_nan(table, r, cx));
            yr.include(value_or_nan(table, r, cy));
        }
        xr.finalize();
        yr.finalize();
        axes(svg, spec, xr, yr);
        for (std::size_t g = 0; g < order.size(); ++g) {
            const std::string col = colour(order.size() == 1 ? 0.0 : static_cast<double>(g) / (order.size() - 1));
            svg << "<polyline class=\"series\" fill=\"none\" stroke-width=\"1.5\" stroke=\"" << col << "\" points=\"";
            for (std::size_t r : groups[order[g]]) {
                const double x = value_or_nan(table, r, cx), y = value_or_nan(table, r, cy);
                if (!xr.usable(x) || !yr.usable(y)) continue;
                svg << fmt(left + xr.unit(x) * pw) << "," << fmt(top + ph - yr.unit(y) * ph) << " ";
            }
            svg << "\"/>\n";
            if (cg)
                svg << "<text x=\"" << width - right + 10 << "\" y=\"" << top + 14 * (g + 1)
                    << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << col << "\">"
                    << xml_escape(*spec.group + " = " + order[g]) << "</text>\n";
        }
    } else {
        const std::size_t cz = table.column_index(spec.z);
        std::vector<double> xs, ys;
        Range zr{.log = spec.log_z};
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            xs.push_back(value_or_nan(table, r, cx));
            ys.push_back(value_or_nan(table, r, cy));
            zr.include(value_or_nan(table, r, cz));
        }
        std::vector<double> ux = xs, uy = ys;
        for (auto* u : {&ux, &uy}) {
            std::sort(u->begin(), u->end());
            u->erase(std::unique(u->begin(), u->end()), u->end());
        }
        zr.finalize();
        xr.lo = 0, xr.hi = static_cast<double>(ux.size());
        yr.lo = 0, yr.hi = static_cast<double>(uy.size());
        const double cw = pw / ux.size(), ch = ph / uy.size();
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto ix = std::lower_bound(ux.begin(), ux.end(), xs[r]) - ux.begin();
            const auto iy = std::lower_bound(uy.begin(), uy.end(), ys[r]) - uy.begin();
            const double z = value_or_nan(table, r, cz);
            svg << "<rect class=\"cell\" x=\"" << fmt(left + ix * cw) << "\" y=\"" << fmt(top + ph - (iy + 1) * ch)
                << "\" width=\"" << fmt(cw) << "\" height=\"" << fmt(ch) << "\" fill=\""
                << (zr.usable(z) ? colour(zr.unit(z)) : std::string("rgb(200,200,200)")) << "\"/>\n";
        }
        svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n"
            << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
            << xml_escape(spec.x) << " (" << fmt(ux.front()) << " to " << fmt(ux.back()) << ")</text>\n"
            << "<text x=\"20\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 20 " << top + ph / 2
            << ")\" text-anchor=\"middle\">" << xml_escape(spec.y) << " (" << fmt(uy.front()) << " to "
            << fmt(uy.back()) << ")</text>\n"
            << "<text x=\"" << width - right + 10 << "\" y=\"" << top + 14 << "\">" << xml_escape(spec.z)
            << (spec.log_z ? " (log10)" : "") << "</text>\n"
            << "<text x=\"" << width - right + 10 << "\" y=\"" << top + 30 << "\">max " << fmt(zr.hi) << "</text>\n"
            << "<text x=\"" << width - right + 10 << "\" y=\"" << top + 46 << "\">min " << fmt(zr.lo) << "</text>\n";
        if (!spec.title.empty())
            svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
                << xml_escape(spec.title) << "</text>\n";
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace granoise::io
