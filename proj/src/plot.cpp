#include "trajkit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace trajkit {

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// 1, 2 or 5 times a power of ten, at least x / 5.
double nice_step(double x) {
    if (!(x > 0.0)) return 1.0;
    const double raw = x / 5.0;
    const double p = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * p >= raw) return m * p;
    return 10.0 * p;
}

} // namespace

std::vector<BarPanel> error_panels(const io::Json& report) {
    const io::Json& cmp = report.contains("comparison") ? report.at("comparison") : report;
    std::vector<BarPanel> panels;
    try {
        for (const char* method : {"adams", "mlp"}) {
            if (!cmp.contains(method)) continue;
            const auto& m = cmp.at(method);
            const auto& with = m.at("with_recognition");
            const auto& without = m.at("without_recognition");
            BarPanel p;
            p.title = method;
            for (auto s : kAllStates) {
                const std::string key(state_name(s));
                p.groups.push_back({key, with.at("per_state").at(key).at("mu").get<double>(),
                                    without.at("per_state").at(key).at("mu").get<double>()});
            }
            p.groups.push_back({"overall", with.at("overall").at("mu").get<double>(),
                                without.at("overall").at("mu").get<double>()});
            panels.push_back(std::move(p));
        }
    } catch (const io::Json::exception& e) {
        throw Error(ErrorKind::IoError, std::string("report lacks comparison data: ") + e.what());
    }
    if (panels.empty()) throw Error(ErrorKind::IoError, "report has no adams or mlp comparison");
    return panels;
}

std::string grouped_bar_svg(std::span<const BarPanel> panels, const std::string& title) {
    constexpr double panel_w = 420, panel_h = 300, left = 56, right = 16, top = 48, bottom = 56;
    const double width = static_cast<double>(panels.size()) * panel_w;
    const double height = panel_h + 40;
    const char* with_color = "#2b6cb0";
    const char* without_color = "#c05621";

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", width) + "\" height=\"" +
                      fmt("%.0f", height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(title) + "</text>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& p = panels[pi];
        const double x0 = static_cast<double>(pi) * panel_w + left;
        const double plot_w = panel_w - left - right;
        const double plot_h = panel_h - top - bottom + 40;
        const double y0 = top + plot_h;  // baseline

        double vmax = 0.0;
        for (const auto& g : p.groups) vmax = std::max({vmax, g.with, g.without});
        const double step = nice_step(vmax);
        const double ymax = std::max(step, std::ceil(vmax / step) * step);
        auto ypix = [&](double v) { return y0 - v / ymax * plot_h; };

        svg += "<text x=\"" + fmt("%.1f", x0 + plot_w / 2) + "\" y=\"" + fmt("%.1f", top - 10) +
               "\" text-anchor=\"middle\" font-size=\"13\">" + escape(p.title) + "</text>\n";
        for (double v = 0.0; v <= ymax + 1e-9 * ymax; v += step) {
            const double y = ypix(v);
            svg += "<line x1=\"" + fmt("%.1f", x0) + "\" x2=\"" + fmt("%.1f", x0 + plot_w) + "\" y1=\"" +
                   fmt("%.1f", y) + "\" y2=\"" + fmt("%.1f", y) + "\" stroke=\"#ddd\"/>\n";
            svg += "<text x=\"" + fmt("%.1f", x0 - 6) + "\" y=\"" + fmt("%.1f", y + 4) + "\" text-anchor=\"end\">" +
                   fmt("%g", v) + "</text>\n";
        }
        svg += "<text transform=\"translate(" + fmt("%.1f", x0 - 40) + "," + fmt("%.1f", top + plot_h / 2) +
               ") rotate(-90)\" text-anchor=\"middle\">mean error (m)</text>\n";

        const double slot = plot_w / static_cast<double>(p.groups.size());
        const double bar = slot * 0.35;
        for (std::size_t gi = 0; gi < p.groups.size(); ++gi) {
            const auto& g = p.groups[gi];
            const double cx = x0 + slot * (static_cast<double>(gi) + 0.5);
            for (int k = 0; k < 2; ++k) {
                const double v = k == 0 ? g.with : g.without;
                const double x = k == 0 ? cx - bar : cx;
                svg += "<rect x=\"" + fmt("%.1f", x) + "\" y=\"" + fmt("%.1f", ypix(v)) + "\" width=\"" +
                       fmt("%.1f", bar) + "\" height=\"" + fmt("%.1f", y0 - ypix(v)) + "\" fill=\"" +
                       (k == 0 ? with_color : without_color) + "\"><title>" + escape(g.label) +
                       (k == 0 ? " with: " : " without: ") + fmt("%.4g", v) + " m</title></rect>\n";
            }
            svg += "<text x=\"" + fmt("%.1f", cx) + "\" y=\"" + fmt("%.1f", y0 + 16) + "\" text-anchor=\"middle\">" +
                   escape(g.label) + "</text>\n";
        }
        svg += "<line x1=\"" + fmt("%.1f", x0) + "\" x2=\"" + fmt("%.1f", x0 + plot_w) + "\" y1=\"" +
               fmt("%.1f", y0) + "\" y2=\"" + fmt("%.1f", y0) + "\" stroke=\"black\"/>\n";
    }

    const double ly = height - 14;
    svg += "<rect x=\"16\" y=\"" + fmt("%.1f", ly - 9) + "\" width=\"10\" height=\"10\" fill=\"" + with_color +
           "\"/><text x=\"30\" y=\"" + fmt("%.1f", ly) + "\">with recognition</text>\n";
    svg += "<rect x=\"140\" y=\"" + fmt("%.1f", ly - 9) + "\" width=\"10\" height=\"10\" fill=\"" + without_color +
           "\"/><text x=\"154\" y=\"" + fmt("%.1f", ly) + "\">without recognition</text>\n";
    svg += "</svg>\n";
    return svg;
}

std::string bar_series_csv(std::span<const BarPanel> panels) {
    std::string out = "method,group,with,without\n";
    for (const auto& p : panels)
        for (const auto& g : p.groups)
            out += p.title + "," + g.label + "," + io::format_double(g.with) + "," + io::format_double(g.without) + "\n";
    return out;
}

} // namespace trajkit
