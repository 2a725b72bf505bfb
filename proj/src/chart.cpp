#include "motionspc/chart.hpp"

#include "motionspc/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace motionspc {

namespace {

constexpr std::array<std::string_view, 12> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
};

std::string num(double value, int precision = 2) {
    if (value == 0.0) value = 0.0;  // no "-0.00"
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed, precision);
    if (ec != std::errc()) return "0";
    std::string out(buffer, end);
    if (out == "-0.00") out = "0.00";
    return out;
}

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

void check_dimensions(const ChartSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0) {
        throw Error(ErrorCode::InvalidArgument, "chart dimensions must be positive");
    }
}

std::string open_document(const ChartSpec& spec) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
           std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
           std::to_string(spec.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<title>" + escape(spec.title) + "</title>\n";
    if (!spec.description.empty()) out += "<desc>" + escape(spec.description) + "</desc>\n";
    out += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
           std::to_string(spec.height) + "\" fill=\"#ffffff\"/>\n";
    return out;
}

/// Linear map from data interval to pixel interval.
struct Scale {
    double d0, d1, p0, p1;
    double operator()(double v) const { return p0 + (v - d0) / (d1 - d0) * (p1 - p0); }
};

std::pair<double, double> padded(double lo, double hi) {
    if (!(hi > lo)) {
        const double half = std::max(std::abs(lo) * 0.05, 0.01);
        return {lo - half, hi + half};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

void text(std::string& out, double x, double y, std::string_view anchor, std::string_view content,
          std::string_view extra = {}) {
    out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + std::string(anchor) + "\"";
    if (!extra.empty()) out += " " + std::string(extra);
    out += ">" + escape(content) + "</text>\n";
}

}  // namespace

std::string landmark_color(LandmarkId id) {
    return std::string(kPalette[static_cast<std::size_t>(id.index()) % kPalette.size()]);
}

std::string render_control_chart(const TsquaredSeries& series, double ucl, const ChartSpec& spec) {
    check_dimensions(spec);
    if (series.values.empty()) throw Error(ErrorCode::EmptySeries, "control chart of an empty series");
    if (series.values.size() != series.frame_indices.size()) {
        throw Error(ErrorCode::LengthMismatch, "series values and frame indices differ in length");
    }

    const double left = 70, right = 20, top = 40, bottom = 50;
    const double plot_w = std::max(1.0, spec.width - left - right);
    const double plot_h = std::max(1.0, spec.height - top - bottom);

    auto [fmin, fmax] = std::minmax_element(series.frame_indices.begin(), series.frame_indices.end());
    double x0 = static_cast<double>(*fmin), x1 = static_cast<double>(*fmax);
    if (!(x1 > x0)) {
        x0 -= 1.0;
        x1 += 1.0;
    }
    double ymax = std::max(*std::max_element(series.values.begin(), series.values.end()), ucl) * 1.05;
    if (!(ymax > 0.0)) ymax = 1.0;
    const Scale sx{x0, x1, left, left + plot_w};
    const Scale sy{0.0, ymax, top + plot_h, top};

    std::string out = open_document(spec);
    text(out, spec.width / 2.0, top / 2.0 + 4, "middle", spec.title, "font-size=\"14\"");

    out += "<path class=\"axes\" d=\"M" + num(left) + " " + num(top) + " V" + num(top + plot_h) + " H" +
           num(left + plot_w) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
    out += "<g class=\"ticks\" fill=\"#333333\">\n";
    std::string tick_path;
    for (int k = 0; k <= 4; ++k) {
        const double yv = ymax * k / 4.0;
        const double xv = x0 + (x1 - x0) * k / 4.0;
        tick_path += "M" + num(left - 4) + " " + num(sy(yv)) + " H" + num(left) + " ";
        tick_path += "M" + num(sx(xv)) + " " + num(top + plot_h) + " V" + num(top + plot_h + 4) + " ";
        text(out, left - 6, sy(yv) + 4, "end", num(yv, 1));
        text(out, sx(xv), top + plot_h + 16, "middle", num(xv, 0));
    }
    out += "<path class=\"tick-marks\" d=\"" + tick_path + "\" stroke=\"#000000\"/>\n";
    out += "</g>\n";

    out += "<polyline class=\"series\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (i) out += ' ';
        out += num(sx(static_cast<double>(series.frame_indices[i]))) + "," + num(sy(series.values[i]));
    }
    out += "\"/>\n";

    out += "<line class=\"ucl\" x1=\"" + num(left) + "\" y1=\"" + num(sy(ucl)) + "\" x2=\"" + num(left + plot_w) +
           "\" y2=\"" + num(sy(ucl)) + "\" stroke=\"#d62728\" stroke-dasharray=\"6 4\"/>\n";
    text(out, left + plot_w - 4, sy(ucl) - 4, "end", "UCL = " + num(ucl, 3), "fill=\"#d62728\"");

    out += "<g class=\"warnings\" fill=\"" + escape(spec.marker_color) + "\">\n";
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (!(series.values[i] > ucl)) continue;
        out += "<circle class=\"warning\" cx=\"" + num(sx(static_cast<double>(series.frame_indices[i]))) +
               "\" cy=\"" + num(sy(series.values[i])) + "\" r=\"" + num(spec.marker_radius) + "\"/>\n";
    }
    out += "</g>\n";

    text(out, left + plot_w / 2.0, spec.height - 10.0, "middle", spec.x_label);
    text(out, 16, top + plot_h / 2.0, "middle", spec.y_label,
         "transform=\"rotate(-90 16 " + num(top + plot_h / 2.0) + ")\"");
    out += "</svg>\n";
    return out;
}

std::string render_trajectory(const LandmarkStream& stream, const LandmarkSelection& selection,
                              const ChartSpec& spec) {
    check_dimensions(spec);
    if (stream.empty()) throw Error(ErrorCode::EmptyStream, "trajectory of an empty stream");

    // positions[landmark][frame]
    std::vector<std::vector<Vec3>> positions(selection.size());
    for (const auto& frame : stream.frames()) {
        for (std::size_t k = 0; k < selection.size(); ++k) {
            const LandmarkId id = selection.ids()[k];
            const LandmarkPoint* p = frame.find(id);
            if (!p) {
                throw Error(ErrorCode::MissingLandmark, "frame " + std::to_string(frame.frame_index()) +
                                                            " lacks landmark " + std::to_string(id.index()));
            }
            positions[k].push_back(p->position);
        }
    }

    const double legend_h = 20.0 + 16.0 * std::ceil(static_cast<double>(selection.size()) / 4.0);
    const double top = 40, gap = 30, side = 20;
    const double panel_w = std::max(1.0, (spec.width - 2 * side - 2 * gap) / 3.0);
    const double panel_h = std::max(1.0, spec.height - top - legend_h - 30);

    std::string out = open_document(spec);
    text(out, spec.width / 2.0, 24, "middle", spec.title, "font-size=\"14\"");

    // Image convention: the vertical coordinate grows downward in every panel.
    constexpr std::array<std::pair<int, int>, 3> projections = {{{0, 1}, {0, 2}, {1, 2}}};
    for (std::size_t k = 0; k < projections.size(); ++k) {
        const auto [ha, va] = projections[k];
        const std::string name = std::string(1, axis_char(static_cast<Axis>(ha))) + "-" +
                                 std::string(1, axis_char(static_cast<Axis>(va)));
        double hmin = positions[0][0][ha], hmax = hmin, vmin = positions[0][0][va], vmax = vmin;
        for (const auto& track : positions) {
            for (const auto& p : track) {
                hmin = std::min(hmin, p[ha]);
                hmax = std::max(hmax, p[ha]);
                vmin = std::min(vmin, p[va]);
                vmax = std::max(vmax, p[va]);
            }
        }
        const auto [h0, h1] = padded(hmin, hmax);
        const auto [v0, v1] = padded(vmin, vmax);
        const double px = side + static_cast<double>(k) * (panel_w + gap);
        const Scale sh{h0, h1, px, px + panel_w};
        const Scale sv{v0, v1, top, top + panel_h};

        out += "<g class=\"panel\" data-projection=\"" + name + "\">\n";
        out += "<rect class=\"frame\" x=\"" + num(px) + "\" y=\"" + num(top) + "\" width=\"" + num(panel_w) +
               "\" height=\"" + num(panel_h) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
        text(out, px + panel_w / 2.0, top + panel_h + 16, "middle", name);
        for (std::size_t i = 0; i < selection.size(); ++i) {
            std::string points;
            std::string last;
            for (const auto& p : positions[i]) {
                std::string pt = num(sh(p[ha])) + "," + num(sv(p[va]));
                if (pt == last) continue;
                if (!points.empty()) points += ' ';
                points += pt;
                last = std::move(pt);
            }
            out += "<polyline class=\"trajectory\" data-landmark=\"" + std::to_string(selection.ids()[i].index()) +
                   "\" fill=\"none\" stroke=\"" + landmark_color(selection.ids()[i]) + "\" points=\"" + points +
                   "\"/>\n";
        }
        out += "</g>\n";
    }

    out += "<g class=\"legend\">\n";
    const double legend_top = top + panel_h + 30;
    for (std::size_t i = 0; i < selection.size(); ++i) {
        const LandmarkId id = selection.ids()[i];
        const double lx = side + static_cast<double>(i % 4) * ((spec.width - 2 * side) / 4.0);
        const double ly = legend_top + 16.0 * static_cast<double>(i / 4);
        out += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly) + "\" width=\"10\" height=\"10\" fill=\"" +
               landmark_color(id) + "\"/>\n";
        text(out, lx + 14, ly + 9, "start", std::to_string(id.index()) + " " + std::string(id.name()));
    }
    out += "</g>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace motionspc
