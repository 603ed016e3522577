#pragma once

#include <szo/harness/csv.hpp>
#include <szo/harness/grid.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace szo::harness {

struct PlotOptions {
    std::int64_t burn_in = 1000;  // checkpoints below this are dropped
    int width = 720;
    int height = 440;
    std::string title = "cumulative regret";
};

struct Curve {
    std::string algo;
    std::vector<std::int64_t> queries;
    std::vector<double> median_regret;
};

/// Median over seeds of cum_regret_iter at every checkpoint, per algorithm.
inline std::vector<Curve> regret_curves(const std::vector<TraceRecord>& rows, std::int64_t burn_in) {
    std::map<std::string, std::map<std::int64_t, std::vector<double>>> grouped;
    for (const auto& r : rows)
        if (r.row.queries_used >= burn_in) grouped[r.algo][r.row.queries_used].push_back(r.row.cum_regret_iter);
    std::vector<Curve> out;
    for (const auto& [algo, by_q] : grouped) {
        Curve c;
        c.algo = algo;
        for (const auto& [q, values] : by_q) {
            c.queries.push_back(q);
            c.median_regret.push_back(median(values));
        }
        out.push_back(std::move(c));
    }
    return out;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += ch;
        }
    }
    return out;
}

/// Regret-vs-queries chart, log10 y axis, one polyline per algorithm.
inline std::string render_svg(const std::vector<Curve>& curves, const PlotOptions& opt) {
    require(!curves.empty(), "nothing to plot");
    constexpr double floor_value = 1e-12;
    const double left = 70, right = 150, top = 40, bottom = 50;
    const double w = opt.width - left - right;
    const double h = opt.height - top - bottom;

    std::int64_t q_min = INT64_MAX, q_max = 0;
    double y_lo = INFINITY, y_hi = -INFINITY;
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.queries.size(); ++i) {
            q_min = std::min(q_min, c.queries[i]);
            q_max = std::max(q_max, c.queries[i]);
            const double ly = std::log10(std::max(c.median_regret[i], floor_value));
            y_lo = std::min(y_lo, ly);
            y_hi = std::max(y_hi, ly);
        }
    y_lo = std::floor(y_lo);
    y_hi = std::ceil(y_hi);
    if (y_hi <= y_lo) y_hi = y_lo + 1;
    const double q_span = q_max > q_min ? static_cast<double>(q_max - q_min) : 1.0;

    auto px = [&](std::int64_t q) { return left + w * static_cast<double>(q - q_min) / q_span; };
    auto py = [&](double v) {
        const double ly = std::log10(std::max(v, floor_value));
        return top + h * (y_hi - ly) / (y_hi - y_lo);
    };
    auto num = [](double v) { return format_double(std::round(v * 100.0) / 100.0); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) + "\" height=\"" +
           std::to_string(opt.height) + "\" viewBox=\"0 0 " + std::to_string(opt.width) + " " +
           std::to_string(opt.height) + "\">\n";
    svg += "  <rect x=\"0\" y=\"0\" width=\"" + std::to_string(opt.width) + "\" height=\"" +
           std::to_string(opt.height) + "\" fill=\"white\"/>\n";
    svg += "  <text x=\"" + num(left + w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + xml_escape(opt.title) + "</text>\n";
    // axes
    svg += "  <g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    svg += "    <line x1=\"" + num(left) + "\" y1=\"" + num(top + h) + "\" x2=\"" + num(left + w) + "\" y2=\"" +
           num(top + h) + "\"/>\n";
    svg += "    <line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" +
           num(top + h) + "\"/>\n";
    svg += "  </g>\n";
    // y ticks at powers of ten
    svg += "  <g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double e = y_lo; e <= y_hi + 1e-9; e += 1.0) {
        const double y = top + h * (y_hi - e) / (y_hi - y_lo);
        svg += "    <line x1=\"" + num(left - 4) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left) + "\" y2=\"" +
               num(y) + "\" stroke=\"black\"/>\n";
        svg += "    <text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">1e" +
               std::to_string(static_cast<int>(e)) + "</text>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        const auto q = q_min + static_cast<std::int64_t>(std::llround(q_span * k / 4.0));
        const double x = px(q);
        svg += "    <line x1=\"" + num(x) + "\" y1=\"" + num(top + h) + "\" x2=\"" + num(x) + "\" y2=\"" +
               num(top + h + 4) + "\" stroke=\"black\"/>\n";
        svg += "    <text x=\"" + num(x) + "\" y=\"" + num(top + h + 18) + "\" text-anchor=\"middle\">" +
               std::to_string(q) + "</text>\n";
    }
    svg += "    <text x=\"" + num(left + w / 2) + "\" y=\"" + num(top + h + 40) +
           "\" text-anchor=\"middle\">oracle queries</text>\n";
    svg += "  </g>\n";

    for (std::size_t c = 0; c < curves.size(); ++c) {
        const char* color = palette[c % (sizeof(palette) / sizeof(palette[0]))];
        std::string points;
        for (std::size_t i = 0; i < curves[c].queries.size(); ++i) {
            if (!points.empty()) points += ' ';
            points += num(px(curves[c].queries[i])) + "," + num(py(curves[c].median_regret[i]));
        }
        svg += "  <polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" +
               points + "\"/>\n";
        const double ly = top + 16 + 20.0 * static_cast<double>(c);
        svg += "  <line x1=\"" + num(left + w + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(left + w + 40) +
               "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "  <text x=\"" + num(left + w + 46) + "\" y=\"" + num(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(curves[c].algo) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

/// Reads trace CSVs, renders median cumulative regret curves and writes the
/// SVG. Nothing is written when no row survives the burn-in filter.
inline void emit_plot(const std::vector<std::string>& csv_paths, const std::string& out_path,
                      const PlotOptions& opt = {}) {
    require(!csv_paths.empty(), "no CSV inputs given");
    std::vector<TraceRecord> rows;
    for (const auto& path : csv_paths) {
        auto part = read_trace_csv(path);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    const auto curves = regret_curves(rows, opt.burn_in);
    if (curves.empty()) throw Error("no rows left after the burn-in filter of " + std::to_string(opt.burn_in));
    write_text(out_path, render_svg(curves, opt));
}

}  // namespace szo::harness
