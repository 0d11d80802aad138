#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "tandem/error.hpp"
#include "tandem/report.hpp"

namespace tandem {

namespace {

// Minimal SVG canvas: axes, ticks, polylines, a band polygon and text.
// The numeric truth lives in the data CSV; this is a readable picture.
struct Canvas {
    static constexpr double kWidth = 860.0;
    static constexpr double kHeight = 480.0;
    static constexpr double kLeft = 70.0;
    static constexpr double kRight = 790.0;
    static constexpr double kTop = 50.0;
    static constexpr double kBottom = 420.0;

    std::ostringstream svg;

    Canvas(const std::string& title) {
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
            << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
            << "\">\n";
        svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        svg << "<text x=\"" << (kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"16\">"
            << title << "</text>\n";
    }

    double x_of(double i, double i_min, double i_max) const {
        if (i_max == i_min) return (kLeft + kRight) / 2.0;
        return kLeft + (i - i_min) / (i_max - i_min) * (kRight - kLeft);
    }
    double y_of(double v, double v_min, double v_max) const {
        if (v_max == v_min) return (kTop + kBottom) / 2.0;
        return kBottom - (v - v_min) / (v_max - v_min) * (kBottom - kTop);
    }

    void axes() {
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
            << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
            << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
    }

    void right_axis() {
        svg << "<line x1=\"" << kRight << "\" y1=\"" << kTop << "\" x2=\"" << kRight
            << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
    }

    void x_tick(double x, const std::string& label) {
        svg << "<line class=\"xtick\" x1=\"" << x << "\" y1=\"" << kBottom << "\" x2=\"" << x
            << "\" y2=\"" << (kBottom + 6) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << (kBottom + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << label
            << "</text>\n";
    }

    void y_tick(double y, const std::string& label, bool right) {
        const double ax = right ? kRight : kLeft;
        svg << "<line x1=\"" << (right ? ax : ax - 6) << "\" y1=\"" << y << "\" x2=\""
            << (right ? ax + 6 : ax) << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << (right ? ax + 10 : ax - 10) << "\" y=\"" << (y + 4)
            << "\" text-anchor=\"" << (right ? "start" : "end")
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  double width = 2.0, bool dashed = false) {
        if (pts.empty()) return;
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
            << "\"";
        if (dashed) svg << " stroke-dasharray=\"6 4\"";
        svg << " points=\"";
        for (const auto& [x, y] : pts) svg << x << "," << y << " ";
        svg << "\"/>\n";
    }

    void band(const std::vector<std::pair<double, double>>& upper,
              const std::vector<std::pair<double, double>>& lower, const std::string& color) {
        if (upper.empty()) return;
        svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (const auto& [x, y] : upper) svg << x << "," << y << " ";
        for (auto it = lower.rbegin(); it != lower.rend(); ++it) svg << it->first << "," << it->second << " ";
        svg << "\"/>\n";
    }

    void legend_entry(double x, double y, const std::string& color, const std::string& label) {
        svg << "<line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << (x + 24) << "\" y2=\"" << y
            << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
        svg << "<text x=\"" << (x + 30) << "\" y=\"" << (y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << label << "</text>\n";
    }

    void label_y(const std::string& text, bool right) {
        const double x = right ? kWidth - 14 : 18;
        svg << "<text x=\"" << x << "\" y=\"" << ((kTop + kBottom) / 2)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
               "transform=\"rotate(-90 "
            << x << " " << ((kTop + kBottom) / 2) << ")\">" << text << "</text>\n";
    }

    void label_x(const std::string& text) {
        svg << "<text x=\"" << ((kLeft + kRight) / 2) << "\" y=\"" << (kHeight - 16)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << text
            << "</text>\n";
    }

    std::string finish() {
        svg << "</svg>\n";
        return svg.str();
    }
};

struct Range {
    double lo = 0.0;
    double hi = 1.0;
    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        const double margin = (hi - lo) * 0.05 + 1e-12;
        lo -= margin;
        hi += margin;
    }
};

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void add_y_ticks(Canvas& canvas, const Range& range, bool right) {
    for (int i = 0; i <= 5; ++i) {
        const double v = range.lo + (range.hi - range.lo) * i / 5.0;
        canvas.y_tick(canvas.y_of(v, range.lo, range.hi), tick_label(v), right);
    }
}

}  // namespace

PlotKind plot_kind_from_string(const std::string& s) {
    if (s == "agreeability_curves") return PlotKind::agreeability_curves;
    if (s == "dual_axis") return PlotKind::dual_axis;
    throw Error("unknown plot kind \"" + s +
                "\" (valid options: agreeability_curves, dual_axis)");
}

PlotFiles emit_plots(const ComparisonRun& run, PlotKind kind) {
    if (run.iterations.size() < 2)
        throw Error("emit_plots: need at least 2 iterations, run has " +
                    std::to_string(run.iterations.size()));

    const std::size_t n = run.iterations.size();
    const double i_min = 1.0;
    const double i_max = static_cast<double>(n);

    PlotFiles files;

    if (kind == PlotKind::agreeability_curves) {
        std::string csv =
            "iteration,best_agreeability,mean_agreeability,std_agreeability,band_low,band_high\n";
        Range range;
        range.lo = range.hi = run.iterations.front().best_agreeability;
        std::vector<std::pair<double, double>> best_pts, mean_pts, up_pts, lo_pts;

        for (const auto& it : run.iterations) {
            csv += std::to_string(it.index);
            csv += ',' + format_double(it.best_agreeability);
            csv += ',';
            range.include(it.best_agreeability);
            if (it.mean_agreeability) {
                const double mean = *it.mean_agreeability;
                const double sd = *it.std_agreeability;
                csv += format_double(mean);
                csv += ',' + format_double(sd);
                csv += ',' + format_double(mean - sd);
                csv += ',' + format_double(mean + sd);
                range.include(mean - sd);
                range.include(mean + sd);
            } else {
                csv += ",,,";
            }
            csv += '\n';
        }
        range.pad();

        Canvas canvas("Agreeability per elimination iteration");
        canvas.axes();
        for (const auto& it : run.iterations) {
            const double x = canvas.x_of(it.index, i_min, i_max);
            canvas.x_tick(x, std::to_string(it.index));
            best_pts.push_back({x, canvas.y_of(it.best_agreeability, range.lo, range.hi)});
            if (it.mean_agreeability) {
                mean_pts.push_back({x, canvas.y_of(*it.mean_agreeability, range.lo, range.hi)});
                up_pts.push_back({x, canvas.y_of(*it.mean_agreeability + *it.std_agreeability,
                                                 range.lo, range.hi)});
                lo_pts.push_back({x, canvas.y_of(*it.mean_agreeability - *it.std_agreeability,
                                                 range.lo, range.hi)});
            }
        }
        add_y_ticks(canvas, range, false);
        canvas.band(up_pts, lo_pts, "#ff7f0e");
        canvas.polyline(best_pts, "#1f77b4");
        canvas.polyline(mean_pts, "#ff7f0e");
        canvas.legend_entry(Canvas::kLeft + 10, Canvas::kTop + 8, "#1f77b4", "best");
        canvas.legend_entry(Canvas::kLeft + 110, Canvas::kTop + 8, "#ff7f0e",
                            "mean (+/- 1 std)");
        canvas.label_x("iteration");
        canvas.label_y("agreeability", false);
        files.svg = canvas.finish();
        files.data_csv = std::move(csv);
        return files;
    }

    // dual_axis: per-model best criterion scores on the right axis,
    // agreeability curves on the left.
    std::string csv =
        "iteration,m1_best_score,m2_best_score,best_agreeability,mean_agreeability\n";
    Range agree_range, score_range;
    agree_range.lo = agree_range.hi = run.iterations.front().best_agreeability;
    score_range.lo = score_range.hi = run.iterations.front().m1.best_score;
    for (const auto& it : run.iterations) {
        csv += std::to_string(it.index);
        csv += ',' + format_double(it.m1.best_score);
        csv += ',' + format_double(it.m2.best_score);
        csv += ',' + format_double(it.best_agreeability);
        csv += ',';
        if (it.mean_agreeability) csv += format_double(*it.mean_agreeability);
        csv += '\n';
        score_range.include(it.m1.best_score);
        score_range.include(it.m2.best_score);
        agree_range.include(it.best_agreeability);
        if (it.mean_agreeability) agree_range.include(*it.mean_agreeability);
    }
    agree_range.pad();
    score_range.pad();

    Canvas canvas("Model scores (right axis) vs agreeability (left axis)");
    canvas.axes();
    canvas.right_axis();
    std::vector<std::pair<double, double>> best_pts, mean_pts, m1_pts, m2_pts;
    for (const auto& it : run.iterations) {
        const double x = canvas.x_of(it.index, i_min, i_max);
        canvas.x_tick(x, std::to_string(it.index));
        best_pts.push_back({x, canvas.y_of(it.best_agreeability, agree_range.lo, agree_range.hi)});
        if (it.mean_agreeability)
            mean_pts.push_back(
                {x, canvas.y_of(*it.mean_agreeability, agree_range.lo, agree_range.hi)});
        m1_pts.push_back({x, canvas.y_of(it.m1.best_score, score_range.lo, score_range.hi)});
        m2_pts.push_back({x, canvas.y_of(it.m2.best_score, score_range.lo, score_range.hi)});
    }
    add_y_ticks(canvas, agree_range, false);
    add_y_ticks(canvas, score_range, true);
    canvas.polyline(best_pts, "#1f77b4");
    canvas.polyline(mean_pts, "#1f77b4", 2.0, /*dashed=*/true);
    canvas.polyline(m1_pts, "#2ca02c");
    canvas.polyline(m2_pts, "#d62728");
    canvas.legend_entry(Canvas::kLeft + 10, Canvas::kTop + 8, "#1f77b4", "best agreeability");
    canvas.legend_entry(Canvas::kLeft + 180, Canvas::kTop + 8, "#2ca02c",
                        "m1 " + run.config.criterion.str());
    canvas.legend_entry(Canvas::kLeft + 320, Canvas::kTop + 8, "#d62728",
                        "m2 " + run.config.criterion.str());
    canvas.label_x("iteration");
    canvas.label_y("agreeability", false);
    canvas.label_y(run.config.criterion.str(), true);
    files.svg = canvas.finish();
    files.data_csv = std::move(csv);
    return files;
}

}  // namespace tandem
