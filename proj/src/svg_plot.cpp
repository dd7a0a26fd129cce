#include "colloidsim/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "colloidsim/errors.hpp"

namespace colloidsim {

namespace {

constexpr double kWidth = 800.0, kHeight = 500.0;
constexpr double kLeft = 80.0, kRight = 30.0, kTop = 40.0, kBottom = 60.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string cycles_svg(const std::vector<CycleRecord>& records, const RunMetadata& meta) {
    if (records.empty()) throw validation_error("cycles_svg: no records");

    double lo = records.front().r_b_after_bell, hi = lo;
    for (const auto& r : records) {
        lo = std::min({lo, r.r_b_after_bell, r.r_b_after_food});
        hi = std::max({hi, r.r_b_after_bell, r.r_b_after_food});
    }
    // Decade-aligned log axis.
    const double y_lo = std::floor(std::log10(lo));
    const double y_hi = std::ceil(std::log10(hi));
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const int n = static_cast<int>(records.size());

    auto x_of = [&](int cycle) {
        if (n == 1) return kLeft + plot_w / 2.0;
        return kLeft + plot_w * (cycle - 1) / static_cast<double>(n - 1);
    };
    auto y_of = [&](double r) {
        const double t = (std::log10(r) - y_lo) / (y_hi - y_lo);
        return kTop + plot_h * (1.0 - t);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
           "viewBox=\"0 0 800 500\">\n";
    svg += "<!--\n" + metadata_comments(meta) + "-->\n";
    svg += "<rect width=\"800\" height=\"500\" fill=\"#ffffff\"/>\n";

    // Decade gridlines and tick labels.
    for (double d = y_lo; d <= y_hi + 1e-9; d += 1.0) {
        const double y = y_of(std::pow(10.0, d));
        svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(y) + "\" x2=\"" +
               fmt(kWidth - kRight) + "\" y2=\"" + fmt(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        char label[32];
        std::snprintf(label, sizeof label, "1e%d", static_cast<int>(d));
        svg += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" + label +
               "</text>\n";
    }
    for (int c = 1; c <= n; ++c) {
        const double x = x_of(c);
        svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kHeight - kBottom + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               std::to_string(c) + "</text>\n";
    }

    // Axes.
    svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) +
           "\" y2=\"" + fmt(kHeight - kBottom) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kHeight - kBottom) + "\" x2=\"" +
           fmt(kWidth - kRight) + "\" y2=\"" + fmt(kHeight - kBottom) +
           "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(kLeft + plot_w / 2) + "\" y=\"" + fmt(kHeight - 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">cycle</text>\n";
    svg += "<text x=\"20\" y=\"" + fmt(kTop + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
           "transform=\"rotate(-90 20 " +
           fmt(kTop + plot_h / 2) + ")\">R_B (ohm)</text>\n";

    auto series = [&](auto pick, const char* color) {
        std::string pts;
        for (const auto& r : records) {
            pts += fmt(x_of(r.cycle_idx)) + "," + fmt(y_of(pick(r))) + " ";
        }
        std::string s = "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                        "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
        for (const auto& r : records)
            s += "<circle cx=\"" + fmt(x_of(r.cycle_idx)) + "\" cy=\"" + fmt(y_of(pick(r))) +
                 "\" r=\"3\" fill=\"" + color + "\"/>\n";
        return s;
    };
    svg += series([](const CycleRecord& r) { return r.r_b_after_bell; }, "#1f77b4");
    svg += series([](const CycleRecord& r) { return r.r_b_after_food; }, "#ff7f0e");

    // Legend.
    svg += "<rect x=\"" + fmt(kWidth - kRight - 170) + "\" y=\"" + fmt(kTop + 8) +
           "\" width=\"160\" height=\"48\" fill=\"#ffffff\" stroke=\"#999999\"/>\n";
    svg += "<line x1=\"" + fmt(kWidth - kRight - 160) + "\" y1=\"" + fmt(kTop + 24) + "\" x2=\"" +
           fmt(kWidth - kRight - 130) + "\" y2=\"" + fmt(kTop + 24) +
           "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(kWidth - kRight - 124) + "\" y=\"" + fmt(kTop + 28) +
           "\" font-family=\"sans-serif\" font-size=\"12\">after bell</text>\n";
    svg += "<line x1=\"" + fmt(kWidth - kRight - 160) + "\" y1=\"" + fmt(kTop + 44) + "\" x2=\"" +
           fmt(kWidth - kRight - 130) + "\" y2=\"" + fmt(kTop + 44) +
           "\" stroke=\"#ff7f0e\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(kWidth - kRight - 124) + "\" y=\"" + fmt(kTop + 48) +
           "\" font-family=\"sans-serif\" font-size=\"12\">after food</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace colloidsim
