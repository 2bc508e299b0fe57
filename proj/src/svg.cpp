#include <algorithm>
#include <cmath>
#include <sstream>

#include "etairl/runner.hpp"
#include "etairl/serialize.hpp"

namespace etairl {

namespace {

const char* kPalette[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e"};

}  // namespace

std::string render_line_svg(const std::string& title, const std::string& x_label,
                            const std::vector<double>& xs,
                            const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    const int width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 50;
    const double plot_w = width - left - right, plot_h = height - top - bottom;

    double x_min = xs.empty() ? 0.0 : *std::min_element(xs.begin(), xs.end());
    double x_max = xs.empty() ? 1.0 : *std::max_element(xs.begin(), xs.end());
    double y_min = 0.0, y_max = 1e-12;
    for (const auto& [name, ys] : series)
        for (double y : ys)
            if (std::isfinite(y)) {
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
    if (x_max <= x_min) x_max = x_min + 1.0;
    if (y_max <= y_min) y_max = y_min + 1.0;

    auto px = [&](double x) { return left + plot_w * (x - x_min) / (x_max - x_min); };
    auto py = [&](double y) { return top + plot_h * (1.0 - (y - y_min) / (y_max - y_min)); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << title << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    svg << "<text x=\"" << left << "\" y=\"" << height - 30
        << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(x_min) << "</text>\n";
    svg << "<text x=\"" << left + plot_w << "\" y=\"" << height - 30
        << "\" text-anchor=\"middle\" font-size=\"11\">" << format_double(x_max) << "</text>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << top + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(y_max) << "</text>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << top + plot_h + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(y_min) << "</text>\n";

    int color = 0;
    for (const auto& [name, ys] : series) {
        const char* stroke = kPalette[color % 5];
        std::ostringstream pts;
        for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
            if (!std::isfinite(ys[i])) continue;
            pts << px(xs[i]) << ',' << py(ys[i]) << ' ';
        }
        svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\""
            << pts.str() << "\"/>\n";
        for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i)
            if (std::isfinite(ys[i]))
                svg << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(ys[i])
                    << "\" r=\"3\" fill=\"" << stroke << "\"/>\n";
        svg << "<text x=\"" << width - right - 4 << "\" y=\"" << top + 16 + 16 * color
            << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << stroke << "\">" << name
            << "</text>\n";
        ++color;
    }

    svg << "<!-- data\nx," << x_label << '\n';
    for (std::size_t i = 0; i < xs.size(); ++i) {
        svg << format_double(xs[i]);
        for (const auto& [name, ys] : series)
            svg << ',' << (i < ys.size() ? format_double(ys[i]) : "");
        svg << '\n';
    }
    svg << "-->\n</svg>\n";
    return svg.str();
}

}  // namespace etairl
