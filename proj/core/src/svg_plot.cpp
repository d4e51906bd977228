#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace otfsprony::detail
{
namespace
{

constexpr double width   = 640;
constexpr double height  = 420;
constexpr double margin_left   = 70;
constexpr double margin_right  = 150;
constexpr double margin_top    = 40;
constexpr double margin_bottom = 55;

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                               "#bcbd22", "#17becf"};

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

std::string tick(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (const char c : s)
    {
        switch (c)
        {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string header(const Axes& axes)
{
    std::string s =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
        "\" height=\"" + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         escape(axes.title) + "</text>\n";
    const double x_mid = margin_left + (width - margin_left - margin_right) / 2;
    s += "<text x=\"" + num(x_mid) + "\" y=\"" + num(height - 12) +
         "\" text-anchor=\"middle\">" + escape(axes.x_label) + "</text>\n";
    const double y_mid = margin_top + (height - margin_top - margin_bottom) / 2;
    s += "<text x=\"16\" y=\"" + num(y_mid) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(y_mid) + ")\">" + escape(axes.y_label) + "</text>\n";
    return s;
}

} // namespace

std::string render_plot(const Axes& axes, const std::vector<Series>& series)
{
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    auto y_of = [&](double y) { return axes.log_y ? std::log10(std::max(y, 1e-300)) : y; };
    for (const auto& s : series)
    {
        for (const auto& [x, y] : s.points)
        {
            if (!std::isfinite(x) || !std::isfinite(y))
            {
                continue;
            }
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y_of(y));
            y_hi = std::max(y_hi, y_of(y));
        }
    }
    if (!std::isfinite(x_lo))
    {
        x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    }
    if (x_hi == x_lo) x_hi = x_lo + 1;
    if (y_hi == y_lo) y_hi = y_lo + 1;

    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;
    auto px = [&](double x) { return margin_left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto py = [&](double y) { return margin_top + (1.0 - (y_of(y) - y_lo) / (y_hi - y_lo)) * plot_h; };

    std::string s = header(axes);
    s += "<rect x=\"" + num(margin_left) + "\" y=\"" + num(margin_top) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i)
    {
        const double fx = x_lo + (x_hi - x_lo) * i / 4.0;
        const double fy = y_lo + (y_hi - y_lo) * i / 4.0;
        const double gx = margin_left + plot_w * i / 4.0;
        const double gy = margin_top + plot_h * (1.0 - i / 4.0);
        s += "<text x=\"" + num(gx) + "\" y=\"" + num(margin_top + plot_h + 16) +
             "\" text-anchor=\"middle\">" + tick(fx) + "</text>\n";
        s += "<text x=\"" + num(margin_left - 6) + "\" y=\"" + num(gy + 4) +
             "\" text-anchor=\"end\">" + (axes.log_y ? "1e" + tick(fy) : tick(fy)) + "</text>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k)
    {
        const char* colour = palette[k % std::size(palette)];
        const auto& pts    = series[k].points;
        if (series[k].markers_only)
        {
            for (const auto& [x, y] : pts)
            {
                if (std::isfinite(x) && std::isfinite(y))
                {
                    s += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) +
                         "\" r=\"3.5\" fill=\"none\" stroke=\"" + colour + "\"/>\n";
                }
            }
        }
        else
        {
            s += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" points=\"";
            for (const auto& [x, y] : pts)
            {
                if (std::isfinite(x) && std::isfinite(y))
                {
                    s += num(px(x)) + "," + num(py(y)) + " ";
                }
            }
            s += "\"/>\n";
        }
        if (series.size() <= 12 && !series[k].label.empty())
        {
            const double ly = margin_top + 14.0 * static_cast<double>(k) + 8.0;
            s += "<text x=\"" + num(width - margin_right + 10) + "\" y=\"" + num(ly) +
                 "\" fill=\"" + colour + "\">" + escape(series[k].label) + "</text>\n";
        }
    }
    s += "</svg>\n";
    return s;
}

std::string render_heatmap(const Axes& axes, const Eigen::MatrixXd& values)
{
    std::string s = header(axes);
    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;
    const double peak   = values.size() > 0 ? values.maxCoeff() : 0.0;
    const double cw     = plot_w / std::max<double>(1.0, static_cast<double>(values.cols()));
    const double ch     = plot_h / std::max<double>(1.0, static_cast<double>(values.rows()));
    for (Eigen::Index r = 0; r < values.rows(); ++r)
    {
        for (Eigen::Index c = 0; c < values.cols(); ++c)
        {
            const double level = peak > 0.0 ? values(r, c) / peak : 0.0;
            const int grey     = static_cast<int>(std::lround(255.0 * (1.0 - level)));
            char fill[16];
            std::snprintf(fill, sizeof(fill), "#%02x%02x%02x", grey, grey, grey);
            s += "<rect x=\"" + num(margin_left + cw * static_cast<double>(c)) + "\" y=\"" +
                 num(margin_top + ch * static_cast<double>(r)) + "\" width=\"" + num(cw) +
                 "\" height=\"" + num(ch) + "\" fill=\"" + fill + "\"/>\n";
        }
    }
    s += "<text x=\"" + num(width - margin_right + 10) + "\" y=\"" + num(margin_top + 8) +
         "\">max " + tick(peak) + "</text>\n";
    s += "</svg>\n";
    return s;
}

} // namespace otfsprony::detail
