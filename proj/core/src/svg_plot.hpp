// Static SVG rendering of the experiment tables. Not installed.
#ifndef OTFSPRONY_SRC_SVG_PLOT_HPP
#define OTFSPRONY_SRC_SVG_PLOT_HPP

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace otfsprony::detail
{

struct Series
{
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool markers_only = false;
};

struct Axes
{
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
};

/// Line (or marker) plot of several series on shared axes.
std::string render_plot(const Axes& axes, const std::vector<Series>& series);

/// Grey-scale image of `values` (rows drawn top to bottom).
std::string render_heatmap(const Axes& axes, const Eigen::MatrixXd& values);

} // namespace otfsprony::detail

#endif
