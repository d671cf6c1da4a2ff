#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lsrank/core.hpp"
#include "lsrank/summaries.hpp"

namespace lsrank {

/// Minimal SVG line/scatter chart.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel, int width = 640, int height = 480);

    void line(const std::vector<double>& x, const std::vector<double>& y, const std::string& colour,
              double stroke = 1.0);
    void points(const std::vector<double>& x, const std::vector<double>& y, const std::string& colour,
                double radius = 3.0);
    void error_bars(const std::vector<double>& x, const std::vector<double>& lo, const std::vector<double>& hi,
                    const std::string& colour);
    void label(double x, double y, const std::string& text);

    std::string render() const;
    void save(const std::filesystem::path& path) const;

private:
    struct Item {
        enum Kind { Line, Points, Bars, Label } kind;
        std::vector<double> x, y, z;
        std::string colour;
        double size = 1.0;
        std::string text;
    };
    std::string title_, xlabel_, ylabel_;
    int width_, height_;
    std::vector<Item> items_;
};

/// A delimited-text table; the twin of every plot.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    void save(const std::filesystem::path& path) const;
};

/// Trajectories of posterior-mean positions (first two coordinates).
Table trajectory_table(const LatentTrajectories& X);
/// Step precisions with credible intervals.
Table tau_table(const std::vector<Interval>& intervals);
/// Step size against log reach.
Table step_reach_table(const std::vector<double>& steps, const std::vector<double>& r);

/// Writes trajectories.svg/csv, tau.svg/csv, step_vs_reach.svg/csv and, when
/// traces are non-empty, trace_<name>.svg per parameter plus traces_plot.csv.
void write_report(const std::filesystem::path& dir, const PosteriorMeans& means,
                  const std::vector<Interval>& tau_ci, const Traces& traces);

/// Reads a trace file written by write_traces_csv.
Traces read_traces_csv(const std::filesystem::path& path);

}  // namespace lsrank
