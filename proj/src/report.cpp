#include "lsrank/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace lsrank {

namespace fs = std::filesystem;

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                          "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel, int width, int height)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)), width_(width),
      height_(height) {}

void SvgPlot::line(const std::vector<double>& x, const std::vector<double>& y, const std::string& colour,
                   double stroke) {
    items_.push_back({Item::Line, x, y, {}, colour, stroke, {}});
}

void SvgPlot::points(const std::vector<double>& x, const std::vector<double>& y, const std::string& colour,
                     double radius) {
    items_.push_back({Item::Points, x, y, {}, colour, radius, {}});
}

void SvgPlot::error_bars(const std::vector<double>& x, const std::vector<double>& lo, const std::vector<double>& hi,
                         const std::string& colour) {
    items_.push_back({Item::Bars, x, lo, hi, colour, 1.0, {}});
}

void SvgPlot::label(double x, double y, const std::string& text) {
    items_.push_back({Item::Label, {x}, {y}, {}, "#000", 1.0, text});
}

std::string SvgPlot::render() const {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& it : items_) {
        for (double v : it.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
        for (double v : it.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
        for (double v : it.z) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
    if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
    const double padx = 0.04 * (xmax - xmin), pady = 0.04 * (ymax - ymin);
    xmin -= padx, xmax += padx, ymin -= pady, ymax += pady;

    const double left = 70, right = 20, top = 40, bottom = 55;
    const double pw = width_ - left - right, ph = height_ - top - bottom;
    auto sx = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double v) { return top + (ymax - v) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
       << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width_ / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"15\">" << escape(title_) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 4.0, yv = ymin + (ymax - ymin) * k / 4.0;
        os << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 16
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(xv) << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(yv) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height_ - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(xlabel_) << "</text>\n";
    os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 16 " << top + ph / 2
       << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(ylabel_)
       << "</text>\n";

    for (const auto& it : items_) {
        switch (it.kind) {
        case Item::Line: {
            os << "<polyline fill=\"none\" stroke=\"" << it.colour << "\" stroke-width=\"" << it.size
               << "\" points=\"";
            for (std::size_t k = 0; k < it.x.size(); ++k) os << sx(it.x[k]) << ',' << sy(it.y[k]) << ' ';
            os << "\"/>\n";
            break;
        }
        case Item::Points:
            for (std::size_t k = 0; k < it.x.size(); ++k)
                os << "<circle cx=\"" << sx(it.x[k]) << "\" cy=\"" << sy(it.y[k]) << "\" r=\"" << it.size
                   << "\" fill=\"" << it.colour << "\"/>\n";
            break;
        case Item::Bars:
            for (std::size_t k = 0; k < it.x.size(); ++k)
                os << "<line x1=\"" << sx(it.x[k]) << "\" y1=\"" << sy(it.y[k]) << "\" x2=\"" << sx(it.x[k])
                   << "\" y2=\"" << sy(it.z[k]) << "\" stroke=\"" << it.colour << "\"/>\n";
            break;
        case Item::Label:
            os << "<text x=\"" << sx(it.x[0]) + 4 << "\" y=\"" << sy(it.y[0]) - 4
               << "\" font-family=\"sans-serif\" font-size=\"10\">" << escape(it.text) << "</text>\n";
            break;
        }
    }
    os << "</svg>\n";
    return os.str();
}

void SvgPlot::save(const fs::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << render();
}

void Table::save(const fs::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
        out << '\n';
    }
}

Table trajectory_table(const LatentTrajectories& X) {
    Table t{{"actor", "time", "x", "y"}, {}};
    for (int i = 0; i < X.n(); ++i)
        for (int s = 0; s < X.T(); ++s)
            t.rows.push_back({double(i + 1), double(s + 1), X(s, i, 0), X.p() > 1 ? X(s, i, 1) : 0.0});
    return t;
}

Table tau_table(const std::vector<Interval>& intervals) {
    Table t{{"time", "mean", "lower", "upper"}, {}};
    for (std::size_t k = 0; k < intervals.size(); ++k)
        t.rows.push_back({double(k + 2), intervals[k].mean, intervals[k].lower, intervals[k].upper});
    return t;
}

Table step_reach_table(const std::vector<double>& steps, const std::vector<double>& r) {
    Table t{{"actor", "log_reach", "step_size"}, {}};
    for (std::size_t i = 0; i < steps.size(); ++i) t.rows.push_back({double(i + 1), std::log(r[i]), steps[i]});
    return t;
}

void write_report(const fs::path& dir, const PosteriorMeans& means, const std::vector<Interval>& tau_ci,
                  const Traces& traces) {
    fs::create_directories(dir);

    const Table traj = trajectory_table(means.X);
    traj.save(dir / "trajectories.csv");
    SvgPlot tp("Posterior mean trajectories", "x", "y", 720, 720);
    const int T = means.X.T();
    for (int i = 0; i < means.X.n(); ++i) {
        std::vector<double> xs, ys;
        for (int s = 0; s < T; ++s) {
            xs.push_back(traj.rows[std::size_t(i) * T + s][2]);
            ys.push_back(traj.rows[std::size_t(i) * T + s][3]);
        }
        const std::string colour = kPalette[i % 10];
        tp.line(xs, ys, colour, 1.2);
        tp.points({xs.back()}, {ys.back()}, colour, 3.5);
        tp.label(xs.back(), ys.back(), std::to_string(i + 1));
    }
    tp.save(dir / "trajectories.svg");

    const Table tau = tau_table(tau_ci);
    tau.save(dir / "tau.csv");
    std::vector<double> tx, tm, tl, tu;
    for (const auto& row : tau.rows) tx.push_back(row[0]), tm.push_back(row[1]), tl.push_back(row[2]), tu.push_back(row[3]);
    SvgPlot pp("Step precisions with 95% credible intervals", "time", "tau");
    pp.error_bars(tx, tl, tu, "#555");
    pp.line(tx, tm, kPalette[0]);
    pp.points(tx, tm, kPalette[0]);
    pp.save(dir / "tau.svg");

    const auto steps = step_sizes(means.X);
    const Table sr = step_reach_table(steps, means.r);
    sr.save(dir / "step_vs_reach.csv");
    std::vector<double> lx, sy;
    SvgPlot sp("Step size against log social reach", "log r", "mean step size");
    for (const auto& row : sr.rows) {
        lx.push_back(row[1]);
        sy.push_back(row[2]);
        sp.label(row[1], row[2], std::to_string(int(row[0])));
    }
    sp.points(lx, sy, kPalette[3]);
    sp.save(dir / "step_vs_reach.svg");

    if (traces.rows.empty()) return;
    // Thin long traces for plotting; the CSV twin holds exactly what is drawn.
    const std::size_t stride = std::max<std::size_t>(1, traces.rows.size() / 2000);
    Table twin;
    twin.header = {"iteration"};
    twin.header.insert(twin.header.end(), traces.names.begin(), traces.names.end());
    for (std::size_t it = 0; it < traces.rows.size(); it += stride) {
        std::vector<double> row{double(it + 1)};
        row.insert(row.end(), traces.rows[it].begin(), traces.rows[it].end());
        twin.rows.push_back(std::move(row));
    }
    twin.save(dir / "traces_plot.csv");
    for (std::size_t c = 0; c < traces.names.size(); ++c) {
        std::vector<double> xs, ys;
        for (const auto& row : twin.rows) xs.push_back(row[0]), ys.push_back(row[c + 1]);
        SvgPlot plot("Trace of " + traces.names[c], "iteration", traces.names[c], 640, 320);
        plot.line(xs, ys, kPalette[c % 10], 0.8);
        plot.save(dir / ("trace_" + traces.names[c] + ".svg"));
    }
}

Traces read_traces_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    Traces tr;
    std::string line;
    if (!std::getline(in, line)) return tr;
    std::stringstream hs(line);
    std::string cell;
    std::getline(hs, cell, ',');
    while (std::getline(hs, cell, ',')) tr.names.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::getline(ls, cell, ',');
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        tr.rows.push_back(std::move(row));
    }
    return tr;
}

}  // namespace lsrank
