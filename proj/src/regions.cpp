#include "lsrank/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "lsrank/rng.hpp"

namespace lsrank {

int GridFrame::cell_of(double x, double y) const {
    const double fa = std::floor((x - x0) / dx);
    const double fb = std::floor((y - y0) / dy);
    if (!(fa >= 0.0 && fa < nx && fb >= 0.0 && fb < ny)) return -1;
    return int(fa) * ny + int(fb);
}

bool CredibleRegion::contains(double x, double y) const {
    const int c = frame.cell_of(x, y);
    return c >= 0 && std::binary_search(cells.begin(), cells.end(), c);
}

double CredibleRegion::coverage(const std::vector<Point2>& draws) const {
    if (draws.empty()) return 0.0;
    std::size_t inside = 0;
    for (const auto& d : draws) inside += contains(d[0], d[1]) ? 1 : 0;
    return double(inside) / double(draws.size());
}

namespace {

std::array<double, 2> axis_sd(const std::vector<Point2>& draws) {
    std::array<double, 2> mean{0.0, 0.0}, sd{0.0, 0.0};
    const double m = double(draws.size());
    for (const auto& d : draws) mean[0] += d[0], mean[1] += d[1];
    mean[0] /= m, mean[1] /= m;
    for (const auto& d : draws) {
        sd[0] += (d[0] - mean[0]) * (d[0] - mean[0]);
        sd[1] += (d[1] - mean[1]) * (d[1] - mean[1]);
    }
    const double denom = draws.size() > 1 ? m - 1.0 : 1.0;
    sd[0] = std::sqrt(sd[0] / denom);
    sd[1] = std::sqrt(sd[1] / denom);
    return sd;
}

// Bandwidths with a zero-variance axis borrowing from the other axis, or a
// tiny absolute width when the whole cloud is one point.
std::array<double, 2> usable_bandwidth(const std::vector<Point2>& draws, bool& degenerate) {
    auto h = scott_bandwidth(draws);
    degenerate = !(h[0] > 0.0) || !(h[1] > 0.0);
    if (!degenerate) return h;
    const double other = std::max(h[0], h[1]);
    if (other > 0.0) return {other, other};
    const double mag = std::max({1.0, std::abs(draws.front()[0]), std::abs(draws.front()[1])});
    return {1e-6 * mag, 1e-6 * mag};
}

}  // namespace

std::array<double, 2> scott_bandwidth(const std::vector<Point2>& draws) {
    const auto sd = axis_sd(draws);
    const double factor = std::pow(double(draws.size()), -1.0 / 6.0);
    return {sd[0] * factor, sd[1] * factor};
}

GridFrame common_frame(const std::vector<std::vector<Point2>>& clouds, int resolution) {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    double hx = 0.0, hy = 0.0;
    for (const auto& cloud : clouds) {
        if (cloud.empty()) continue;
        bool degenerate = false;
        const auto h = usable_bandwidth(cloud, degenerate);
        hx = std::max(hx, h[0]);
        hy = std::max(hy, h[1]);
        for (const auto& d : cloud) {
            xmin = std::min(xmin, d[0]), xmax = std::max(xmax, d[0]);
            ymin = std::min(ymin, d[1]), ymax = std::max(ymax, d[1]);
        }
    }
    if (!std::isfinite(xmin)) throw ConfigError("common_frame: no draws");
    GridFrame f;
    f.nx = f.ny = resolution;
    f.x0 = xmin - kPaddingBandwidths * hx;
    f.y0 = ymin - kPaddingBandwidths * hy;
    f.dx = (xmax - xmin + 2.0 * kPaddingBandwidths * hx) / resolution;
    f.dy = (ymax - ymin + 2.0 * kPaddingBandwidths * hy) / resolution;
    return f;
}

CredibleRegion credible_region(const std::vector<Point2>& draws, double level, int actor, int time,
                               const GridFrame* frame) {
    if (draws.size() < kMinRegionDraws)
        throw ConfigError("credible_region: need at least " + std::to_string(kMinRegionDraws) + " draws");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible_region: level must lie in (0, 1)");

    CredibleRegion region;
    region.actor = actor;
    region.time = time;
    region.level = level;
    const auto h = usable_bandwidth(draws, region.degenerate);
    region.bandwidth_x = h[0];
    region.bandwidth_y = h[1];
    region.frame = frame ? *frame : common_frame({draws});
    const GridFrame& F = region.frame;

    const bool point_mass = std::all_of(draws.begin(), draws.end(), [&](const Point2& d) { return d == draws.front(); });
    if (point_mass) {
        region.degenerate = true;
        const int c = F.cell_of(draws.front()[0], draws.front()[1]);
        region.density.assign(std::size_t(F.nx) * F.ny, 0.0);
        if (c >= 0) {
            region.density[c] = 1.0 / (F.dx * F.dy);
            region.cells = {c};
        }
        region.threshold = region.density.empty() || c < 0 ? 0.0 : region.density[c];
        return region;
    }

    // Separable Gaussian kernel: density = Kx * Ky^T / m.
    const Eigen::Index m = Eigen::Index(draws.size());
    Eigen::MatrixXd Kx(F.nx, m), Ky(F.ny, m);
    const double nx_norm = 1.0 / (h[0] * std::sqrt(2.0 * M_PI));
    const double ny_norm = 1.0 / (h[1] * std::sqrt(2.0 * M_PI));
    for (Eigen::Index k = 0; k < m; ++k) {
        for (int a = 0; a < F.nx; ++a) {
            const double z = (F.cx(a) - draws[k][0]) / h[0];
            Kx(a, k) = nx_norm * std::exp(-0.5 * z * z);
        }
        for (int b = 0; b < F.ny; ++b) {
            const double z = (F.cy(b) - draws[k][1]) / h[1];
            Ky(b, k) = ny_norm * std::exp(-0.5 * z * z);
        }
    }
    const Eigen::MatrixXd dens = (Kx * Ky.transpose()) / double(m);
    region.density.resize(std::size_t(F.nx) * F.ny);
    for (int a = 0; a < F.nx; ++a)
        for (int b = 0; b < F.ny; ++b) region.density[std::size_t(a) * F.ny + b] = dens(a, b);

    // Threshold from the density at each draw's cell.
    std::vector<double> at_draw(draws.size());
    for (std::size_t k = 0; k < draws.size(); ++k) {
        const int c = F.cell_of(draws[k][0], draws[k][1]);
        at_draw[k] = c >= 0 ? region.density[c] : 0.0;
    }
    std::sort(at_draw.begin(), at_draw.end(), std::greater<>());
    const std::size_t need = std::min(draws.size(), std::size_t(std::ceil(level * double(draws.size()) - 1e-9)));
    region.threshold = at_draw[std::max<std::size_t>(need, 1) - 1];
    if (!(region.threshold > 0.0)) region.threshold = std::numeric_limits<double>::min();

    for (std::size_t c = 0; c < region.density.size(); ++c)
        if (region.density[c] >= region.threshold) region.cells.push_back(int(c));
    return region;
}

std::vector<Point2> actor_draws(const std::vector<PosteriorSample>& samples, int t, int i) {
    std::vector<Point2> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.X.p() != 2) throw ConfigError("credible regions need a two-dimensional latent space");
        out.push_back({s.X(t, i, 0), s.X(t, i, 1)});
    }
    return out;
}

std::vector<int> rasterize(const CredibleRegion& region, const GridFrame& frame) {
    const GridFrame& src = region.frame;
    std::vector<int> out;
    for (int c : region.cells) {
        const int a = c / src.ny, b = c % src.ny;
        const double xlo = src.x0 + a * src.dx, xhi = xlo + src.dx;
        const double ylo = src.y0 + b * src.dy, yhi = ylo + src.dy;
        const int centre = frame.cell_of(src.cx(a), src.cy(b));
        if (centre >= 0) out.push_back(centre);
        const int a0 = std::max(0, int(std::ceil((xlo - frame.x0) / frame.dx - 0.5)));
        const int a1 = std::min(frame.nx - 1, int(std::floor((xhi - frame.x0) / frame.dx - 0.5)));
        const int b0 = std::max(0, int(std::ceil((ylo - frame.y0) / frame.dy - 0.5)));
        const int b1 = std::min(frame.ny - 1, int(std::floor((yhi - frame.y0) / frame.dy - 0.5)));
        for (int fa = a0; fa <= a1; ++fa)
            for (int fb = b0; fb <= b1; ++fb) {
                const double x = frame.cx(fa), y = frame.cy(fb);
                if (x >= xlo && x < xhi && y >= ylo && y < yhi) out.push_back(fa * frame.ny + fb);
            }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

bool sorted_intersect(const std::vector<int>& a, const std::vector<int>& b) {
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia == *ib) return true;
        if (*ia < *ib)
            ++ia;
        else
            ++ib;
    }
    return false;
}

GridFrame union_frame(const std::vector<CredibleRegion>& regions) {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY, cell = INFINITY;
    for (const auto& r : regions) {
        const GridFrame& f = r.frame;
        xmin = std::min(xmin, f.x0), xmax = std::max(xmax, f.x0 + f.nx * f.dx);
        ymin = std::min(ymin, f.y0), ymax = std::max(ymax, f.y0 + f.ny * f.dy);
        cell = std::min({cell, f.dx, f.dy});
    }
    constexpr int kMaxCells = 4096;
    GridFrame out;
    out.x0 = xmin;
    out.y0 = ymin;
    out.nx = std::clamp(int(std::ceil((xmax - xmin) / cell)), 1, kMaxCells);
    out.ny = std::clamp(int(std::ceil((ymax - ymin) / cell)), 1, kMaxCells);
    out.dx = (xmax - xmin) / out.nx;
    out.dy = (ymax - ymin) / out.ny;
    return out;
}

}  // namespace

IntMatrix overlap_graph(const std::vector<CredibleRegion>& regions) {
    const std::size_t n = regions.size();
    std::vector<std::vector<int>> cells(n);
    const bool shared = std::all_of(regions.begin(), regions.end(),
                                    [&](const CredibleRegion& r) { return r.frame == regions.front().frame; });
    if (shared) {
        for (std::size_t i = 0; i < n; ++i) cells[i] = regions[i].cells;
    } else {
        const GridFrame frame = union_frame(regions);
        for (std::size_t i = 0; i < n; ++i) cells[i] = rasterize(regions[i], frame);
    }
    IntMatrix A(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        A[i][i] = 1;
        for (std::size_t j = i + 1; j < n; ++j) A[i][j] = A[j][i] = sorted_intersect(cells[i], cells[j]) ? 1 : 0;
    }
    return A;
}

double kmeans_objective(const IntMatrix& overlap, const std::vector<int>& labels, int k) {
    const std::size_t n = overlap.size();
    std::vector<std::vector<double>> centre(k, std::vector<double>(n, 0.0));
    std::vector<int> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++count[labels[i]];
        for (std::size_t d = 0; d < n; ++d) centre[labels[i]][d] += overlap[i][d];
    }
    for (int c = 0; c < k; ++c)
        if (count[c])
            for (double& v : centre[c]) v /= count[c];
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < n; ++d) {
            const double diff = overlap[i][d] - centre[labels[i]][d];
            obj += diff * diff;
        }
    return obj;
}

Clustering cluster_subgroups(const IntMatrix& overlap, int k, std::uint64_t seed, int restarts) {
    const int n = static_cast<int>(overlap.size());
    if (k < 2) throw ConfigError("cluster_subgroups: k must be at least 2");
    if (k > n) throw ConfigError("cluster_subgroups: k exceeds the number of actors");

    auto sqdist = [&](int i, const std::vector<double>& c) {
        double s = 0.0;
        for (int d = 0; d < n; ++d) s += (overlap[i][d] - c[d]) * (overlap[i][d] - c[d]);
        return s;
    };

    Rng rng(seed, 0x6b6d65616e73ULL);
    Clustering best;
    best.objective = INFINITY;
    for (int rep = 0; rep < restarts; ++rep) {
        // k-means++ seeding.
        std::vector<std::vector<double>> centres;
        const int first = rng.uniform_int(0, n - 1);
        centres.emplace_back(overlap[first].begin(), overlap[first].end());
        std::vector<double> nearest(n);
        while (int(centres.size()) < k) {
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                nearest[i] = INFINITY;
                for (const auto& c : centres) nearest[i] = std::min(nearest[i], sqdist(i, c));
                total += nearest[i];
            }
            int pick = rng.uniform_int(0, n - 1);
            if (total > 0.0) {
                double u = rng.uniform() * total;
                for (int i = 0; i < n; ++i) {
                    u -= nearest[i];
                    if (u <= 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
            centres.emplace_back(overlap[pick].begin(), overlap[pick].end());
        }

        std::vector<int> labels(n, -1);
        for (int iter = 0; iter < 200; ++iter) {
            bool changed = false;
            for (int i = 0; i < n; ++i) {
                int arg = 0;
                double bd = INFINITY;
                for (int c = 0; c < k; ++c) {
                    const double dd = sqdist(i, centres[c]);
                    if (dd < bd) bd = dd, arg = c;
                }
                if (labels[i] != arg) labels[i] = arg, changed = true;
            }
            // Refill empty clusters with the point farthest from its centre.
            std::vector<int> count(k, 0);
            for (int l : labels) ++count[l];
            for (int c = 0; c < k; ++c) {
                if (count[c]) continue;
                int far = 0;
                double fd = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double dd = count[labels[i]] > 1 ? sqdist(i, centres[labels[i]]) : -1.0;
                    if (dd > fd) fd = dd, far = i;
                }
                --count[labels[far]];
                labels[far] = c;
                ++count[c];
                changed = true;
            }
            for (int c = 0; c < k; ++c) std::fill(centres[c].begin(), centres[c].end(), 0.0);
            for (int i = 0; i < n; ++i)
                for (int d = 0; d < n; ++d) centres[labels[i]][d] += overlap[i][d];
            for (int c = 0; c < k; ++c)
                for (double& v : centres[c]) v /= count[c];
            if (!changed) break;
        }

        const double obj = kmeans_objective(overlap, labels, k);
        if (obj < best.objective - 1e-12) best = {labels, obj};
    }
    return best;
}

}  // namespace lsrank
