#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lsrank/sampler.hpp"

namespace lsrank {

using Point2 = std::array<double, 2>;

/// Regular grid; cell (a, b) covers [x0 + a dx, x0 + (a+1) dx) x [y0 + b dy, ...).
/// Cells are indexed a * ny + b.
struct GridFrame {
    double x0 = 0.0, y0 = 0.0;
    double dx = 1.0, dy = 1.0;
    int nx = 128, ny = 128;

    double cx(int a) const { return x0 + (a + 0.5) * dx; }
    double cy(int b) const { return y0 + (b + 0.5) * dy; }
    /// Cell index holding (x, y), or -1 outside the frame.
    int cell_of(double x, double y) const;
    bool operator==(const GridFrame&) const = default;
};

inline constexpr int kGridResolution = 128;
inline constexpr double kPaddingBandwidths = 3.0;
inline constexpr std::size_t kMinRegionDraws = 500;

struct CredibleRegion {
    int actor = 0;
    int time = 0;
    double level = 0.95;
    GridFrame frame;
    double bandwidth_x = 0.0, bandwidth_y = 0.0;
    std::vector<double> density;  // nx * ny
    double threshold = 0.0;
    std::vector<int> cells;       // sorted member cell indices
    bool degenerate = false;

    double area() const { return double(cells.size()) * frame.dx * frame.dy; }
    bool contains(double x, double y) const;
    double coverage(const std::vector<Point2>& draws) const;
};

/// Scott's-rule bandwidths (sd * m^(-1/6)) of a planar cloud.
std::array<double, 2> scott_bandwidth(const std::vector<Point2>& draws);

/// Bounding box padded by kPaddingBandwidths bandwidths, kGridResolution cells
/// per axis, covering every cloud given.
GridFrame common_frame(const std::vector<std::vector<Point2>>& clouds, int resolution = kGridResolution);

/// Highest-density region from a Gaussian product-kernel density estimate.
/// The threshold is the largest density whose super-level set holds at least
/// `level` of the draws. Without a frame, one is fitted to this cloud.
CredibleRegion credible_region(const std::vector<Point2>& draws, double level = 0.95, int actor = 0, int time = 0,
                               const GridFrame* frame = nullptr);

/// Draws of actor i at time t across stored samples (p must be 2).
std::vector<Point2> actor_draws(const std::vector<PosteriorSample>& samples, int t, int i);

using IntMatrix = std::vector<std::vector<int>>;

/// Rasterizes region onto another frame (cells whose centres fall inside a
/// member cell, plus the cell holding each member centre).
std::vector<int> rasterize(const CredibleRegion& region, const GridFrame& frame);

/// (i, j) = 1 iff the regions share a cell. Regions on different frames are
/// re-rasterized to their union bounding box first.
IntMatrix overlap_graph(const std::vector<CredibleRegion>& regions);

struct Clustering {
    std::vector<int> labels;
    double objective = 0.0;  // within-cluster sum of squares
};

/// k-means on the rows of the overlap matrix, best of `restarts` k-means++
/// starts.
Clustering cluster_subgroups(const IntMatrix& overlap, int k, std::uint64_t seed = 1, int restarts = 50);

/// Within-cluster sum of squares of an arbitrary labelling of the rows.
double kmeans_objective(const IntMatrix& overlap, const std::vector<int>& labels, int k);

}  // namespace lsrank
