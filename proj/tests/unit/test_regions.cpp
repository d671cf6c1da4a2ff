#include <doctest.h>

#include <random>
#include <set>

#include "lsrank/regions.hpp"
#include "support.hpp"

using namespace lsrank;

namespace {

std::vector<Point2> normal_cloud(std::size_t m, std::uint64_t seed, double mx = 0.0, double my = 0.0, double sd = 1.0) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> z;
    std::vector<Point2> out(m);
    for (auto& d : out) d = {mx + sd * z(g), my + sd * z(g)};
    return out;
}

// Overlap by explicit evaluation: any point of a fine frame held by both regions.
bool brute_overlap(const CredibleRegion& a, const CredibleRegion& b) {
    const std::set<int> sa(a.cells.begin(), a.cells.end());
    for (int c : sa) {
        const int ia = c / a.frame.ny, ib = c % a.frame.ny;
        // Sample a 5x5 lattice inside each member cell of a.
        for (int u = 0; u < 5; ++u)
            for (int v = 0; v < 5; ++v) {
                const double x = a.frame.x0 + (ia + (u + 0.5) / 5.0) * a.frame.dx;
                const double y = a.frame.y0 + (ib + (v + 0.5) / 5.0) * a.frame.dy;
                if (b.contains(x, y)) return true;
            }
    }
    return false;
}

}  // namespace

TEST_CASE("identical draws give a one-cell region") {
    const std::vector<Point2> same(600, Point2{1.5, -2.0});
    const auto reg = credible_region(same, 0.95);
    CHECK(reg.degenerate);
    CHECK(reg.cells.size() == 1);
    CHECK(reg.contains(1.5, -2.0));
    CHECK(reg.coverage(same) == 1.0);
}

TEST_CASE("standard normal highest-density region") {
    const auto draws = normal_cloud(10000, 1);
    const auto reg = credible_region(draws, 0.95);
    const double disk = -2.0 * M_PI * std::log(0.05);
    CHECK(disk == doctest::Approx(18.82).epsilon(1e-3));
    CHECK(std::abs(reg.area() / disk - 1.0) < 0.15);
    CHECK(reg.coverage(draws) >= 0.94);
    CHECK_FALSE(reg.degenerate);
    const auto h = scott_bandwidth(draws);
    CHECK(h[0] == doctest::Approx(std::pow(10000.0, -1.0 / 6.0)).epsilon(0.03));
}

TEST_CASE("region preconditions") {
    CHECK_THROWS_AS(credible_region(normal_cloud(499, 2)), ConfigError);
    CHECK_NOTHROW(credible_region(normal_cloud(500, 2)));
    CHECK_THROWS_AS(credible_region(normal_cloud(800, 2), 1.0), ConfigError);
}

TEST_CASE("coverage holds across levels and nesting is monotone") {
    const auto draws = normal_cloud(2000, 3, 0.0, 0.0, 0.5);
    const GridFrame frame = common_frame({draws});
    std::vector<int> prev;
    for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
        const auto reg = credible_region(draws, level, 0, 0, &frame);
        CHECK(reg.coverage(draws) >= level - 0.01);
        CHECK(std::includes(reg.cells.begin(), reg.cells.end(), prev.begin(), prev.end()));
        prev = reg.cells;
    }
}

TEST_CASE("regions move with a translation of draws and frame") {
    const auto draws = normal_cloud(1500, 4);
    const auto base = credible_region(draws, 0.95);
    auto moved = draws;
    for (auto& d : moved) d[0] += 7.25, d[1] -= 3.5;
    GridFrame frame = base.frame;
    frame.x0 += 7.25;
    frame.y0 -= 3.5;
    const auto shifted = credible_region(moved, 0.95, 0, 0, &frame);
    // Quantization can flip cells sitting exactly on the threshold.
    std::vector<int> sym;
    std::set_symmetric_difference(base.cells.begin(), base.cells.end(), shifted.cells.begin(), shifted.cells.end(),
                                  std::back_inserter(sym));
    CHECK(double(sym.size()) <= 0.01 * double(base.cells.size()));
}

TEST_CASE("overlap graph") {
    const auto a = normal_cloud(800, 5);
    const auto far = normal_cloud(800, 6, 100.0, 0.0);
    const std::vector<CredibleRegion> regs{credible_region(a), credible_region(a), credible_region(far)};
    const auto A = overlap_graph(regs);
    CHECK(A[0][1] == 1);
    CHECK(A[0][2] == 0);
    CHECK(A[1][2] == 0);
    for (int i = 0; i < 3; ++i) {
        CHECK(A[i][i] == 1);
        for (int j = 0; j < 3; ++j) CHECK(A[i][j] == A[j][i]);
    }
}

TEST_CASE("overlap agrees with a point-sampling oracle") {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> centre(-3.0, 3.0), spread(0.3, 1.2);
    std::vector<CredibleRegion> regs;
    for (int k = 0; k < 8; ++k) regs.push_back(credible_region(normal_cloud(600, 100 + k, centre(g), centre(g), spread(g))));
    const auto A = overlap_graph(regs);
    int checked = 0;
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) {
            // Pairs that barely touch depend on the union raster; skip those the oracle cannot see.
            const bool oracle = brute_overlap(regs[i], regs[j]) || brute_overlap(regs[j], regs[i]);
            if (oracle) {
                CHECK(A[i][j] == 1);
                ++checked;
            } else if (A[i][j] == 1) {
                // Shared raster cell with no sampled point in common: regions must at least be adjacent.
                const auto& fi = regs[i].frame;
                const auto& fj = regs[j].frame;
                CHECK(std::max(fi.x0, fj.x0) < std::min(fi.x0 + fi.nx * fi.dx, fj.x0 + fj.nx * fj.dx));
            } else {
                ++checked;
            }
        }
    CHECK(checked >= 20);
}

TEST_CASE("clustering recovers separable blocks") {
    const int n = 9;
    IntMatrix A(n, std::vector<int>(n, 0));
    const std::vector<int> truth{0, 0, 1, 0, 1, 1, 0, 1, 0};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A[i][j] = truth[i] == truth[j];
    const auto c = cluster_subgroups(A, 2, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK((c.labels[i] == c.labels[j]) == (truth[i] == truth[j]));
    CHECK(c.objective == doctest::Approx(0.0));

    CHECK(cluster_subgroups(A, 2, 3).labels == c.labels);
    CHECK_THROWS_AS(cluster_subgroups(A, 10), ConfigError);
    CHECK_THROWS_AS(cluster_subgroups(A, 1), ConfigError);
}

TEST_CASE("clustering is no worse than random partitions") {
    const int n = 12, k = 3;
    std::mt19937_64 g(8);
    std::bernoulli_distribution coin(0.35);
    IntMatrix A(n, std::vector<int>(n, 0));
    for (int i = 0; i < n; ++i) {
        A[i][i] = 1;
        for (int j = i + 1; j < n; ++j) A[i][j] = A[j][i] = coin(g);
    }
    const auto best = cluster_subgroups(A, k, 9);
    CHECK(best.objective == doctest::Approx(kmeans_objective(A, best.labels, k)));
    std::uniform_int_distribution<int> lab(0, k - 1);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<int> labels(n);
        for (int& l : labels) l = lab(g);
        CHECK(best.objective <= kmeans_objective(A, labels, k) + 1e-12);
    }
}

TEST_CASE("actor draws need a planar latent space") {
    const LatentTrajectories X3(2, 2, 3);
    const std::vector<PosteriorSample> s{{X3, ModelParams{{0.5, 0.5}, 1, 1, {1}, 1}, 0}};
    CHECK_THROWS_AS(actor_draws(s, 0, 0), ConfigError);
    LatentTrajectories X2(2, 2, 2);
    X2(1, 0, 1) = 4.0;
    const std::vector<PosteriorSample> s2{{X2, ModelParams{{0.5, 0.5}, 1, 1, {1}, 1}, 0}};
    CHECK(actor_draws(s2, 1, 0)[0] == Point2{0.0, 4.0});
}
