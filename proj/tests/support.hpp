// Shared helpers for the unit and acceptance tests: random instances and
// brute-force reference implementations that share no code with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/gamma.hpp>

#include "lsrank/core.hpp"

namespace testsupport {

using lsrank::LatentTrajectories;
using lsrank::RankPanel;

inline LatentTrajectories random_positions(int T, int n, int p, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> z(0.0, sd);
    LatentTrajectories X(T, n, p);
    for (double& v : X.values()) v = z(g);
    return X;
}

inline std::vector<double> random_simplex(int n, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> r(n);
    for (double& v : r) v = e(g) + 0.05;
    const double s = std::accumulate(r.begin(), r.end(), 0.0);
    for (double& v : r) v /= s;
    return r;
}

/// Builds rank rows from orderings (0-based actor ids, best first).
inline std::vector<int> row_from_ordering(const std::vector<int>& order, int n) {
    std::vector<int> row(n, 0);
    for (std::size_t k = 0; k < order.size(); ++k) row[order[k]] = int(k) + 1;
    return row;
}

inline RankPanel random_panel(int n, int T, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::vector<int> ranks;
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i) {
            std::vector<int> others;
            for (int j = 0; j < n; ++j)
                if (j != i) others.push_back(j);
            std::shuffle(others.begin(), others.end(), g);
            const auto row = row_from_ordering(others, n);
            ranks.insert(ranks.end(), row.begin(), row.end());
        }
    return RankPanel(n, T, ranks);
}

/// One-period panel whose row i follows order; other rows are arbitrary.
inline RankPanel one_row_panel(int n, int i, const std::vector<int>& order) {
    std::vector<int> ranks;
    for (int a = 0; a < n; ++a) {
        std::vector<int> o;
        if (a == i) {
            o = order;
        } else {
            for (int j = 0; j < n; ++j)
                if (j != a) o.push_back(j);
        }
        const auto row = row_from_ordering(o, n);
        ranks.insert(ranks.end(), row.begin(), row.end());
    }
    return RankPanel(n, 1, ranks);
}

/// All orderings of the actors other than i.
inline std::vector<std::vector<int>> all_orderings(int n, int i) {
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
        if (j != i) others.push_back(j);
    std::vector<std::vector<int>> out;
    do out.push_back(others);
    while (std::next_permutation(others.begin(), others.end()));
    return out;
}

inline double euclid(const LatentTrajectories& X, int t, int i, int j) {
    double s = 0.0;
    for (int d = 0; d < X.p(); ++d) {
        const double diff = X(t, i, d) - X(t, j, d);
        s += diff * diff;
    }
    return std::sqrt(s);
}

/// Direct product of fractions nu_{order[k]} / sum of remaining nu, over the
/// first q choices.
inline double pl_prob(const LatentTrajectories& X, const std::vector<double>& r, int t, int i,
                      const std::vector<int>& order, std::size_t q) {
    std::vector<double> nu;
    for (int j : order) nu.push_back(r[j] * std::exp(-euclid(X, t, i, j)));
    double prob = 1.0;
    for (std::size_t k = 0; k < q; ++k) {
        double rest = 0.0;
        for (std::size_t m = k; m < nu.size(); ++m) rest += nu[m];
        prob *= nu[k] / rest;
    }
    return prob;
}

inline double pl_prob(const LatentTrajectories& X, const std::vector<double>& r, int t, int i,
                      const std::vector<int>& order) {
    return pl_prob(X, r, t, i, order, order.size());
}

/// Naive log-likelihood of a whole panel: triple loop, no log-sum-exp.
inline double naive_loglik(const RankPanel& panel, const LatentTrajectories& X, const std::vector<double>& r) {
    double ll = 0.0;
    for (int t = 0; t < panel.T(); ++t)
        for (int i = 0; i < panel.n(); ++i) {
            std::vector<int> order(panel.n() - 1);
            for (int j = 0; j < panel.n(); ++j)
                if (j != i) order[panel.rank(t, i, j) - 1] = j;
            ll += std::log(pl_prob(X, r, t, i, order));
        }
    return ll;
}

/// Kolmogorov-Smirnov statistic of the sample against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double m = double(xs.size());
    double d = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double F = cdf(xs[k]);
        d = std::max({d, F - double(k) / m, double(k + 1) / m - F});
    }
    return d;
}

/// Asymptotic KS critical value at significance 0.01.
inline double ks_critical_01(std::size_t m) { return 1.6276 / std::sqrt(double(m)); }

/// Binned chi-square goodness of fit against a continuous CDF using
/// equiprobable bins; returns the p-value.
template <class Quantile>
double chi_square_pvalue(const std::vector<double>& xs, Quantile quantile, int bins = 50) {
    std::vector<double> edges;
    for (int b = 1; b < bins; ++b) edges.push_back(quantile(double(b) / bins));
    std::vector<double> counts(bins, 0.0);
    for (double x : xs) counts[std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()] += 1.0;
    const double expect = double(xs.size()) / bins;
    double stat = 0.0;
    for (double c : counts) stat += (c - expect) * (c - expect) / expect;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(bins - 1), stat));
}

inline double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

inline double var_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / double(v.size() - 1);
}

}  // namespace testsupport
