#include "lsrank/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lsrank {

PosteriorMeans posterior_means(const std::vector<PosteriorSample>& samples) {
    if (samples.empty()) throw ConfigError("no posterior samples");
    const auto& first = samples.front();
    const int T = first.X.T(), n = first.X.n(), p = first.X.p();
    PosteriorMeans m;
    m.r.assign(n, 0.0);
    m.tau.assign(first.params.tau.size(), 0.0);
    m.X = LatentTrajectories(T, n, p);
    for (const auto& s : samples) {
        for (int i = 0; i < n; ++i) m.r[i] += s.params.r[i];
        for (std::size_t k = 0; k < m.tau.size(); ++k) m.tau[k] += s.params.tau[k];
        for (std::size_t k = 0; k < m.X.values().size(); ++k) m.X.values()[k] += s.X.values()[k];
        m.tau0 += s.params.tau0;
        m.tau1 += s.params.tau1;
        m.theta += s.params.theta;
    }
    const double S = double(samples.size());
    for (double& v : m.r) v /= S;
    for (double& v : m.tau) v /= S;
    for (double& v : m.X.values()) v /= S;
    m.tau0 /= S;
    m.tau1 /= S;
    m.theta /= S;
    return m;
}

double pseudo_r2(const RankPanel& panel, const LatentTrajectories& X_hat, std::span<const double> r_hat) {
    const int n = panel.n(), T = panel.T();
    std::vector<double> mu;
    mu.reserve(std::size_t(T) * n * (n - 1));
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) mu.push_back(mean_utility(X_hat, r_hat, t, i, j));
    const double N = double(mu.size());
    const double mean = std::accumulate(mu.begin(), mu.end(), 0.0) / N;
    double ss = 0.0;
    for (double v : mu) ss += (v - mean) * (v - mean);
    const double noise = M_PI * M_PI * (N - 2.0) / 6.0;
    return ss / (ss + noise);
}

double pseudo_r2(const RankPanel& panel, const std::vector<PosteriorSample>& samples) {
    const PosteriorMeans m = posterior_means(samples);
    return pseudo_r2(panel, m.X, m.r);
}

StabilityTable stability_table(const std::vector<PosteriorSample>& samples) {
    if (samples.empty()) throw ConfigError("no posterior samples");
    const std::size_t K = samples.front().params.tau.size();
    StabilityTable q(K, std::vector<double>(K, 0.0));
    for (const auto& s : samples)
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t b = 0; b < K; ++b)
                if (a != b && s.params.tau[b] > s.params.tau[a]) q[a][b] += 1.0;
    for (auto& row : q)
        for (double& v : row) v /= double(samples.size());
    return q;
}

std::vector<double> step_sizes(const LatentTrajectories& X) {
    const int T = X.T(), n = X.n();
    std::vector<double> s(n, 0.0);
    if (T < 2) return s;
    for (int i = 0; i < n; ++i) {
        for (int t = 1; t < T; ++t) {
            double sq = 0.0;
            for (int d = 0; d < X.p(); ++d) {
                const double diff = X(t, i, d) - X(t - 1, i, d);
                sq += diff * diff;
            }
            s[i] += std::sqrt(sq);
        }
        s[i] /= double(T - 1);
    }
    return s;
}

std::vector<double> step_sizes(const std::vector<PosteriorSample>& samples) {
    return step_sizes(posterior_means(samples).X);
}

std::vector<double> mean_received_rank(const RankPanel& panel) {
    const int n = panel.n(), T = panel.T();
    std::vector<double> m(n, 0.0);
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (i != j) m[i] += panel.rank(t, j, i);
    for (double& v : m) v /= double(T) * (n - 1);
    return m;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw ConfigError("pearson: need two equal-length vectors");
    const double N = double(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / N;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / N;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sab += (a[k] - ma) * (b[k] - mb);
        saa += (a[k] - ma) * (a[k] - ma);
        sbb += (b[k] - mb) * (b[k] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) throw NumericalError("pearson: zero variance");
    return sab / std::sqrt(saa * sbb);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t k = 0; k < idx.size();) {
        std::size_t end = k;
        while (end + 1 < idx.size() && v[idx[end + 1]] == v[idx[k]]) ++end;
        const double avg = 0.5 * double(k + end) + 1.0;
        for (std::size_t m = k; m <= end; ++m) ranks[idx[m]] = avg;
        k = end + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return pearson(ra, rb);
}

PopularityCorrelations popularity_correlations(const RankPanel& panel,
                                               const std::vector<PosteriorSample>& samples) {
    const PosteriorMeans m = posterior_means(samples);
    std::vector<double> log_r(m.r.size());
    for (std::size_t i = 0; i < m.r.size(); ++i) log_r[i] = std::log(m.r[i]);
    const auto steps = step_sizes(m.X);
    const auto received = mean_received_rank(panel);
    return {pearson(steps, log_r), pearson(log_r, received)};
}

std::vector<Interval> tau_intervals(const std::vector<PosteriorSample>& samples, double level) {
    if (samples.empty()) throw ConfigError("no posterior samples");
    const std::size_t K = samples.front().params.tau.size();
    std::vector<Interval> out(K);
    std::vector<double> col(samples.size());
    const double tail = 0.5 * (1.0 - level);
    auto quantile = [&](double prob) {
        // Linear interpolation between order statistics.
        const double h = prob * double(col.size() - 1);
        const std::size_t lo = std::size_t(std::floor(h));
        const std::size_t hi = std::min(lo + 1, col.size() - 1);
        return col[lo] + (h - double(lo)) * (col[hi] - col[lo]);
    };
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t s = 0; s < samples.size(); ++s) col[s] = samples[s].params.tau[k];
        out[k].mean = std::accumulate(col.begin(), col.end(), 0.0) / double(col.size());
        std::sort(col.begin(), col.end());
        out[k].lower = quantile(tail);
        out[k].upper = quantile(1.0 - tail);
    }
    return out;
}

}  // namespace lsrank
