#include "lsrank/simgen.hpp"

#include <algorithm>
#include <numeric>

namespace lsrank {

namespace {

constexpr std::uint64_t kParamStream = 0;
constexpr std::uint64_t kTrajectoryStream = 1;
constexpr std::uint64_t kRowStreamBase = 2;

ModelParams resolve_params(const GenSpec& spec, Rng& rng) {
    if (!spec.params) return draw_params_from_prior(spec.n, spec.T, spec.prior, rng);
    ModelParams params = *spec.params;
    if (params.tau.empty() && spec.T > 1) params.tau = draw_precision_path(params.tau1, params.theta, spec.T, rng);
    params.validate(spec.n, spec.T);
    return params;
}

}  // namespace

std::vector<double> draw_precision_path(double tau1, double theta, int T, Rng& rng) {
    std::vector<double> tau;
    double prev = tau1;
    for (int t = 1; t < T; ++t) {
        prev *= rng.gamma(theta, theta);
        tau.push_back(prev);
    }
    return tau;
}

ModelParams draw_params_from_prior(int n, int T, const Hyperparams& prior, Rng& rng) {
    ModelParams params;
    std::vector<double> alpha(n);
    for (int i = 0; i < n; ++i) alpha[i] = prior.alpha_at(i);
    params.r = rng.dirichlet(alpha);
    params.tau0 = rng.gamma(1.0, prior.lambda0);
    params.tau1 = rng.inverse_gamma(prior.lambda1 / 2.0, 0.5);
    params.theta = rng.lognormal(prior.mu, std::sqrt(prior.sigma2));
    params.tau = draw_precision_path(params.tau1, params.theta, T, rng);
    return params;
}

LatentTrajectories sample_trajectories(const ModelParams& params, int n, int T, int p, Rng& rng) {
    LatentTrajectories X(T, n, p);
    const double sd0 = 1.0 / std::sqrt(params.tau0);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < p; ++d) X(0, i, d) = sd0 * rng.normal();
    for (int t = 1; t < T; ++t) {
        const double sd = 1.0 / std::sqrt(params.tau[t - 1]);
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < p; ++d) X(t, i, d) = X(t - 1, i, d) + sd * rng.normal();
    }
    return X;
}

LatentTrajectories sample_trajectories(const GenSpec& spec) {
    Rng param_rng(spec.seed, kParamStream);
    const ModelParams params = resolve_params(spec, param_rng);
    Rng rng(spec.seed, kTrajectoryStream);
    return sample_trajectories(params, spec.n, spec.T, spec.p, rng);
}

std::vector<int> sample_rank_row(const LatentTrajectories& X, std::span<const double> r, int t, int i,
                                 Rng& rng) {
    const int n = X.n();
    std::vector<double> z(n, 0.0);
    std::vector<int> others;
    others.reserve(n - 1);
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        z[j] = std::log(r[j]) - distance(X, t, i, j) + (rng.gumbel() - kEulerGamma);
        others.push_back(j);
    }
    std::sort(others.begin(), others.end(), [&](int a, int b) { return z[a] > z[b]; });
    std::vector<int> row(n, 0);
    for (int k = 0; k < n - 1; ++k) row[others[k]] = k + 1;
    return row;
}

RankPanel sample_panel(const LatentTrajectories& X, std::span<const double> r, std::uint64_t seed) {
    const int n = X.n(), T = X.T();
    std::vector<int> ranks;
    ranks.reserve(std::size_t(T) * n * n);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i) {
            Rng rng(seed, kRowStreamBase + std::uint64_t(t) * n + i);
            const auto row = sample_rank_row(X, r, t, i, rng);
            ranks.insert(ranks.end(), row.begin(), row.end());
        }
    return RankPanel(n, T, std::move(ranks));
}

GeneratedPanel generate_panel(const GenSpec& spec) {
    Rng param_rng(spec.seed, kParamStream);
    ModelParams params = resolve_params(spec, param_rng);
    LatentTrajectories X;
    if (spec.positions) {
        X = *spec.positions;
        if (X.T() != spec.T || X.n() != spec.n || X.p() != spec.p)
            throw ConfigError("generate_panel: positions do not match n, T, p");
    } else {
        Rng rng(spec.seed, kTrajectoryStream);
        X = sample_trajectories(params, spec.n, spec.T, spec.p, rng);
    }
    RankPanel panel = sample_panel(X, params.r, spec.seed);
    return {std::move(panel), std::move(params), std::move(X)};
}

}  // namespace lsrank
