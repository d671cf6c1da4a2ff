#pragma once

#include <vector>

#include "lsrank/core.hpp"
#include "lsrank/sampler.hpp"

namespace lsrank {

struct PosteriorMeans {
    std::vector<double> r;
    LatentTrajectories X;
    std::vector<double> tau;
    double tau0 = 0.0;
    double tau1 = 0.0;
    double theta = 0.0;
};

/// Means over stored (aligned) draws. Throws ConfigError on an empty set.
PosteriorMeans posterior_means(const std::vector<PosteriorSample>& samples);

/// Variance-explained measure on the latent utility scale, with Gumbel noise
/// variance pi^2/6 per term.
double pseudo_r2(const RankPanel& panel, const LatentTrajectories& X_hat, std::span<const double> r_hat);
double pseudo_r2(const RankPanel& panel, const std::vector<PosteriorSample>& samples);

/// q[a][b] = fraction of draws with tau[b] > tau[a] (tau indexed from the
/// first step); the diagonal is 0.
using StabilityTable = std::vector<std::vector<double>>;
StabilityTable stability_table(const std::vector<PosteriorSample>& samples);

/// Mean Euclidean step length per actor.
std::vector<double> step_sizes(const LatentTrajectories& X);
std::vector<double> step_sizes(const std::vector<PosteriorSample>& samples);

/// Average rank actor i receives over all t and j != i.
std::vector<double> mean_received_rank(const RankPanel& panel);

/// Pearson correlation; throws NumericalError when either side is constant.
double pearson(std::span<const double> a, std::span<const double> b);
/// Pearson correlation of the ranks (average ranks for ties).
double spearman(std::span<const double> a, std::span<const double> b);

struct PopularityCorrelations {
    double step_vs_log_reach = 0.0;
    double log_reach_vs_mean_rank = 0.0;
};
PopularityCorrelations popularity_correlations(const RankPanel& panel,
                                               const std::vector<PosteriorSample>& samples);

struct Interval {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};
/// Posterior mean and equal-tailed interval of each tau_t.
std::vector<Interval> tau_intervals(const std::vector<PosteriorSample>& samples, double level = 0.95);

}  // namespace lsrank
