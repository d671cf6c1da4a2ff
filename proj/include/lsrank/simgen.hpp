#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lsrank/core.hpp"
#include "lsrank/rng.hpp"

namespace lsrank {

inline constexpr double kEulerGamma = 0.5772156649;

/// Generator settings. If params is absent every parameter is drawn from the
/// priors in `prior`; if params is given with an empty tau, the precision
/// path is drawn as a gamma random walk from tau1 and theta. If positions is
/// given it replaces the trajectory draw.
struct GenSpec {
    int n = 10;
    int T = 5;
    int p = 2;
    std::optional<ModelParams> params;
    std::optional<LatentTrajectories> positions;
    Hyperparams prior;
    std::uint64_t seed = 1;
};

struct GeneratedPanel {
    RankPanel panel;
    ModelParams params;
    LatentTrajectories X;
};

ModelParams draw_params_from_prior(int n, int T, const Hyperparams& prior, Rng& rng);

/// tau_t = tau_{t-1} * eta_t with eta_t ~ Gamma(theta, theta), starting at tau1.
std::vector<double> draw_precision_path(double tau1, double theta, int T, Rng& rng);

LatentTrajectories sample_trajectories(const ModelParams& params, int n, int T, int p, Rng& rng);
/// Resolves params as described on GenSpec and draws trajectories.
LatentTrajectories sample_trajectories(const GenSpec& spec);

/// Gumbel utilities Z_j = log r_j - d_ij + (G - gamma_EM), ranked descending.
std::vector<int> sample_rank_row(const LatentTrajectories& X, std::span<const double> r, int t, int i,
                                 Rng& rng);

/// Rows drawn from independent per-(t, i) streams derived from seed.
RankPanel sample_panel(const LatentTrajectories& X, std::span<const double> r, std::uint64_t seed);

GeneratedPanel generate_panel(const GenSpec& spec);

}  // namespace lsrank
