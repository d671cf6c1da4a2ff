#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsrank/core.hpp"
#include "lsrank/init.hpp"
#include "lsrank/rng.hpp"

namespace lsrank {

/// How the precision path is drawn.
///   Factorized: each tau_t from Gamma(theta + np/2, theta/tau_{t-1} + SS_t/2),
///     sequentially in t. This ignores the term through which tau_t enters
///     the prior of tau_{t+1}.
///   Exact: the same gamma draw used as an independence proposal, corrected
///     by an MH step for the omitted term, so the block targets the true
///     full conditional.
enum class TauPathUpdate { Factorized, Exact };

struct SamplerOptions {
    bool update_latent = true;
    bool update_tau0 = true;
    bool update_tau1 = true;
    bool update_tau_path = true;
    bool update_theta = true;
    bool update_reach = true;

    /// When false the observation term drops out of every MH ratio.
    bool use_likelihood = true;
    /// When false theta is updated against its log-normal prior only.
    bool theta_uses_tau_path = true;
    TauPathUpdate tau_path = TauPathUpdate::Factorized;
    std::optional<int> top_q;

    /// Batch-wise scaling of latent proposals during burn-in.
    bool adapt = true;
    double target_accept = 0.25;
    int adapt_batch = 50;
    /// Chain index, mixed into the seed.
    unsigned chain = 0;
};

struct BlockCounter {
    long proposed = 0;
    long accepted = 0;
    double rate() const { return proposed ? double(accepted) / double(proposed) : 0.0; }
    bool operator==(const BlockCounter&) const = default;
};

struct ChainState {
    LatentTrajectories X;
    ModelParams params;
    Rng rng;
    long iteration = 0;

    BlockCounter latent;
    BlockCounter theta;
    BlockCounter reach;
    BlockCounter tau_path;
    long nonfinite_rejections = 0;

    std::vector<double> latent_scale;  // per (t, i)
    std::vector<int> latent_batch_accepts;
    double theta_scale = 0.1;
    int theta_batch_accepts = 0;

    bool operator==(const ChainState&) const = default;
};

ChainState make_state(const LatentTrajectories& X, const ModelParams& params, const Hyperparams& hyper,
                      const SamplerOptions& opts = {});

/// Versioned text checkpoint; loading it and continuing reproduces the
/// uninterrupted chain bit for bit.
void save_checkpoint(const ChainState& state, std::ostream& os);
ChainState load_checkpoint(std::istream& is);

struct LatentProposal {
    const ChainState& before;
    int t;
    int i;
    std::vector<double> proposal;
    double log_ratio;
    double log_u;
    bool accepted;
};

struct ThetaProposal {
    const ChainState& before;
    double proposal;
    double log_ratio;
    double log_u;
    bool accepted;
};

struct ReachProposal {
    const ChainState& before;
    std::vector<double> proposal;
    double log_ratio;
    double log_u;
    bool accepted;
};

/// Optional hooks that see every MH decision before it is applied.
struct MhObserver {
    std::function<void(const LatentProposal&)> latent;
    std::function<void(const ThetaProposal&)> theta;
    std::function<void(const ReachProposal&)> reach;
};

// Individual blocks of one sweep, in sweep order.
void mh_update_latent(ChainState& state, const RankPanel& panel, const Hyperparams& hyper,
                      const SamplerOptions& opts, const MhObserver* observer = nullptr);
void draw_tau0(ChainState& state, const Hyperparams& hyper);
void draw_tau1(ChainState& state, const Hyperparams& hyper);
void draw_tau_path(ChainState& state, const SamplerOptions& opts);
void mh_update_theta(ChainState& state, const Hyperparams& hyper, const SamplerOptions& opts,
                     const MhObserver* observer = nullptr);
void mh_update_reach(ChainState& state, const RankPanel& panel, const Hyperparams& hyper,
                     const SamplerOptions& opts, const MhObserver* observer = nullptr);

/// Log densities shared by the MH blocks (also handy for oracles).
double log_gamma_density(double x, double shape, double rate);
double log_lognormal_density(double x, double mu, double sigma2);
double log_dirichlet_density(std::span<const double> x, std::span<const double> alpha);
double theta_log_conditional(double theta, const ModelParams& params, const Hyperparams& hyper,
                             bool include_tau_path);

/// One full sweep over all blocks plus burn-in adaptation; increments iteration.
void sweep(ChainState& state, const RankPanel& panel, const Hyperparams& hyper, const SamplerOptions& opts,
           const MhObserver* observer = nullptr);

struct PosteriorSample {
    LatentTrajectories X;  // aligned to the chain's reference draw
    ModelParams params;
    long iteration = 0;
};

struct AcceptanceRates {
    double latent = 0.0;
    double theta = 0.0;
    double reach = 0.0;
    double tau_path = 1.0;
};

/// Trace of theta, tau0, tau1, tau_2..tau_T for every iteration.
struct Traces {
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
};

struct ChainResult {
    std::vector<PosteriorSample> samples;
    AcceptanceRates acceptance;  // post burn-in
    Traces traces;
    ChainState final_state;
    Eigen::MatrixXd reference;   // stacked (nT) x p alignment target
};

/// Rigid Procrustes alignment of a whole trajectory set to a stacked target.
LatentTrajectories align_to(const LatentTrajectories& X, const Eigen::MatrixXd& target);

ChainResult run_chain(const RankPanel& panel, const Hyperparams& hyper, const InitResult& init,
                      const SamplerOptions& opts = {});

}  // namespace lsrank
