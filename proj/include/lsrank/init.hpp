#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsrank/core.hpp"

namespace lsrank {

/// Data-driven starting point for the sampler plus the hyperparameters it
/// implies.
struct InitResult {
    std::vector<double> r1;
    LatentTrajectories X1;
    double c0 = 1.0;
    double tau0 = 1.0;
    double tau1 = 1.0;
    std::vector<double> tau;  // steps into t = 1..T-1
    double theta = 1.0;
    double lambda0 = 1.0;
    double lambda1 = 3.0;
    double mu = 0.0;
    std::vector<std::string> warnings;

    ModelParams params() const { return {r1, tau0, tau1, tau, theta}; }
    /// Copies the derived lambda0, lambda1, mu into hyper (alpha, sigma2 and
    /// the MCMC controls are left alone).
    void apply_to(Hyperparams& hyper) const;
};

/// Initial reaches from received ranks. Normalized over j != i so the result
/// sums to one.
std::vector<double> init_social_reach(const RankPanel& panel);

Eigen::MatrixXd build_dissimilarity(const RankPanel& panel, const std::vector<double>& r1, int t);

/// Torgerson scaling; negative eigenvalues are clipped at zero.
Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& D, int p);

struct ProcrustesResult {
    Eigen::MatrixXd aligned;
    bool degenerate = false;
};

/// Rigid motion (rotation, reflection, translation; no scaling) of source
/// that best matches target in Frobenius norm.
ProcrustesResult procrustes_align(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target);

struct ScaleSearchResult {
    double c0 = 1.0;
    LatentTrajectories X1;
    bool degenerate = false;
};

/// Golden-section search for the likelihood-maximizing global scale of
/// Xstar, over log10(c) in [-3, 3].
ScaleSearchResult scale_search(const RankPanel& panel, const LatentTrajectories& Xstar,
                               const std::vector<double>& r1);

struct PrecisionInit {
    double tau0 = 1.0;
    double tau1 = 1.0;
    std::vector<double> tau;
    double theta = 1.0;
    double lambda0 = 1.0;
    double lambda1 = 3.0;
    double mu = 0.0;
    std::vector<std::string> warnings;
};

inline constexpr double kPrecisionCeiling = 1e8;

PrecisionInit init_precisions(const LatentTrajectories& X1);

/// MDS per time point, sequential Procrustes chaining, before scaling.
LatentTrajectories initial_configuration(const RankPanel& panel, const std::vector<double>& r1, int p);

/// Full initialization pipeline.
InitResult initialize(const RankPanel& panel, int p = 2);

// Conversions between one time slice and an n x p matrix.
Eigen::MatrixXd slice_matrix(const LatentTrajectories& X, int t);
void set_slice(LatentTrajectories& X, int t, const Eigen::MatrixXd& M);
/// Stacked (nT) x p matrix, time-major.
Eigen::MatrixXd stacked_matrix(const LatentTrajectories& X);
LatentTrajectories from_stacked(const Eigen::MatrixXd& M, int T, int n);

}  // namespace lsrank
