#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsrank {

// Time indices are 0-based throughout the API (t = 0 is the first
// observation). Actor indices are 0-based. Ranks are 1-based values
// (1 = most favored) and 0 marks the diagonal.

class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& what, int t = -1, int i = -1);
    int time() const { return t_; }
    int actor() const { return i_; }

private:
    int t_;
    int i_;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordering of one rank row: order[k] is the actor placed at rank k+1.
using Ordering = std::vector<int>;

/// Returns the ordering of rank_row for ranking actor i. Throws
/// ValidationError when the row is not a permutation of 1..n-1 with a zero
/// at position i; t is only used to label the error.
Ordering ordering_of(std::span<const int> rank_row, int i, int t = -1);

/// Observed rank panel. Validated on construction; orderings are cached.
class RankPanel {
public:
    RankPanel() = default;
    /// ranks is T*n*n in (t, i, j) row-major order.
    RankPanel(int n, int T, std::vector<int> ranks);

    int n() const { return n_; }
    int T() const { return T_; }
    int rank(int t, int i, int j) const { return y_[(std::size_t(t) * n_ + i) * n_ + j]; }
    std::span<const int> row(int t, int i) const {
        return {y_.data() + (std::size_t(t) * n_ + i) * n_, std::size_t(n_)};
    }
    std::span<const int> ordering(int t, int i) const {
        return {order_.data() + (std::size_t(t) * n_ + i) * (n_ - 1), std::size_t(n_ - 1)};
    }
    const std::vector<int>& data() const { return y_; }

    bool operator==(const RankPanel& o) const { return n_ == o.n_ && T_ == o.T_ && y_ == o.y_; }

private:
    int n_ = 0;
    int T_ = 0;
    std::vector<int> y_;
    std::vector<int> order_;
};

/// Latent positions X[t][i] in R^p stored contiguously as (t, i, d).
class LatentTrajectories {
public:
    LatentTrajectories() = default;
    LatentTrajectories(int T, int n, int p, double fill = 0.0);
    LatentTrajectories(int T, int n, int p, std::vector<double> values);

    int T() const { return T_; }
    int n() const { return n_; }
    int p() const { return p_; }

    std::span<double> pos(int t, int i) {
        return {x_.data() + (std::size_t(t) * n_ + i) * p_, std::size_t(p_)};
    }
    std::span<const double> pos(int t, int i) const {
        return {x_.data() + (std::size_t(t) * n_ + i) * p_, std::size_t(p_)};
    }
    double& operator()(int t, int i, int d) { return x_[(std::size_t(t) * n_ + i) * p_ + d]; }
    double operator()(int t, int i, int d) const { return x_[(std::size_t(t) * n_ + i) * p_ + d]; }

    std::vector<double>& values() { return x_; }
    const std::vector<double>& values() const { return x_; }

    bool all_finite() const;
    void scale(double c);

    bool operator==(const LatentTrajectories& o) const = default;

private:
    int T_ = 0;
    int n_ = 0;
    int p_ = 0;
    std::vector<double> x_;
};

/// Model parameters. tau[k] is the precision of the random-walk step into
/// time k+1, so tau has T-1 entries (tau_2..tau_T).
struct ModelParams {
    std::vector<double> r;
    double tau0 = 1.0;
    double tau1 = 1.0;
    std::vector<double> tau;
    double theta = 1.0;

    /// Throws ValidationError if the simplex or positivity constraints fail.
    void validate(int n, int T) const;
    bool operator==(const ModelParams&) const = default;
};

/// Prior hyperparameters and MCMC controls.
struct Hyperparams {
    std::vector<double> alpha;   // Dirichlet prior on r; empty means all ones
    double lambda0 = 1.0;        // Exp rate for tau0
    double lambda1 = 3.0;        // tau1 ~ InvGamma(lambda1/2, 1/2)
    double mu = 0.0;             // theta ~ LN(mu, sigma2)
    double sigma2 = 25.0;
    double kappa = 10000.0;      // Dirichlet proposal concentration
    double latent_scale = 0.1;   // initial random-walk sd for positions
    double theta_scale = 0.1;    // log-normal random-walk sd for theta
    long iterations = 1000;
    long burn_in = 100;
    long thin = 1;
    unsigned long long seed = 1;

    void validate() const;
    double alpha_at(int i) const { return alpha.empty() ? 1.0 : alpha[std::size_t(i)]; }
};

double distance(const LatentTrajectories& X, int t, int i, int j);

/// log r_j - d_ijt.
double mean_utility(const LatentTrajectories& X, std::span<const double> r, int t, int i, int j);

/// Plackett-Luce log-probability of row (t, i). With top_q set, only the
/// first q choices contribute (q-permutation likelihood).
double row_loglik(const RankPanel& panel, const LatentTrajectories& X, std::span<const double> r,
                  int t, int i);
double row_loglik_topq(const RankPanel& panel, const LatentTrajectories& X,
                       std::span<const double> r, int t, int i, int q);
double total_loglik(const RankPanel& panel, const LatentTrajectories& X, std::span<const double> r,
                    std::optional<int> top_q = std::nullopt);

/// Same as row_loglik_topq, but takes log r precomputed. q = n-1 gives the
/// full likelihood. Used on hot paths.
double row_loglik_logr(const RankPanel& panel, const LatentTrajectories& X,
                       std::span<const double> log_r, int t, int i, int q);

}  // namespace lsrank
