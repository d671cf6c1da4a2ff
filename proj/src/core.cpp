#include "lsrank/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lsrank {

namespace {

std::string with_coords(const std::string& what, int t, int i) {
    if (t < 0 && i < 0) return what;
    std::ostringstream os;
    os << what << " (t=" << t + 1 << ", i=" << i + 1 << ")";
    return os.str();
}

}  // namespace

ValidationError::ValidationError(const std::string& what, int t, int i)
    : std::runtime_error(with_coords(what, t, i)), t_(t), i_(i) {}

Ordering ordering_of(std::span<const int> rank_row, int i, int t) {
    const int n = static_cast<int>(rank_row.size());
    if (n < 2) throw ValidationError("rank row needs at least two actors", t, i);
    if (i < 0 || i >= n) throw ValidationError("ranking actor out of range", t, i);
    if (rank_row[i] != 0) throw ValidationError("diagonal rank must be 0", t, i);

    Ordering order(n - 1, -1);
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const int y = rank_row[j];
        if (y < 1 || y > n - 1) throw ValidationError("rank out of range 1..n-1", t, i);
        if (order[y - 1] != -1) throw ValidationError("duplicate rank " + std::to_string(y), t, i);
        order[y - 1] = j;
    }
    return order;
}

RankPanel::RankPanel(int n, int T, std::vector<int> ranks) : n_(n), T_(T), y_(std::move(ranks)) {
    if (n < 2) throw ValidationError("panel needs n >= 2");
    if (T < 1) throw ValidationError("panel needs T >= 1");
    if (y_.size() != std::size_t(T) * n * n)
        throw ValidationError("rank array has " + std::to_string(y_.size()) + " entries, expected " +
                              std::to_string(std::size_t(T) * n * n));
    order_.resize(std::size_t(T) * n * (n - 1));
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) {
            const Ordering o = ordering_of(row(t, i), i, t);
            std::copy(o.begin(), o.end(), order_.begin() + (std::size_t(t) * n + i) * (n - 1));
        }
    }
}

LatentTrajectories::LatentTrajectories(int T, int n, int p, double fill)
    : T_(T), n_(n), p_(p), x_(std::size_t(T) * n * p, fill) {
    if (T < 1 || n < 1 || p < 1) throw ConfigError("latent trajectories need T, n, p >= 1");
}

LatentTrajectories::LatentTrajectories(int T, int n, int p, std::vector<double> values)
    : T_(T), n_(n), p_(p), x_(std::move(values)) {
    if (T < 1 || n < 1 || p < 1) throw ConfigError("latent trajectories need T, n, p >= 1");
    if (x_.size() != std::size_t(T) * n * p) throw ConfigError("latent array has the wrong size");
}

bool LatentTrajectories::all_finite() const {
    return std::all_of(x_.begin(), x_.end(), [](double v) { return std::isfinite(v); });
}

void LatentTrajectories::scale(double c) {
    for (double& v : x_) v *= c;
}

void ModelParams::validate(int n, int T) const {
    if (int(r.size()) != n) throw ValidationError("reach vector has wrong length");
    double sum = 0.0;
    for (double v : r) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("reach entries must be positive");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw ValidationError("reach vector must sum to 1");
    if (int(tau.size()) != T - 1) throw ValidationError("precision path must have T-1 entries");
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(tau0) || !positive(tau1) || !positive(theta))
        throw ValidationError("tau0, tau1 and theta must be positive");
    for (double v : tau)
        if (!positive(v)) throw ValidationError("precisions must be positive");
}

void Hyperparams::validate() const {
    for (double a : alpha)
        if (!(a > 0.0)) throw ConfigError("alpha entries must be positive");
    if (!(lambda0 > 0.0) || !(lambda1 > 0.0)) throw ConfigError("lambda0 and lambda1 must be positive");
    if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
    if (!(latent_scale > 0.0) || !(theta_scale > 0.0)) throw ConfigError("proposal scales must be positive");
    if (iterations < 1 || thin < 1 || burn_in < 0) throw ConfigError("iterations and thin must be positive");
    if (burn_in >= iterations) throw ConfigError("burn-in must be smaller than iterations");
}

double distance(const LatentTrajectories& X, int t, int i, int j) {
    const auto a = X.pos(t, i);
    const auto b = X.pos(t, j);
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return std::sqrt(s);
}

double mean_utility(const LatentTrajectories& X, std::span<const double> r, int t, int i, int j) {
    if (!(r[j] > 0.0)) throw std::domain_error("mean_utility: reach must be positive");
    return std::log(r[j]) - distance(X, t, i, j);
}

double row_loglik_logr(const RankPanel& panel, const LatentTrajectories& X,
                       std::span<const double> log_r, int t, int i, int q) {
    const auto order = panel.ordering(t, i);
    const int m = static_cast<int>(order.size());

    // log nu in rank order, then suffix log-sum-exp accumulated pairwise so
    // that no suffix underflows when the tail is far below the head.
    thread_local std::vector<double> lv;
    lv.resize(std::size_t(m));
    for (int k = 0; k < m; ++k) {
        const int j = order[k];
        lv[k] = log_r[j] - distance(X, t, i, j);
        if (!std::isfinite(lv[k]))
            throw NumericalError("non-finite utility (t=" + std::to_string(t + 1) + ", i=" + std::to_string(i + 1) +
                                 ")");
    }

    thread_local std::vector<double> log_suffix;
    log_suffix.resize(std::size_t(m));
    double acc = lv[m - 1];
    log_suffix[m - 1] = acc;
    for (int k = m - 2; k >= 0; --k) {
        const double hi = std::max(acc, lv[k]), lo = std::min(acc, lv[k]);
        acc = hi + std::log1p(std::exp(lo - hi));
        log_suffix[k] = acc;
    }

    double ll = 0.0;
    for (int k = 0; k < q; ++k) ll += lv[k] - log_suffix[k];
    if (!std::isfinite(ll))
        throw NumericalError("non-finite row log-likelihood (t=" + std::to_string(t + 1) +
                             ", i=" + std::to_string(i + 1) + ")");
    return ll;
}

namespace {

std::vector<double> log_reach(std::span<const double> r) {
    std::vector<double> out(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (!(r[j] > 0.0)) throw NumericalError("reach entries must be positive");
        out[j] = std::log(r[j]);
    }
    return out;
}

}  // namespace

double row_loglik(const RankPanel& panel, const LatentTrajectories& X, std::span<const double> r,
                  int t, int i) {
    const auto lr = log_reach(r);
    return row_loglik_logr(panel, X, lr, t, i, panel.n() - 1);
}

double row_loglik_topq(const RankPanel& panel, const LatentTrajectories& X,
                       std::span<const double> r, int t, int i, int q) {
    if (q < 1 || q > panel.n() - 1) throw ConfigError("top-q must lie in 1..n-1");
    const auto lr = log_reach(r);
    return row_loglik_logr(panel, X, lr, t, i, q);
}

double total_loglik(const RankPanel& panel, const LatentTrajectories& X, std::span<const double> r,
                    std::optional<int> top_q) {
    const int q = top_q.value_or(panel.n() - 1);
    if (q < 1 || q > panel.n() - 1) throw ConfigError("top-q must lie in 1..n-1");
    const auto lr = log_reach(r);
    double ll = 0.0;
    for (int t = 0; t < panel.T(); ++t)
        for (int i = 0; i < panel.n(); ++i) ll += row_loglik_logr(panel, X, lr, t, i, q);
    return ll;
}

}  // namespace lsrank
