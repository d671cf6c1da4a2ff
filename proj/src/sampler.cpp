#include "lsrank/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace lsrank {

namespace {

constexpr const char* kCheckpointMagic = "lsrank-checkpoint";
constexpr int kCheckpointVersion = 1;

std::vector<double> log_of(std::span<const double> r) {
    std::vector<double> out(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) out[j] = std::log(r[j]);
    return out;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

double sq_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

int q_of(const RankPanel& panel, const SamplerOptions& opts) { return opts.top_q.value_or(panel.n() - 1); }

double step_sum_squares(const LatentTrajectories& X, int t) {
    double ss = 0.0;
    for (int i = 0; i < X.n(); ++i) ss += sq_dist(X.pos(t, i), X.pos(t - 1, i));
    return ss;
}

// Gaussian-prior part of the latent full conditional for X_it at x.
double latent_log_prior(const LatentTrajectories& X, const ModelParams& params, int t, int i,
                        std::span<const double> x) {
    const int T = X.T();
    double lp = 0.0;
    if (t == 0)
        lp -= 0.5 * params.tau0 * sq_norm(x);
    else
        lp -= 0.5 * params.tau[t - 1] * sq_dist(x, X.pos(t - 1, i));
    if (t + 1 < T) lp -= 0.5 * params.tau[t] * sq_dist(X.pos(t + 1, i), x);
    return lp;
}

}  // namespace

double log_gamma_density(double x, double shape, double rate) {
    if (!(x > 0.0)) return -INFINITY;
    if (shape < 10.0) return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
    // Large shape: write the density around its mode so the O(shape log shape)
    // terms cancel analytically. u = rate x / shape, and the Stirling
    // remainder of lgamma is taken from its asymptotic series.
    const double a = shape, u = rate * x / a;
    const double a2 = a * a;
    const double stirling = (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * a2)) / a2) / a;
    return 0.5 * std::log(a / (2.0 * M_PI)) - stirling + a * (std::log1p(u - 1.0) - (u - 1.0)) - std::log(x);
}

double log_lognormal_density(double x, double mu, double sigma2) {
    if (!(x > 0.0)) return -INFINITY;
    const double z = std::log(x) - mu;
    return -std::log(x) - 0.5 * std::log(2.0 * M_PI * sigma2) - z * z / (2.0 * sigma2);
}

double log_dirichlet_density(std::span<const double> x, std::span<const double> alpha) {
    double total = 0.0, lp = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0.0)) return -INFINITY;
        total += alpha[k];
        lp += (alpha[k] - 1.0) * std::log(x[k]) - std::lgamma(alpha[k]);
    }
    return lp + std::lgamma(total);
}

double theta_log_conditional(double theta, const ModelParams& params, const Hyperparams& hyper,
                             bool include_tau_path) {
    double lp = log_lognormal_density(theta, hyper.mu, hyper.sigma2);
    if (include_tau_path) {
        double prev = params.tau1;
        for (double tau : params.tau) {
            lp += log_gamma_density(tau, theta, theta / prev);
            prev = tau;
        }
    }
    return lp;
}

ChainState make_state(const LatentTrajectories& X, const ModelParams& params, const Hyperparams& hyper,
                      const SamplerOptions& opts) {
    ChainState s;
    s.X = X;
    s.params = params;
    s.rng = Rng(hyper.seed, opts.chain);
    s.latent_scale.assign(std::size_t(X.T()) * X.n(), hyper.latent_scale);
    s.latent_batch_accepts.assign(std::size_t(X.T()) * X.n(), 0);
    s.theta_scale = hyper.theta_scale;
    return s;
}

void mh_update_latent(ChainState& state, const RankPanel& panel, const Hyperparams& /*hyper*/,
                      const SamplerOptions& opts, const MhObserver* observer) {
    LatentTrajectories& X = state.X;
    const int T = X.T(), n = X.n(), p = X.p();
    const int q = q_of(panel, opts);
    const auto log_r = log_of(state.params.r);

    std::vector<double> rows(n), new_rows(n);
    std::vector<double> old_pos(p), proposal(p);

    for (int t = 0; t < T; ++t) {
        if (opts.use_likelihood)
            for (int j = 0; j < n; ++j) rows[j] = row_loglik_logr(panel, X, log_r, t, j, q);

        for (int i = 0; i < n; ++i) {
            const std::size_t slot = std::size_t(t) * n + i;
            const double scale = state.latent_scale[slot];
            auto pos = X.pos(t, i);
            std::copy(pos.begin(), pos.end(), old_pos.begin());
            for (int d = 0; d < p; ++d) proposal[d] = old_pos[d] + scale * state.rng.normal();

            double log_ratio = latent_log_prior(X, state.params, t, i, proposal) -
                               latent_log_prior(X, state.params, t, i, old_pos);
            if (opts.use_likelihood) {
                // Moving X_it changes every row at time t: row i through all of
                // its distances, row j through d_jit.
                std::copy(proposal.begin(), proposal.end(), pos.begin());
                try {
                    for (int j = 0; j < n; ++j) {
                        new_rows[j] = row_loglik_logr(panel, X, log_r, t, j, q);
                        log_ratio += new_rows[j] - rows[j];
                    }
                } catch (const NumericalError&) {
                    log_ratio = NAN;
                }
                std::copy(old_pos.begin(), old_pos.end(), pos.begin());
            }

            const double log_u = std::log(state.rng.uniform());
            const bool finite = std::isfinite(log_ratio);
            const bool accept = finite && log_u < log_ratio;
            if (!finite) ++state.nonfinite_rejections;
            if (observer && observer->latent) observer->latent({state, t, i, proposal, log_ratio, log_u, accept});

            ++state.latent.proposed;
            if (accept) {
                ++state.latent.accepted;
                ++state.latent_batch_accepts[slot];
                std::copy(proposal.begin(), proposal.end(), pos.begin());
                if (opts.use_likelihood) rows.swap(new_rows);
            }
        }
    }
}

void draw_tau0(ChainState& state, const Hyperparams& hyper) {
    const LatentTrajectories& X = state.X;
    double ss = 0.0;
    for (int i = 0; i < X.n(); ++i) ss += sq_norm(X.pos(0, i));
    const double shape = 1.0 + 0.5 * X.n() * X.p();
    state.params.tau0 = state.rng.gamma(shape, hyper.lambda0 + 0.5 * ss);
}

void draw_tau1(ChainState& state, const Hyperparams& hyper) {
    const ModelParams& P = state.params;
    if (P.tau.empty()) {
        state.params.tau1 = state.rng.inverse_gamma(hyper.lambda1 / 2.0, 0.5);
        return;
    }
    state.params.tau1 = state.rng.inverse_gamma(hyper.lambda1 / 2.0 + P.theta, 0.5 + P.theta * P.tau[0]);
}

void draw_tau_path(ChainState& state, const SamplerOptions& opts) {
    ModelParams& P = state.params;
    const LatentTrajectories& X = state.X;
    const double half_np = 0.5 * X.n() * X.p();
    const int steps = static_cast<int>(P.tau.size());
    for (int k = 0; k < steps; ++k) {
        const double prev = k == 0 ? P.tau1 : P.tau[k - 1];
        const double rate = P.theta / prev + 0.5 * step_sum_squares(X, k + 1);
        if (!(rate > 0.0) || !std::isfinite(rate)) throw NumericalError("draw_tau_path: invalid gamma rate");
        const double draw = state.rng.gamma(P.theta + half_np, rate);

        if (opts.tau_path == TauPathUpdate::Factorized || k + 1 == steps) {
            P.tau[k] = draw;
            continue;
        }
        // Omitted factor Gamma(tau_{k+1} | theta, theta / tau_k) as a weight.
        const double next = P.tau[k + 1];
        auto log_w = [&](double tau) { return -P.theta * std::log(tau) - P.theta * next / tau; };
        const double log_ratio = log_w(draw) - log_w(P.tau[k]);
        ++state.tau_path.proposed;
        if (std::log(state.rng.uniform()) < log_ratio) {
            ++state.tau_path.accepted;
            P.tau[k] = draw;
        }
    }
}

void mh_update_theta(ChainState& state, const Hyperparams& hyper, const SamplerOptions& opts,
                     const MhObserver* observer) {
    const double current = state.params.theta;
    const double proposal = current * std::exp(state.theta_scale * state.rng.normal());
    const bool with_path = opts.theta_uses_tau_path;
    const double log_ratio = theta_log_conditional(proposal, state.params, hyper, with_path) -
                             theta_log_conditional(current, state.params, hyper, with_path) +
                             std::log(proposal / current);
    const double log_u = std::log(state.rng.uniform());
    const bool finite = std::isfinite(log_ratio);
    const bool accept = finite && log_u < log_ratio;
    if (!finite) ++state.nonfinite_rejections;
    if (observer && observer->theta) observer->theta({state, proposal, log_ratio, log_u, accept});
    ++state.theta.proposed;
    if (accept) {
        ++state.theta.accepted;
        ++state.theta_batch_accepts;
        state.params.theta = proposal;
    }
}

void mh_update_reach(ChainState& state, const RankPanel& panel, const Hyperparams& hyper,
                     const SamplerOptions& opts, const MhObserver* observer) {
    const int n = panel.n();
    const std::vector<double>& r = state.params.r;
    std::vector<double> conc(n), alpha(n);
    for (int i = 0; i < n; ++i) {
        conc[i] = hyper.kappa * r[i];
        alpha[i] = hyper.alpha_at(i);
    }
    std::vector<double> proposal = state.rng.dirichlet(conc);

    double log_ratio = NAN;
    const bool valid = std::all_of(proposal.begin(), proposal.end(),
                                   [](double v) { return v > 0.0 && std::isfinite(v); });
    if (valid) {
        std::vector<double> back(n);
        for (int i = 0; i < n; ++i) back[i] = hyper.kappa * proposal[i];
        log_ratio = log_dirichlet_density(proposal, alpha) - log_dirichlet_density(r, alpha) +
                    log_dirichlet_density(r, back) - log_dirichlet_density(proposal, conc);
        if (opts.use_likelihood) {
            try {
                log_ratio += total_loglik(panel, state.X, proposal, opts.top_q) -
                             total_loglik(panel, state.X, r, opts.top_q);
            } catch (const NumericalError&) {
                log_ratio = NAN;
            }
        }
    }
    const double log_u = std::log(state.rng.uniform());
    const bool finite = std::isfinite(log_ratio);
    const bool accept = finite && log_u < log_ratio;
    if (!finite) ++state.nonfinite_rejections;
    if (observer && observer->reach) observer->reach({state, proposal, log_ratio, log_u, accept});
    ++state.reach.proposed;
    if (accept) {
        ++state.reach.accepted;
        state.params.r = std::move(proposal);
    }
}

namespace {

void adapt_scales(ChainState& state, const SamplerOptions& opts) {
    for (std::size_t k = 0; k < state.latent_scale.size(); ++k) {
        const double rate = double(state.latent_batch_accepts[k]) / opts.adapt_batch;
        state.latent_scale[k] *= std::exp(rate - opts.target_accept);
        state.latent_batch_accepts[k] = 0;
    }
    const double rate = double(state.theta_batch_accepts) / opts.adapt_batch;
    state.theta_scale *= std::exp(rate - opts.target_accept);
    state.theta_batch_accepts = 0;
}

}  // namespace

void sweep(ChainState& state, const RankPanel& panel, const Hyperparams& hyper, const SamplerOptions& opts,
           const MhObserver* observer) {
    if (opts.update_latent) mh_update_latent(state, panel, hyper, opts, observer);
    if (opts.update_tau0) draw_tau0(state, hyper);
    if (opts.update_tau1) draw_tau1(state, hyper);
    if (opts.update_tau_path) draw_tau_path(state, opts);
    if (opts.update_theta) mh_update_theta(state, hyper, opts, observer);
    if (opts.update_reach) mh_update_reach(state, panel, hyper, opts, observer);
    ++state.iteration;

    if (opts.adapt && state.iteration <= hyper.burn_in && state.iteration % opts.adapt_batch == 0)
        adapt_scales(state, opts);
    if (state.iteration == hyper.burn_in) {
        std::fill(state.latent_batch_accepts.begin(), state.latent_batch_accepts.end(), 0);
        state.theta_batch_accepts = 0;
    }
}

LatentTrajectories align_to(const LatentTrajectories& X, const Eigen::MatrixXd& target) {
    return from_stacked(procrustes_align(stacked_matrix(X), target).aligned, X.T(), X.n());
}

ChainResult run_chain(const RankPanel& panel, const Hyperparams& hyper, const InitResult& init,
                      const SamplerOptions& opts) {
    hyper.validate();
    if (init.X1.T() != panel.T() || init.X1.n() != panel.n())
        throw ConfigError("run_chain: initialization does not match the panel shape");
    if (int(init.r1.size()) != panel.n()) throw ConfigError("run_chain: reach vector does not match the panel");
    if (int(init.tau.size()) != panel.T() - 1) throw ConfigError("run_chain: precision path has the wrong length");
    if (!hyper.alpha.empty() && int(hyper.alpha.size()) != panel.n())
        throw ConfigError("run_chain: alpha has the wrong length");
    if (opts.top_q && (*opts.top_q < 1 || *opts.top_q > panel.n() - 1))
        throw ConfigError("run_chain: top-q must lie in 1..n-1");
    const ModelParams start = init.params();
    start.validate(panel.n(), panel.T());

    ChainResult out;
    ChainState state = make_state(init.X1, start, hyper, opts);

    out.traces.names = {"theta", "tau0", "tau1"};
    for (int t = 2; t <= panel.T(); ++t) out.traces.names.push_back("tau" + std::to_string(t));
    out.traces.rows.reserve(std::size_t(hyper.iterations));

    BlockCounter latent0, theta0, reach0, path0;
    for (long it = 0; it < hyper.iterations; ++it) {
        if (it == hyper.burn_in) {
            latent0 = state.latent;
            theta0 = state.theta;
            reach0 = state.reach;
            path0 = state.tau_path;
        }
        sweep(state, panel, hyper, opts);

        std::vector<double> row{state.params.theta, state.params.tau0, state.params.tau1};
        row.insert(row.end(), state.params.tau.begin(), state.params.tau.end());
        out.traces.rows.push_back(std::move(row));

        if (it < hyper.burn_in || (it - hyper.burn_in) % hyper.thin != 0) continue;
        if (out.reference.size() == 0) out.reference = stacked_matrix(state.X);
        out.samples.push_back({align_to(state.X, out.reference), state.params, it + 1});
    }

    auto rate = [](const BlockCounter& now, const BlockCounter& then) {
        const long proposed = now.proposed - then.proposed;
        return proposed ? double(now.accepted - then.accepted) / double(proposed) : 1.0;
    };
    out.acceptance = {rate(state.latent, latent0), rate(state.theta, theta0), rate(state.reach, reach0),
                      rate(state.tau_path, path0)};
    out.final_state = std::move(state);
    return out;
}

void save_checkpoint(const ChainState& s, std::ostream& os) {
    os << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << "dims " << s.X.T() << ' ' << s.X.n() << ' ' << s.X.p() << '\n';
    os << "iteration " << s.iteration << '\n';
    auto write_vec = [&](const char* key, const auto& v) {
        os << key << ' ' << v.size();
        for (const auto& x : v) os << ' ' << x;
        os << '\n';
    };
    write_vec("X", s.X.values());
    write_vec("r", s.params.r);
    os << "scalars " << s.params.tau0 << ' ' << s.params.tau1 << ' ' << s.params.theta << '\n';
    write_vec("tau", s.params.tau);
    write_vec("latent_scale", s.latent_scale);
    write_vec("latent_batch", s.latent_batch_accepts);
    os << "theta_scale " << s.theta_scale << ' ' << s.theta_batch_accepts << '\n';
    os << "counters " << s.latent.proposed << ' ' << s.latent.accepted << ' ' << s.theta.proposed << ' '
       << s.theta.accepted << ' ' << s.reach.proposed << ' ' << s.reach.accepted << ' ' << s.tau_path.proposed
       << ' ' << s.tau_path.accepted << ' ' << s.nonfinite_rejections << '\n';
    os << "rng ";
    s.rng.save(os);
    os << '\n';
}

ChainState load_checkpoint(std::istream& is) {
    auto expect = [&](const char* key) {
        std::string word;
        if (!(is >> word) || word != key) throw ConfigError(std::string("checkpoint: expected '") + key + "'");
    };
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != kCheckpointMagic) throw ConfigError("checkpoint: not a checkpoint file");
    if (version != kCheckpointVersion)
        throw ConfigError("checkpoint: unsupported version " + std::to_string(version));

    // Doubles are read through strtod so that max_digits10 output round-trips.
    auto read_double = [&]() {
        std::string tok;
        if (!(is >> tok)) throw ConfigError("checkpoint: truncated");
        return std::strtod(tok.c_str(), nullptr);
    };
    auto read_doubles = [&](const char* key) {
        expect(key);
        std::size_t count = 0;
        is >> count;
        std::vector<double> v(count);
        for (double& x : v) x = read_double();
        return v;
    };

    ChainState s;
    int T = 0, n = 0, p = 0;
    expect("dims");
    is >> T >> n >> p;
    expect("iteration");
    is >> s.iteration;
    s.X = LatentTrajectories(T, n, p, read_doubles("X"));
    s.params.r = read_doubles("r");
    expect("scalars");
    s.params.tau0 = read_double();
    s.params.tau1 = read_double();
    s.params.theta = read_double();
    s.params.tau = read_doubles("tau");
    s.latent_scale = read_doubles("latent_scale");
    expect("latent_batch");
    std::size_t count = 0;
    is >> count;
    s.latent_batch_accepts.resize(count);
    for (int& v : s.latent_batch_accepts) is >> v;
    expect("theta_scale");
    s.theta_scale = read_double();
    is >> s.theta_batch_accepts;
    expect("counters");
    is >> s.latent.proposed >> s.latent.accepted >> s.theta.proposed >> s.theta.accepted >> s.reach.proposed >>
        s.reach.accepted >> s.tau_path.proposed >> s.tau_path.accepted >> s.nonfinite_rejections;
    expect("rng");
    s.rng.load(is);
    if (!is) throw ConfigError("checkpoint: malformed contents");
    return s;
}

}  // namespace lsrank
