#include "lsrank/init.hpp"

#include <algorithm>
#include <cmath>

namespace lsrank {

void InitResult::apply_to(Hyperparams& hyper) const {
    hyper.lambda0 = lambda0;
    hyper.lambda1 = lambda1;
    hyper.mu = mu;
}

std::vector<double> init_social_reach(const RankPanel& panel) {
    const int n = panel.n();
    const int T = panel.T();
    const double denom = double(n) * n * (n - 1) * T;
    std::vector<double> r(n, 0.0);
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (i != j) r[i] += 2.0 * (n - panel.rank(t, j, i));
    for (double& v : r) v /= denom;
    return r;
}

Eigen::MatrixXd build_dissimilarity(const RankPanel& panel, const std::vector<double>& r1, int t) {
    const int n = panel.n();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = r1[j] / (n - panel.rank(t, i, j)) + r1[i] / (n - panel.rank(t, j, i));
            D(i, j) = d;
            D(j, i) = d;
        }
    return D;
}

Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& D, int p) {
    const Eigen::Index n = D.rows();
    const Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    const Eigen::MatrixXd B = -0.5 * J * D.cwiseProduct(D) * J;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
    if (eig.info() != Eigen::Success) throw NumericalError("classical_mds: eigen-decomposition failed");

    // Eigenvalues come out ascending; take the top p.
    Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(n, p);
    for (int k = 0; k < p && k < n; ++k) {
        const Eigen::Index idx = n - 1 - k;
        const double lambda = std::max(0.0, eig.eigenvalues()(idx));
        coords.col(k) = eig.eigenvectors().col(idx) * std::sqrt(lambda);
    }
    coords.rowwise() -= coords.colwise().mean();
    return coords;
}

ProcrustesResult procrustes_align(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target) {
    if (source.rows() != target.rows() || source.cols() != target.cols())
        throw ConfigError("procrustes_align: shape mismatch");
    const Eigen::RowVectorXd source_mean = source.colwise().mean();
    const Eigen::RowVectorXd target_mean = target.colwise().mean();
    const Eigen::MatrixXd S = source.rowwise() - source_mean;
    const Eigen::MatrixXd Tc = target.rowwise() - target_mean;

    ProcrustesResult out;
    if (S.norm() == 0.0) {
        out.aligned = S.rowwise() + target_mean;
        out.degenerate = true;
        return out;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S.transpose() * Tc, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd R = svd.matrixU() * svd.matrixV().transpose();
    out.aligned = (S * R).rowwise() + target_mean;
    return out;
}

Eigen::MatrixXd slice_matrix(const LatentTrajectories& X, int t) {
    Eigen::MatrixXd M(X.n(), X.p());
    for (int i = 0; i < X.n(); ++i)
        for (int d = 0; d < X.p(); ++d) M(i, d) = X(t, i, d);
    return M;
}

void set_slice(LatentTrajectories& X, int t, const Eigen::MatrixXd& M) {
    for (int i = 0; i < X.n(); ++i)
        for (int d = 0; d < X.p(); ++d) X(t, i, d) = M(i, d);
}

Eigen::MatrixXd stacked_matrix(const LatentTrajectories& X) {
    Eigen::MatrixXd M(Eigen::Index(X.T()) * X.n(), X.p());
    for (int t = 0; t < X.T(); ++t)
        for (int i = 0; i < X.n(); ++i)
            for (int d = 0; d < X.p(); ++d) M(Eigen::Index(t) * X.n() + i, d) = X(t, i, d);
    return M;
}

LatentTrajectories from_stacked(const Eigen::MatrixXd& M, int T, int n) {
    const int p = static_cast<int>(M.cols());
    LatentTrajectories X(T, n, p);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < p; ++d) X(t, i, d) = M(Eigen::Index(t) * n + i, d);
    return X;
}

LatentTrajectories initial_configuration(const RankPanel& panel, const std::vector<double>& r1, int p) {
    LatentTrajectories X(panel.T(), panel.n(), p);
    Eigen::MatrixXd prev;
    for (int t = 0; t < panel.T(); ++t) {
        Eigen::MatrixXd coords = classical_mds(build_dissimilarity(panel, r1, t), p);
        if (t > 0) coords = procrustes_align(coords, prev).aligned;
        set_slice(X, t, coords);
        prev = std::move(coords);
    }
    return X;
}

ScaleSearchResult scale_search(const RankPanel& panel, const LatentTrajectories& Xstar,
                               const std::vector<double>& r1) {
    ScaleSearchResult out;
    const bool flat = std::all_of(Xstar.values().begin(), Xstar.values().end(),
                                  [](double v) { return v == 0.0; });
    if (flat) {
        out.c0 = 1.0;
        out.X1 = Xstar;
        out.degenerate = true;
        return out;
    }

    LatentTrajectories work = Xstar;
    auto objective = [&](double log10c) {
        const double c = std::pow(10.0, log10c);
        for (std::size_t k = 0; k < work.values().size(); ++k) work.values()[k] = c * Xstar.values()[k];
        return total_loglik(panel, work, r1);
    };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double tol = std::log10(1.0 + 1e-4);
    double a = -3.0, b = 3.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    double best_x = f1 >= f2 ? x1 : x2, best_f = std::max(f1, f2);
    while (b - a > tol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
            if (f1 > best_f) best_f = f1, best_x = x1;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
            if (f2 > best_f) best_f = f2, best_x = x2;
        }
    }
    out.c0 = std::pow(10.0, best_x);
    out.X1 = Xstar;
    out.X1.scale(out.c0);
    return out;
}

namespace {

double clamp_precision(double mean_sq, const char* what, std::vector<std::string>& warnings) {
    if (mean_sq <= 0.0 || 1.0 / mean_sq > kPrecisionCeiling) {
        warnings.push_back(std::string(what) + ": zero or tiny dispersion, precision clamped at 1e8");
        return kPrecisionCeiling;
    }
    return 1.0 / mean_sq;
}

}  // namespace

PrecisionInit init_precisions(const LatentTrajectories& X1) {
    const int T = X1.T(), n = X1.n(), p = X1.p();
    const double np = double(n) * p;
    PrecisionInit out;

    double ss = 0.0;
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < p; ++d) ss += X1(0, i, d) * X1(0, i, d);
    out.tau0 = clamp_precision(ss / np, "tau0", out.warnings);

    for (int t = 1; t < T; ++t) {
        double step = 0.0;
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < p; ++d) {
                const double diff = X1(t, i, d) - X1(t - 1, i, d);
                step += diff * diff;
            }
        out.tau.push_back(clamp_precision(step / np, "tau_t", out.warnings));
    }
    out.tau1 = out.tau.empty() ? out.tau0 : out.tau.front();

    // Ratios between consecutive step precisions (the first step has no
    // predecessor among the estimated precisions).
    std::vector<double> ratios;
    for (std::size_t k = 1; k < out.tau.size(); ++k) ratios.push_back(out.tau[k] / out.tau[k - 1]);
    if (ratios.size() < 2) {
        out.theta = 1.0;
        out.warnings.push_back("theta: fewer than two precision ratios, theta set to 1");
    } else {
        double mean = 0.0;
        for (double v : ratios) mean += v;
        mean /= double(ratios.size());
        double var = 0.0;
        for (double v : ratios) var += (v - mean) * (v - mean);
        var /= double(ratios.size() - 1);
        if (var <= 0.0 || 1.0 / var > kPrecisionCeiling) {
            out.theta = kPrecisionCeiling;
            out.warnings.push_back("theta: zero ratio variance, theta clamped at 1e8");
        } else {
            out.theta = 1.0 / var;
        }
    }

    out.lambda0 = 1.0 / out.tau0;
    out.lambda1 = 2.0 + 1.0 / out.tau1;
    out.mu = std::log(out.theta);
    return out;
}

InitResult initialize(const RankPanel& panel, int p) {
    if (p < 1) throw ConfigError("latent dimension must be positive");
    InitResult out;
    out.r1 = init_social_reach(panel);
    const LatentTrajectories Xstar = initial_configuration(panel, out.r1, p);
    ScaleSearchResult scaled = scale_search(panel, Xstar, out.r1);
    if (scaled.degenerate) out.warnings.push_back("scale_search: flat configuration, c0 set to 1");
    out.c0 = scaled.c0;
    out.X1 = std::move(scaled.X1);

    PrecisionInit prec = init_precisions(out.X1);
    out.tau0 = prec.tau0;
    out.tau1 = prec.tau1;
    out.tau = std::move(prec.tau);
    out.theta = prec.theta;
    out.lambda0 = prec.lambda0;
    out.lambda1 = prec.lambda1;
    out.mu = prec.mu;
    out.warnings.insert(out.warnings.end(), prec.warnings.begin(), prec.warnings.end());
    return out;
}

}  // namespace lsrank
