#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace lsrank {

/// SplitMix64 mix of (seed, stream); used to derive independent engine seeds
/// for chains and for per-row simulation streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal() { return normal_(engine_); }
    double gamma(double shape, double rate);
    double inverse_gamma(double shape, double scale) { return 1.0 / gamma(shape, scale); }
    double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }
    /// Standard Gumbel draw -log(-log U).
    double gumbel() { return -std::log(-std::log(uniform())); }
    std::vector<double> dirichlet(std::span<const double> alpha);
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

    std::mt19937_64& engine() { return engine_; }

    // Text serialization of the complete generator state.
    void save(std::ostream& os) const;
    void load(std::istream& is);

    bool operator==(const Rng& o) const { return engine_ == o.engine_ && normal_ == o.normal_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace lsrank
