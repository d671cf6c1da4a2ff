#include "lsrank/rng.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace lsrank {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    // 53-bit mantissa draw shifted off zero.
    return (double(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::gamma(double shape, double rate) {
    std::gamma_distribution<double> dist(shape, 1.0 / rate);
    return dist(engine_);
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
    std::vector<double> out(alpha.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        out[k] = gamma(alpha[k], 1.0);
        sum += out[k];
    }
    for (double& v : out) v /= sum;
    return out;
}

void Rng::save(std::ostream& os) const { os << engine_ << ' ' << normal_; }

void Rng::load(std::istream& is) { is >> engine_ >> normal_; }

}  // namespace lsrank
