#include <doctest.h>

#include <set>
#include <sstream>

#include "lsrank/rng.hpp"
#include "support.hpp"

using namespace lsrank;
using namespace testsupport;

TEST_CASE("derived seeds are distinct and deterministic") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(7, s));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}

TEST_CASE("same seed, same stream") {
    Rng a(42, 5), b(42, 5), c(42, 6);
    for (int k = 0; k < 100; ++k) {
        const double x = a.normal();
        CHECK(x == b.normal());
        (void)c;
    }
    CHECK(Rng(42, 5).uniform() != Rng(42, 6).uniform());
}

TEST_CASE("uniform stays in the open unit interval") {
    Rng g(1);
    for (int k = 0; k < 100000; ++k) {
        const double u = g.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("generator state round-trips through text") {
    Rng g(9);
    for (int k = 0; k < 17; ++k) g.normal();  // leaves a cached normal deviate behind
    std::stringstream ss;
    g.save(ss);
    Rng h(0);
    h.load(ss);
    CHECK(h == g);
    for (int k = 0; k < 50; ++k) CHECK(h.normal() == g.normal());
}

TEST_CASE("gamma uses shape and rate") {
    Rng g(3);
    std::vector<double> xs;
    for (int k = 0; k < 100000; ++k) xs.push_back(g.gamma(2.5, 4.0));
    CHECK(mean_of(xs) == doctest::Approx(2.5 / 4.0).epsilon(0.01));
    CHECK(var_of(xs) == doctest::Approx(2.5 / 16.0).epsilon(0.03));
}

TEST_CASE("inverse gamma mean") {
    Rng g(4);
    std::vector<double> xs;
    for (int k = 0; k < 100000; ++k) xs.push_back(g.inverse_gamma(6.0, 2.0));
    CHECK(mean_of(xs) == doctest::Approx(2.0 / 5.0).epsilon(0.01));
}

TEST_CASE("gumbel location and scale") {
    Rng g(5);
    std::vector<double> xs;
    for (int k = 0; k < 200000; ++k) xs.push_back(g.gumbel());
    CHECK(mean_of(xs) == doctest::Approx(0.5772156649).epsilon(0.01));
    CHECK(var_of(xs) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(0.02));
}

TEST_CASE("dirichlet lies on the simplex with the right mean") {
    Rng g(6);
    const std::vector<double> alpha{1.0, 2.0, 7.0};
    std::vector<double> m(3, 0.0);
    const int draws = 50000;
    for (int k = 0; k < draws; ++k) {
        const auto x = g.dirichlet(alpha);
        REQUIRE(std::abs(x[0] + x[1] + x[2] - 1.0) < 1e-12);
        for (int a = 0; a < 3; ++a) m[a] += x[a] / draws;
    }
    CHECK(m[0] == doctest::Approx(0.1).epsilon(0.02));
    CHECK(m[2] == doctest::Approx(0.7).epsilon(0.01));
}
