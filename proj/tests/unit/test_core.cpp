#include <doctest.h>

#include <cmath>
#include <map>

#include "lsrank/core.hpp"
#include "support.hpp"

using namespace lsrank;
using namespace testsupport;

namespace {

RankPanel single_row_panel(const std::vector<std::vector<int>>& rows) {
    std::vector<int> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return RankPanel(int(rows.size()), 1, flat);
}

}  // namespace

TEST_CASE("ordering of a rank row") {
    // Actor 1 ranks (0,3,1,4,2): actor 3 first, then 5, 2, 4.
    const std::vector<int> y{0, 3, 1, 4, 2};
    CHECK(ordering_of(y, 0) == Ordering{2, 4, 1, 3});

    CHECK(ordering_of(std::vector<int>{0, 1}, 0) == Ordering{1});
    CHECK(ordering_of(std::vector<int>{2, 0, 1, 3}, 1) == Ordering{2, 0, 3});
}

TEST_CASE("rank rows are validated with coordinates") {
    SUBCASE("duplicate rank") {
        try {
            RankPanel(3, 2, {0, 1, 2, 1, 0, 2, 1, 2, 0, /**/ 0, 1, 2, 1, 0, 2, 1, 1, 0});
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(e.time() == 1);
            CHECK(e.actor() == 2);
            CHECK(std::string(e.what()).find("(t=2, i=3)") != std::string::npos);
        }
    }
    SUBCASE("rank out of range") { CHECK_THROWS_AS(RankPanel(3, 1, {0, 1, 3, 1, 0, 2, 1, 2, 0}), ValidationError); }
    SUBCASE("nonzero diagonal") { CHECK_THROWS_AS(RankPanel(3, 1, {1, 1, 2, 1, 0, 2, 1, 2, 0}), ValidationError); }
    SUBCASE("wrong size") { CHECK_THROWS_AS(RankPanel(3, 1, {0, 1, 2}), ValidationError); }
    SUBCASE("single actor") { CHECK_THROWS_AS(RankPanel(1, 1, {0}), ValidationError); }
}

TEST_CASE("cached orderings agree with ordering_of") {
    const RankPanel panel = random_panel(6, 3, 11);
    for (int t = 0; t < 3; ++t)
        for (int i = 0; i < 6; ++i) {
            const auto cached = panel.ordering(t, i);
            CHECK(Ordering(cached.begin(), cached.end()) == ordering_of(panel.row(t, i), i));
        }
}

TEST_CASE("distance") {
    LatentTrajectories X(1, 2, 2);
    CHECK(distance(X, 0, 0, 1) == 0.0);
    X(0, 1, 0) = 3.0;
    X(0, 1, 1) = 4.0;
    CHECK(distance(X, 0, 0, 1) == doctest::Approx(5.0).epsilon(1e-15));

    const auto Y = random_positions(3, 6, 3, 5);
    for (int t = 0; t < 3; ++t)
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) CHECK(distance(Y, t, i, j) == doctest::Approx(euclid(Y, t, i, j)).epsilon(1e-14));
}

TEST_CASE("mean utility") {
    LatentTrajectories X(1, 2, 2);
    std::vector<double> r{0.5, 1.0};
    CHECK(mean_utility(X, r, 0, 0, 1) == 0.0);
    r[1] = std::exp(-1.0);
    X(0, 1, 0) = 1.0;
    CHECK(mean_utility(X, r, 0, 0, 1) == doctest::Approx(-2.0).epsilon(1e-14));
    r[1] = 0.0;
    CHECK_THROWS_AS(mean_utility(X, r, 0, 0, 1), std::domain_error);

    // exp(mean utility) plugged into the product-of-fractions oracle gives the row probability.
    const auto Y = random_positions(1, 5, 2, 8);
    const auto w = random_simplex(5, 9);
    const RankPanel panel = random_panel(5, 1, 10);
    for (int i = 0; i < 5; ++i) {
        const auto ord = panel.ordering(0, i);
        double prob = 1.0;
        for (std::size_t k = 0; k < ord.size(); ++k) {
            double rest = 0.0;
            for (std::size_t m = k; m < ord.size(); ++m) rest += std::exp(mean_utility(Y, w, 0, i, ord[m]));
            prob *= std::exp(mean_utility(Y, w, 0, i, ord[k])) / rest;
        }
        CHECK(std::exp(row_loglik(panel, Y, w, 0, i)) == doctest::Approx(prob).epsilon(1e-12));
    }
}

TEST_CASE("row log-likelihood on small cases") {
    const RankPanel two = single_row_panel({{0, 1}, {1, 0}});
    LatentTrajectories X2 = random_positions(1, 2, 2, 3);
    const std::vector<double> r2{0.3, 0.7};
    CHECK(row_loglik(two, X2, r2, 0, 0) == doctest::Approx(0.0));

    const RankPanel three = single_row_panel({{0, 1, 2}, {1, 0, 2}, {1, 2, 0}});
    LatentTrajectories X3(1, 3, 2);
    const std::vector<double> r3{1.0 / 3, 1.0 / 3, 1.0 / 3};
    CHECK(row_loglik(three, X3, r3, 0, 0) == doctest::Approx(-0.693147).epsilon(1e-6));
    CHECK(row_loglik_topq(three, X3, r3, 0, 0, 1) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("row probabilities match brute-force enumeration for n = 5") {
    const int n = 5;
    const auto X = random_positions(1, n, 2, 21);
    const auto r = random_simplex(n, 22);
    for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (const auto& ord : all_orderings(n, i)) {
            const RankPanel panel = [&] {
                std::vector<std::vector<int>> rows;
                for (int a = 0; a < n; ++a) {
                    if (a == i) {
                        rows.push_back(row_from_ordering(ord, n));
                    } else {
                        std::vector<int> o;
                        for (int j = 0; j < n; ++j)
                            if (j != a) o.push_back(j);
                        rows.push_back(row_from_ordering(o, n));
                    }
                }
                return single_row_panel(rows);
            }();
            const double p = std::exp(row_loglik(panel, X, r, 0, i));
            CHECK(p == doctest::Approx(pl_prob(X, r, 0, i, ord)).epsilon(1e-12));
            total += p;
        }
        CHECK(std::abs(total - 1.0) < 1e-10);
    }
}

TEST_CASE("top-q likelihood equals the marginal of the ordering prefix") {
    const int n = 5, q = 2;
    const auto X = random_positions(1, n, 2, 31);
    const auto r = random_simplex(n, 32);
    const int i = 1;
    std::map<std::pair<int, int>, double> marginal;
    for (const auto& ord : all_orderings(n, i)) marginal[{ord[0], ord[1]}] += pl_prob(X, r, 0, i, ord);
    const RankPanel base = random_panel(n, 1, 33);
    for (const auto& ord : all_orderings(n, i)) {
        std::vector<int> ranks = base.data();
        const auto row = row_from_ordering(ord, n);
        std::copy(row.begin(), row.end(), ranks.begin() + i * n);
        const RankPanel panel(n, 1, ranks);
        const double got = std::exp(row_loglik_topq(panel, X, r, 0, i, q));
        CHECK(got == doctest::Approx(marginal[{ord[0], ord[1]}]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(row_loglik_topq(base, X, r, 0, i, 0), ConfigError);
    CHECK_THROWS_AS(row_loglik_topq(base, X, r, 0, i, n), ConfigError);
}

TEST_CASE("total log-likelihood") {
    const RankPanel tiny(2, 1, {0, 1, 1, 0});
    CHECK(total_loglik(tiny, random_positions(1, 2, 2, 1), std::vector<double>{0.5, 0.5}) == 0.0);

    const RankPanel panel = random_panel(4, 2, 41);
    const auto X = random_positions(2, 4, 2, 42);
    const auto r = random_simplex(4, 43);
    double sum = 0.0;
    for (int t = 0; t < 2; ++t)
        for (int i = 0; i < 4; ++i) sum += row_loglik(panel, X, r, t, i);
    CHECK(std::abs(total_loglik(panel, X, r) - sum) < 1e-12);
    CHECK(total_loglik(panel, X, r) == doctest::Approx(naive_loglik(panel, X, r)).epsilon(1e-12));
    CHECK(total_loglik(panel, X, r, 3) == doctest::Approx(total_loglik(panel, X, r)).epsilon(1e-15));
}

TEST_CASE("far-apart positions stay finite") {
    const RankPanel panel = random_panel(6, 1, 51);
    auto X = random_positions(1, 6, 2, 52, 400.0);
    const auto r = random_simplex(6, 53);
    for (int i = 0; i < 6; ++i) CHECK(std::isfinite(row_loglik(panel, X, r, 0, i)));
    X(0, 0, 0) = std::nan("");
    CHECK_THROWS_AS(row_loglik(panel, X, r, 0, 0), NumericalError);
}

TEST_CASE("model parameters and hyperparameters validate") {
    ModelParams m{{0.25, 0.75}, 1.0, 1.0, {2.0}, 1.0};
    CHECK_NOTHROW(m.validate(2, 2));
    m.r = {0.3, 0.3};
    CHECK_THROWS_AS(m.validate(2, 2), ValidationError);
    m.r = {0.5, 0.5};
    m.tau = {};
    CHECK_THROWS_AS(m.validate(2, 2), ValidationError);

    Hyperparams h;
    CHECK_NOTHROW(h.validate());
    h.burn_in = h.iterations;
    CHECK_THROWS_AS(h.validate(), ConfigError);
}
