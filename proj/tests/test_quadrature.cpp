#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "specsim/quadrature.hpp"

using namespace specsim;

namespace {
bool contains_node(const Rule1D& rule, double x, double tol = 1e-13) {
    return std::any_of(rule.nodes.begin(), rule.nodes.end(),
                       [&](double n) { return std::abs(n - x) <= tol; });
}
}  // namespace

TEST_CASE("two-point Gauss-Hermite") {
    const Rule1D r = gauss_rule(Distribution::gaussian(), 2);
    REQUIRE(r.nodes.size() == 2);
    CHECK(r.nodes[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(r.nodes[1] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(r.weights[1] == doctest::Approx(0.5).epsilon(1e-13));
    double m2 = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.exact_degree == 3);
}

TEST_CASE("two-point Gauss-Legendre") {
    const Rule1D r = gauss_rule(Distribution::uniform(), 2);
    CHECK(r.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-13));
    CHECK(r.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-13));
    double m2 = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
    CHECK(m2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("one-point rules sit at the measure mean") {
    CHECK(gauss_rule(Distribution::gaussian(), 1).nodes[0] == doctest::Approx(0.0));
    CHECK(gauss_rule(Distribution::gamma(2.5), 1).nodes[0] == doctest::Approx(2.5));
    CHECK(gauss_rule(Distribution::beta(2, 3), 1).nodes[0] == doctest::Approx(0.4));
    CHECK(gauss_rule(Distribution::gaussian(), 1).weights[0] == doctest::Approx(1.0));
    CHECK_THROWS(gauss_rule(Distribution::gaussian(), 0));
}

TEST_CASE("Gauss exactness against closed-form moments") {
    const std::vector<Distribution> dists = {Distribution::gaussian(), Distribution::uniform(),
                                             Distribution::gamma(2.5), Distribution::gamma(1.0),
                                             Distribution::beta(2, 3),
                                             Distribution::beta(0.5, 0.5)};
    for (const auto& dist : dists)
        for (int n = 1; n <= 8; ++n) {
            const Rule1D r = gauss_rule(dist, n);
            for (int m = 0; m <= 2 * n - 1; ++m) {
                long double s = 0.0L;
                for (size_t i = 0; i < r.nodes.size(); ++i)
                    s += r.weights[i] * std::pow(static_cast<long double>(r.nodes[i]), m);
                const long double ref = oracle::raw_moment(dist, m);
                const long double scale = std::max<long double>(std::fabs(ref), 1.0L);
                CHECK(std::fabs(s - ref) / scale < 1e-10);
            }
        }
}

TEST_CASE("Clenshaw-Curtis basics") {
    const Rule1D l0 = clenshaw_curtis_rule(0);
    REQUIRE(l0.nodes.size() == 1);
    CHECK(l0.nodes[0] == 0.0);
    CHECK(l0.weights[0] == 1.0);

    const Rule1D l1 = clenshaw_curtis_rule(1);
    REQUIRE(l1.nodes.size() == 3);
    CHECK(l1.nodes[0] == doctest::Approx(-1.0));
    CHECK(l1.nodes[1] == 0.0);
    CHECK(l1.nodes[2] == doctest::Approx(1.0));
    double wsum = 0.0, m2 = 0.0;
    for (size_t i = 0; i < 3; ++i) {
        wsum += l1.weights[i];
        m2 += l1.weights[i] * l1.nodes[i] * l1.nodes[i];
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("Clenshaw-Curtis nesting") {
    const Rule1D l1 = clenshaw_curtis_rule(1);
    const Rule1D l2 = clenshaw_curtis_rule(2);
    const Rule1D l3 = clenshaw_curtis_rule(3);
    for (double x : l1.nodes) CHECK(contains_node(l2, x, 0.0));  // bit-exact nesting
    for (double x : l2.nodes) CHECK(contains_node(l3, x, 0.0));
}

TEST_CASE("Clenshaw-Curtis exactness to degree n-1") {
    for (int level = 1; level <= 4; ++level) {
        const Rule1D r = clenshaw_curtis_rule(level);
        const int n = static_cast<int>(r.nodes.size());
        for (int m = 0; m <= n - 1; ++m) {
            long double s = 0.0L;
            for (int i = 0; i < n; ++i)
                s += r.weights[i] * std::pow(static_cast<long double>(r.nodes[i]), m);
            const long double ref = oracle::raw_moment(Distribution::uniform(), m);
            CHECK(std::fabs(s - ref) < 1e-12);
        }
    }
}

TEST_CASE("Clenshaw-Curtis rejects unbounded distributions") {
    CHECK_THROWS(clenshaw_curtis_rule(Distribution::gaussian(), 2));
    CHECK_THROWS(clenshaw_curtis_rule(Distribution::gamma(1.0), 2));
    CHECK_NOTHROW(clenshaw_curtis_rule(Distribution::uniform(), 2));
}

TEST_CASE("tensor grid") {
    const Rule1D gh2 = gauss_rule(Distribution::gaussian(), 2);
    RuleND grid = tensor_grid({gh2, gh2});
    REQUIRE(grid.count() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(std::abs(grid.nodes[i][0]) - 1.0) < 1e-12);
        CHECK(std::abs(std::abs(grid.nodes[i][1]) - 1.0) < 1e-12);
        CHECK(grid.weights[i] == doctest::Approx(0.25).epsilon(1e-13));
    }

    // d = 1 reduces to the input rule
    RuleND g1 = tensor_grid({gh2});
    REQUIRE(g1.count() == 2);
    CHECK(g1.nodes[0][0] == doctest::Approx(gh2.nodes[0]));
    CHECK(g1.weights[1] == doctest::Approx(gh2.weights[1]));

    // mixed Gaussian x Uniform
    RuleND mixed = tensor_grid({gh2, gauss_rule(Distribution::uniform(), 2)});
    REQUIRE(mixed.count() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(std::abs(mixed.nodes[i][0]) - 1.0) < 1e-12);
        CHECK(std::abs(std::abs(mixed.nodes[i][1]) - 1.0 / std::sqrt(3.0)) < 1e-12);
        CHECK(mixed.weights[i] == doctest::Approx(0.25).epsilon(1e-13));
    }
}

TEST_CASE("Smolyak level 1 collapses to the midpoint") {
    const RuleND g = smolyak_grid({Distribution::uniform(), Distribution::uniform()}, 1);
    REQUIRE(g.count() == 1);
    CHECK(g.nodes[0][0] == 0.0);
    CHECK(g.nodes[0][1] == 0.0);
    CHECK(g.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("Smolyak level 2 cross pattern (brute-force combination values)") {
    const RuleND g = smolyak_grid({Distribution::uniform(), Distribution::uniform()}, 2);
    REQUIRE(g.count() == 5);
    double wsum = 0.0;
    for (int i = 0; i < g.count(); ++i) {
        wsum += g.weights[i];
        const double x = g.nodes[i][0], y = g.nodes[i][1];
        if (x == 0.0 && y == 0.0)
            CHECK(g.weights[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
        else {
            CHECK(std::abs(x) + std::abs(y) == doctest::Approx(1.0));  // on an axis
            CHECK(g.weights[i] == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
        }
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Smolyak constants integrate to one and keep negative weights") {
    for (int level = 1; level <= 4; ++level) {
        const RuleND g = smolyak_grid(
            {Distribution::uniform(), Distribution::gaussian(), Distribution::uniform()}, level);
        double wsum = 0.0;
        for (double w : g.weights) wsum += w;
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-10));
    }
    const RuleND g3 = smolyak_grid({Distribution::uniform(), Distribution::uniform()}, 3);
    CHECK(std::any_of(g3.weights.begin(), g3.weights.end(), [](double w) { return w < 0.0; }));
}

TEST_CASE("Smolyak integrates low-order polynomials exactly") {
    // level L is exact for total degree <= 2L-1 with these growth rules
    const std::vector<Distribution> dists = {Distribution::gaussian(), Distribution::uniform()};
    const RuleND g = smolyak_grid(dists, 3);
    auto mom = [&](int i, int j) {
        double s = 0.0;
        for (int q = 0; q < g.count(); ++q)
            s += g.weights[q] * std::pow(g.nodes[q][0], i) * std::pow(g.nodes[q][1], j);
        return s;
    };
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j) {
            const double ref = static_cast<double>(oracle::raw_moment(dists[0], i) *
                                                   oracle::raw_moment(dists[1], j));
            CHECK(mom(i, j) == doctest::Approx(ref).epsilon(1e-10).scale(std::abs(ref) + 1.0));
        }
}

TEST_CASE("Smolyak count advantage at d=4") {
    std::vector<Distribution> dists(4, Distribution::uniform());
    const RuleND sparse = smolyak_grid(dists, 2);
    CHECK(sparse.count() == 9);  // midpoint + 2 per axis
    CHECK(sparse.count() < 81);  // tensor with 3 points per axis
}

TEST_CASE("Smolyak validation") {
    CHECK_THROWS(smolyak_grid({Distribution::uniform(), Distribution::uniform()}, 0));
    CHECK_THROWS(smolyak_grid({Distribution::uniform()}, 2));
}

TEST_CASE("merge idempotence") {
    RuleND g = smolyak_grid({Distribution::uniform(), Distribution::uniform()}, 3);
    RuleND once = g;
    merge_nodes(once);
    RuleND twice = once;
    merge_nodes(twice);
    REQUIRE(once.count() == twice.count());
    for (int i = 0; i < once.count(); ++i) {
        CHECK(once.nodes[i] == twice.nodes[i]);
        CHECK(once.weights[i] == twice.weights[i]);
    }
}

TEST_CASE("integrate") {
    const RuleND grid = tensor_grid({gauss_rule(Distribution::gaussian(), 3),
                                     gauss_rule(Distribution::gaussian(), 3)});
    CHECK(integrate_scalar(grid, [](const std::vector<double>&) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(integrate_scalar(grid, [](const std::vector<double>& x) { return x[0] * x[0]; }) ==
          doctest::Approx(1.0).epsilon(1e-13));

    // vector integrand
    const auto v = integrate(grid, [](const std::vector<double>& x) {
        return std::vector<double>{1.0, x[0], x[1] * x[1]};
    });
    REQUIRE(v.size() == 3);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(0.0));
    CHECK(v[2] == doctest::Approx(1.0));

    // orthonormality cross-term vanishes: E[phi_1 phi_2] = 0
    const auto t = recurrence_coeffs(Distribution::gaussian(), 2);
    const double cross = integrate_scalar(grid, [&](const std::vector<double>& x) {
        return eval_univariate(t, 1, x[0]) * eval_univariate(t, 2, x[0]);
    });
    CHECK(std::abs(cross) < 1e-10);
}
