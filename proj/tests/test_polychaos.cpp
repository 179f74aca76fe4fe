#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "specsim/gpc_basis.hpp"
#include "specsim/quadrature.hpp"

using namespace specsim;

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);
const double kSqrt5 = std::sqrt(5.0);
const double kSqrt6 = std::sqrt(6.0);

// Composite Simpson over [a,b]; independent of the quadrature module.
template <typename F>
double simpson(F f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}
}  // namespace

TEST_CASE("pdf integrates to one") {
    CHECK(simpson([](double x) { return Distribution::gaussian().pdf(x); }, -12, 12, 24000) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(simpson([](double x) { return Distribution::gamma(2.5).pdf(x); }, 0, 80, 160000) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(simpson([](double x) { return Distribution::beta(2, 3).pdf(x); }, 0, 1, 20000) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(simpson([](double x) { return Distribution::uniform().pdf(x); }, -1, 1, 2000) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distribution validation") {
    CHECK_THROWS(Distribution::gamma(0.0));
    CHECK_THROWS(Distribution::gamma(-1.0));
    CHECK_THROWS(Distribution::beta(1.0, 0.0));
    CHECK_THROWS(Distribution::beta(-2.0, 1.0));
}

TEST_CASE("hermite table matches Gram-Schmidt oracle") {
    const auto t = recurrence_coeffs(Distribution::gaussian(), 3);
    // phi_0 = 1, phi_1 = x, phi_2 = (x^2-1)/sqrt2, phi_3 = (x^3-3x)/sqrt6
    for (double x : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
        CHECK(eval_univariate(t, 0, x) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(eval_univariate(t, 1, x) == doctest::Approx(x).epsilon(1e-14));
        CHECK(eval_univariate(t, 2, x) ==
              doctest::Approx((x * x - 1.0) / kSqrt2).epsilon(1e-13));
        CHECK(eval_univariate(t, 3, x) ==
              doctest::Approx((x * x * x - 3.0 * x) / kSqrt6).epsilon(1e-13));
    }
    const auto gs = oracle::gram_schmidt(Distribution::gaussian(), 3);
    for (int deg = 0; deg <= 3; ++deg)
        for (double x : {-1.5, 0.2, 2.5})
            CHECK(eval_univariate(t, deg, x) ==
                  doctest::Approx(gs[deg].eval(x))
                      .epsilon(1e-12));
}

TEST_CASE("legendre table matches oracle") {
    const auto t = recurrence_coeffs(Distribution::uniform(), 2);
    for (double x : {-1.0, -0.25, 0.0, 0.5, 1.0}) {
        CHECK(eval_univariate(t, 1, x) == doctest::Approx(kSqrt3 * x).epsilon(1e-14));
        CHECK(eval_univariate(t, 2, x) ==
              doctest::Approx(kSqrt5 * (3.0 * x * x - 1.0) / 2.0).epsilon(1e-13));
    }
    CHECK(eval_univariate(t, 2, 1.0) == doctest::Approx(kSqrt5).epsilon(1e-14));
}

TEST_CASE("degree zero table") {
    const auto t = recurrence_coeffs(Distribution::gaussian(), 0);
    CHECK(t.degree_max == 0);
    CHECK(eval_univariate(t, 0, 1.234) == 1.0);
    CHECK_THROWS(eval_univariate(t, 1, 0.0));
}

TEST_CASE("eval_univariate spot values") {
    const auto hermite = recurrence_coeffs(Distribution::gaussian(), 4);
    CHECK(eval_univariate(hermite, 1, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS(eval_univariate(hermite, 5, 0.0));
    CHECK_THROWS(eval_univariate(hermite, -1, 0.0));
}

TEST_CASE("recurrence agrees with monomial expansion up to degree 5") {
    std::vector<Distribution> dists = {Distribution::gaussian(), Distribution::uniform(),
                                       Distribution::gamma(2.5), Distribution::beta(2, 3),
                                       Distribution::beta(0.5, 0.5)};
    for (const auto& dist : dists) {
        const auto t = recurrence_coeffs(dist, 5);
        const auto gs = oracle::gram_schmidt(dist, 5);
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> u(0.05, 0.95);
        for (int trial = 0; trial < 50; ++trial) {
            double x = u(rng);
            if (dist.family == DistFamily::Gaussian || dist.family == DistFamily::Uniform)
                x = 2.0 * x - 1.0;
            else if (dist.family == DistFamily::Gamma)
                x *= 6.0;
            for (int deg = 0; deg <= 5; ++deg) {
                const double ref = gs[deg].eval(x);
                CHECK(eval_univariate(t, deg, x) ==
                      doctest::Approx(ref).epsilon(1e-12).scale(std::abs(ref) + 1.0));
            }
        }
    }
}

TEST_CASE("recurrence table degree cap") {
    CHECK_NOTHROW(recurrence_coeffs(Distribution::gaussian(), 64));
    CHECK_THROWS(recurrence_coeffs(Distribution::gaussian(), 300));
}

TEST_CASE("index set counts and order") {
    auto set = build_index_set(3, 3, IndexScheme::TotalDegree);
    CHECK(set.size() == 20);
    CHECK(index_set_size(3, 3, IndexScheme::TotalDegree) == 20);

    set = build_index_set(2, 1, IndexScheme::TotalDegree);
    REQUIRE(set.size() == 3);
    CHECK(set[0].alpha == std::vector<int>{0, 0});
    CHECK(set[1].alpha == std::vector<int>{0, 1});
    CHECK(set[2].alpha == std::vector<int>{1, 0});

    set = build_index_set(2, 1, IndexScheme::TensorProduct);
    CHECK(set.size() == 4);

    CHECK_THROWS(build_index_set(0, 2, IndexScheme::TotalDegree));
    CHECK_THROWS(build_index_set(2, -1, IndexScheme::TotalDegree));
}

TEST_CASE("count law over d and p") {
    for (int d = 1; d <= 6; ++d)
        for (int p = 0; p <= 5; ++p) {
            const auto set = build_index_set(d, p, IndexScheme::TotalDegree);
            // duplicate-free
            for (size_t i = 1; i < set.size(); ++i) CHECK(set[i - 1].alpha != set[i].alpha);
            CHECK(static_cast<long>(set.size()) ==
                  index_set_size(d, p, IndexScheme::TotalDegree));
        }
}

TEST_CASE("multivariate basis evaluation") {
    GpcBasis basis({Distribution::gaussian(), Distribution::uniform()}, 2);
    CHECK(basis.size() == 6);
    CHECK(basis.eval(1, {0.3, -0.5}) == 1.0);

    // alpha = (1,1) entry: product of univariate values
    int k11 = -1;
    for (int k = 0; k < basis.size(); ++k)
        if (basis.index_set()[k].alpha == std::vector<int>{1, 1}) k11 = k + 1;
    REQUIRE(k11 > 0);
    CHECK(basis.eval(k11, {1.0, 0.5}) == doctest::Approx(kSqrt3 / 2.0).epsilon(1e-14));

    GpcBasis g1({Distribution::gaussian()}, 2);
    CHECK(g1.eval(3, {0.0}) == doctest::Approx(-1.0 / kSqrt2).epsilon(1e-14));

    CHECK_THROWS(basis.eval(0, {0.0, 0.0}));
    CHECK_THROWS(basis.eval(7, {0.0, 0.0}));
    CHECK_THROWS(basis.eval(1, {0.0, 1.5}));  // outside the uniform support
}

TEST_CASE("basis vector") {
    GpcBasis g({Distribution::gaussian()}, 2);
    auto h = g.eval_all({0.0});
    REQUIRE(h.size() == 3);
    CHECK(h[0] == 1.0);
    CHECK(h[1] == doctest::Approx(0.0));
    CHECK(h[2] == doctest::Approx(-1.0 / kSqrt2).epsilon(1e-14));

    GpcBasis p0({Distribution::uniform(), Distribution::gamma(2.0)}, 0);
    auto h0 = p0.eval_all({0.3, 1.0});
    REQUIRE(h0.size() == 1);
    CHECK(h0[0] == 1.0);

    GpcBasis u1({Distribution::uniform()}, 1);
    auto hu = u1.eval_all({1.0});
    REQUIRE(hu.size() == 2);
    CHECK(hu[0] == 1.0);
    CHECK(hu[1] == doctest::Approx(kSqrt3).epsilon(1e-14));
}

TEST_CASE("basis order cap") {
    CHECK_THROWS(GpcBasis({Distribution::gaussian()}, 9));
    CHECK_NOTHROW(GpcBasis({Distribution::gaussian()}, 8));
}

TEST_CASE("multivariate orthonormality under tensor Gauss quadrature") {
    // families mixed two at a time; |alpha|,|beta| <= 4 needs exactness >= 9
    const std::vector<Distribution> pool = {Distribution::gaussian(), Distribution::uniform(),
                                            Distribution::gamma(2.5), Distribution::beta(2, 3)};
    for (const auto& d1 : pool)
        for (const auto& d2 : pool) {
            GpcBasis basis({d1, d2}, 4);
            const RuleND grid = tensor_grid({gauss_rule(d1, 5), gauss_rule(d2, 5)});
            const int K = basis.size();
            double max_dev = 0.0;
            std::vector<std::vector<double>> h_at(grid.count());
            for (int q = 0; q < grid.count(); ++q) h_at[q] = basis.eval_all(grid.nodes[q]);
            for (int a = 0; a < K; ++a)
                for (int b = a; b < K; ++b) {
                    double s = 0.0;
                    for (int q = 0; q < grid.count(); ++q)
                        s += grid.weights[q] * h_at[q][a] * h_at[q][b];
                    max_dev = std::max(max_dev, std::abs(s - (a == b ? 1.0 : 0.0)));
                }
            CHECK(max_dev < 1e-10);
        }
}

TEST_CASE("mean and variance shortcut equals direct quadrature") {
    GpcBasis basis({Distribution::uniform(), Distribution::gaussian()}, 3);
    const int K = basis.size();
    std::mt19937 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> c(K);
    for (auto& v : c) v = g(rng);

    const double mean_coeff = c[0];
    double var_coeff = 0.0;
    for (int k = 1; k < K; ++k) var_coeff += c[k] * c[k];

    const RuleND grid = tensor_grid(
        {gauss_rule(Distribution::uniform(), 8), gauss_rule(Distribution::gaussian(), 8)});
    double m1 = 0.0, m2 = 0.0;
    for (int q = 0; q < grid.count(); ++q) {
        const auto h = basis.eval_all(grid.nodes[q]);
        double y = 0.0;
        for (int k = 0; k < K; ++k) y += c[k] * h[k];
        m1 += grid.weights[q] * y;
        m2 += grid.weights[q] * y * y;
    }
    CHECK(mean_coeff == doctest::Approx(m1).epsilon(1e-10));
    CHECK(var_coeff == doctest::Approx(m2 - m1 * m1).epsilon(1e-10));
}
