#include "specsim/distribution.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace specsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack when testing support membership, so nodes that sit on a bound
// (CC endpoints, mapped Beta nodes) are never rejected by roundoff.
constexpr double kSupportSlack = 1e-12;
}  // namespace

Distribution Distribution::gamma(double g) {
    if (!(g > 0.0))
        throw std::invalid_argument("gamma distribution requires shape > 0");
    return {DistFamily::Gamma, g, 0.0};
}

Distribution Distribution::beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("beta distribution requires alpha, beta > 0");
    return {DistFamily::Beta, a, b};
}

double Distribution::support_lo() const {
    switch (family) {
        case DistFamily::Gaussian: return -kInf;
        case DistFamily::Gamma: return 0.0;
        case DistFamily::Beta: return 0.0;
        case DistFamily::Uniform: return -1.0;
    }
    return -kInf;
}

double Distribution::support_hi() const {
    switch (family) {
        case DistFamily::Gaussian: return kInf;
        case DistFamily::Gamma: return kInf;
        case DistFamily::Beta: return 1.0;
        case DistFamily::Uniform: return 1.0;
    }
    return kInf;
}

bool Distribution::in_support(double x) const {
    return x >= support_lo() - kSupportSlack && x <= support_hi() + kSupportSlack;
}

double Distribution::pdf(double x) const {
    if (!in_support(x)) return 0.0;
    switch (family) {
        case DistFamily::Gaussian:
            return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        case DistFamily::Gamma:
            if (x <= 0.0) return shape1 < 1.0 ? kInf : (shape1 == 1.0 ? 1.0 : 0.0);
            return std::exp((shape1 - 1.0) * std::log(x) - x - std::lgamma(shape1));
        case DistFamily::Beta: {
            if (x <= 0.0 || x >= 1.0) return 0.0;  // endpoint values unused by quadrature
            const double logb = std::lgamma(shape1) + std::lgamma(shape2) -
                                std::lgamma(shape1 + shape2);
            return std::exp((shape1 - 1.0) * std::log(x) +
                            (shape2 - 1.0) * std::log1p(-x) - logb);
        }
        case DistFamily::Uniform:
            return 0.5;
    }
    return 0.0;
}

double Distribution::mean() const {
    switch (family) {
        case DistFamily::Gaussian: return 0.0;
        case DistFamily::Gamma: return shape1;
        case DistFamily::Beta: return shape1 / (shape1 + shape2);
        case DistFamily::Uniform: return 0.0;
    }
    return 0.0;
}

std::string Distribution::name() const {
    switch (family) {
        case DistFamily::Gaussian: return "gaussian";
        case DistFamily::Gamma: return "gamma(" + std::to_string(shape1) + ")";
        case DistFamily::Beta:
            return "beta(" + std::to_string(shape1) + "," + std::to_string(shape2) + ")";
        case DistFamily::Uniform: return "uniform";
    }
    return "?";
}

bool operator==(const Distribution& a, const Distribution& b) {
    return a.family == b.family && a.shape1 == b.shape1 && a.shape2 == b.shape2;
}

RecurrenceTable recurrence_coeffs(const Distribution& dist, int degree_max) {
    if (degree_max < 0)
        throw std::invalid_argument("recurrence_coeffs: degree_max must be >= 0");
    // Tables beyond this are never needed (gPC order is capped at 8 and the
    // largest reference quadratures use ~64 points).
    if (degree_max > 256)
        throw std::invalid_argument("recurrence_coeffs: degree_max too large");

    RecurrenceTable t;
    t.dist = dist;
    t.degree_max = degree_max;
    const int m = degree_max + 1;
    t.alpha.assign(m, 0.0);
    t.beta.assign(m, 0.0);
    t.beta[0] = 1.0;

    switch (dist.family) {
        case DistFamily::Gaussian:
            for (int k = 1; k < m; ++k) t.beta[k] = static_cast<double>(k);
            break;
        case DistFamily::Uniform:
            for (int k = 1; k < m; ++k) {
                const double kk = k;
                t.beta[k] = kk * kk / (4.0 * kk * kk - 1.0);
            }
            break;
        case DistFamily::Gamma: {
            const double g = dist.shape1;
            if (!(g > 0.0)) throw std::invalid_argument("gamma shape must be > 0");
            for (int k = 0; k < m; ++k) t.alpha[k] = 2.0 * k + g;
            for (int k = 1; k < m; ++k) t.beta[k] = k * (k + g - 1.0);
            break;
        }
        case DistFamily::Beta: {
            // Jacobi weight (1-u)^A (1+u)^B on [-1,1] with A = beta-1,
            // B = alpha-1, then mapped affinely to the user variable on [0,1].
            const double A = dist.shape2 - 1.0;
            const double B = dist.shape1 - 1.0;
            if (!(dist.shape1 > 0.0) || !(dist.shape2 > 0.0))
                throw std::invalid_argument("beta shapes must be > 0");
            std::vector<double> a(m, 0.0), b(m, 0.0);
            a[0] = (B - A) / (A + B + 2.0);
            b[0] = 1.0;
            if (m > 1) {
                const double s = A + B;
                a[1] = (B * B - A * A) / ((2.0 + s) * (4.0 + s));
                b[1] = 4.0 * (A + 1.0) * (B + 1.0) / ((s + 2.0) * (s + 2.0) * (s + 3.0));
                for (int k = 2; k < m; ++k) {
                    const double n = k, nab = 2.0 * n + s;
                    a[k] = (B * B - A * A) / (nab * (nab + 2.0));
                    b[k] = 4.0 * n * (n + A) * (n + B) * (n + s) /
                           (nab * nab * (nab + 1.0) * (nab - 1.0));
                }
            }
            // Affine map u = 2*xi - 1: monic coefficients in xi.
            for (int k = 0; k < m; ++k) {
                t.alpha[k] = 0.5 * (a[k] + 1.0);
                t.beta[k] = k == 0 ? 1.0 : 0.25 * b[k];
            }
            break;
        }
    }

    t.norm.assign(m, 1.0);
    double prod = 1.0;
    for (int k = 0; k < m; ++k) {
        prod *= t.beta[k];
        if (!(prod > 0.0))
            throw std::runtime_error("recurrence_coeffs: non-positive norm (invalid measure)");
        t.norm[k] = std::sqrt(prod);
    }
    return t;
}

double eval_univariate(const RecurrenceTable& table, int degree, double point) {
    if (degree < 0 || degree > table.degree_max)
        throw std::out_of_range("eval_univariate: degree out of table range");
    double pm1 = 0.0, p = 1.0;
    for (int k = 0; k < degree; ++k) {
        const double pn = (point - table.alpha[k]) * p - table.beta[k] * pm1;
        pm1 = p;
        p = pn;
    }
    return p / table.norm[degree];
}

}  // namespace specsim
