#pragma once

// Test-side reference constructions, kept independent of the library code
// they are used to check. Orthogonal polynomials are built by Gram-Schmidt
// in exact rational arithmetic against closed-form moments of each measure
// (all shape parameters used in the tests are exactly representable), so the
// oracle carries no numerical error of its own beyond the final conversion
// to double.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "specsim/distribution.hpp"

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

// Raw moment E[xi^m] of the normalized measure, exact.
inline Rational raw_moment_exact(const specsim::Distribution& dist, int m) {
    using specsim::DistFamily;
    switch (dist.family) {
        case DistFamily::Gaussian: {
            if (m % 2 == 1) return 0;
            Rational v = 1;
            for (int k = m - 1; k >= 2; k -= 2) v *= k;
            return v;
        }
        case DistFamily::Uniform:
            return (m % 2 == 1) ? Rational(0) : Rational(1, m + 1);
        case DistFamily::Gamma: {
            Rational v = 1;
            const Rational g(dist.shape1);  // exact for representable doubles
            for (int i = 0; i < m; ++i) v *= g + i;
            return v;
        }
        case DistFamily::Beta: {
            Rational v = 1;
            const Rational a(dist.shape1), b(dist.shape2);
            for (int i = 0; i < m; ++i) v *= (a + i) / (a + b + i);
            return v;
        }
    }
    throw std::logic_error("raw_moment: unknown family");
}

inline long double raw_moment(const specsim::Distribution& dist, int m) {
    return raw_moment_exact(dist, m).convert_to<long double>();
}

using PolyQ = std::vector<Rational>;  // monomial coefficients, low degree first

inline Rational inner_exact(const specsim::Distribution& dist, const PolyQ& a, const PolyQ& b) {
    Rational s = 0;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            if (a[i] != 0 && b[j] != 0)
                s += a[i] * b[j] * raw_moment_exact(dist, static_cast<int>(i + j));
    return s;
}

struct OrthoPoly {
    std::vector<double> coeff;  // monomial coefficients of the orthonormal polynomial
    double eval(double x) const {
        double v = 0.0;
        for (size_t k = coeff.size(); k-- > 0;) v = v * x + coeff[k];
        return v;
    }
};

// Orthonormal polynomials up to degree_max: exact monic Gram-Schmidt, then a
// single floating normalization by the exact squared norm.
inline std::vector<OrthoPoly> gram_schmidt(const specsim::Distribution& dist, int degree_max) {
    std::vector<PolyQ> monic;
    std::vector<Rational> norm2;
    for (int k = 0; k <= degree_max; ++k) {
        PolyQ v(k + 1, Rational(0));
        v[k] = 1;
        for (size_t j = 0; j < monic.size(); ++j) {
            const Rational c = inner_exact(dist, v, monic[j]) / norm2[j];
            for (size_t i = 0; i < monic[j].size(); ++i) v[i] -= c * monic[j][i];
        }
        monic.push_back(v);
        norm2.push_back(inner_exact(dist, v, v));
    }
    std::vector<OrthoPoly> out(degree_max + 1);
    for (int k = 0; k <= degree_max; ++k) {
        const double n = std::sqrt(norm2[k].convert_to<double>());
        out[k].coeff.resize(k + 1);
        for (int i = 0; i <= k; ++i)
            out[k].coeff[i] = monic[k][i].convert_to<double>() / n;
    }
    return out;
}

}  // namespace oracle
