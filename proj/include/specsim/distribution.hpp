#pragma once

#include <string>
#include <vector>

namespace specsim {

/// Supported univariate parameter families. Each comes with a fixed support
/// and a probability density normalized to unit mass, so quadrature weights
/// and polynomial norms never carry a separate measure constant.
enum class DistFamily { Gaussian, Gamma, Beta, Uniform };

struct Distribution {
    DistFamily family = DistFamily::Gaussian;
    double shape1 = 0.0;  // Gamma: gamma; Beta: alpha
    double shape2 = 0.0;  // Beta: beta

    static Distribution gaussian() { return {DistFamily::Gaussian, 0.0, 0.0}; }
    static Distribution gamma(double g);
    static Distribution beta(double a, double b);
    static Distribution uniform() { return {DistFamily::Uniform, 0.0, 0.0}; }

    /// Support bounds; +-inf for unbounded ends.
    double support_lo() const;
    double support_hi() const;
    bool in_support(double x) const;

    /// Density of the normalized measure at x (0 outside the support).
    double pdf(double x) const;

    /// Mean of the measure, used as the "nominal" parameter point.
    double mean() const;

    std::string name() const;
};

bool operator==(const Distribution& a, const Distribution& b);

/// Three-term recurrence of the monic polynomials orthogonal under a
/// Distribution's measure, plus the norms needed to orthonormalize:
///   pi_{k+1}(x) = (x - alpha[k]) pi_k(x) - beta[k] pi_{k-1}(x)
/// with beta[0] = 1 (unit-mass measure) and ||pi_k||^2 = beta[0]...beta[k].
/// For Beta parameters the recurrence is expressed directly in the
/// user-facing variable on [0,1].
struct RecurrenceTable {
    Distribution dist;
    int degree_max = 0;
    std::vector<double> alpha;  // size degree_max+1
    std::vector<double> beta;   // size degree_max+1, beta[0] = 1
    std::vector<double> norm;   // ||pi_k||, size degree_max+1
};

/// Closed-form recurrence coefficients (Hermite, Laguerre, Jacobi, Legendre)
/// for the monic orthogonal polynomials of the given family.
RecurrenceTable recurrence_coeffs(const Distribution& dist, int degree_max);

/// Orthonormal polynomial value phi_degree(point), evaluated by the
/// recurrence itself (no monomial expansion).
double eval_univariate(const RecurrenceTable& table, int degree, double point);

}  // namespace specsim
