#pragma once

#include <functional>
#include <vector>

#include "specsim/distribution.hpp"

namespace specsim {

/// One-dimensional quadrature rule for a single parameter's measure.
/// Weights absorb the density, so they sum to 1.
struct Rule1D {
    enum class Kind { Gauss, ClenshawCurtis };
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;
    Kind kind = Kind::Gauss;
    int exact_degree = 0;
};

/// d-dimensional rule; Smolyak weights may be negative.
struct RuleND {
    std::vector<std::vector<double>> nodes;  // each of length d
    std::vector<double> weights;
    enum class Kind { Tensor, Smolyak } kind = Kind::Tensor;

    int dim() const { return nodes.empty() ? 0 : static_cast<int>(nodes.front().size()); }
    int count() const { return static_cast<int>(nodes.size()); }
};

/// Gauss rule by the Golub-Welsch eigenvalue method on the Jacobi matrix of
/// the measure's recurrence coefficients. Nodes ascending, weights sum to 1.
Rule1D gauss_rule(const Distribution& dist, int n_points);

/// Nested Clenshaw-Curtis rule on [-1,1] under the uniform density 1/2.
/// n = 2^level + 1 points for level >= 1, a single midpoint at level 0.
Rule1D clenshaw_curtis_rule(int level);

/// Validating variant: Clenshaw-Curtis applies only to Uniform parameters.
Rule1D clenshaw_curtis_rule(const Distribution& dist, int level);

/// Full tensor product of per-dimension rules.
RuleND tensor_grid(const std::vector<Rule1D>& rules);

/// Smolyak sparse grid at the given level (level L combines 1-D rules of
/// index 1..L; Clenshaw-Curtis sizes 1,3,5,9,... for Uniform parameters,
/// Gauss sizes 1,2,3,... otherwise). Duplicate nodes are merged.
RuleND smolyak_grid(const std::vector<Distribution>& dists, int level);

/// Merge nodes closer than 1e-12 per coordinate, summing their weights.
void merge_nodes(RuleND& rule);

/// Sum_j w_j f(xi_j) for a vector-valued integrand.
std::vector<double> integrate(
    const RuleND& rule,
    const std::function<std::vector<double>(const std::vector<double>&)>& f);

double integrate_scalar(const RuleND& rule,
                        const std::function<double(const std::vector<double>&)>& f);

}  // namespace specsim
