#pragma once

#include <memory>
#include <vector>

#include "specsim/distribution.hpp"

namespace specsim {

/// Multi-index of univariate degrees, one entry per random parameter.
struct MultiIndex {
    std::vector<int> alpha;
    int total() const;
};

enum class IndexScheme { TotalDegree, TensorProduct };

/// Complete index set for d parameters up to order p, in graded
/// lexicographic order: ascending total degree, lexicographic (first
/// component most significant) within each degree. The all-zeros index is
/// always first, so basis function 1 is the constant 1.
std::vector<MultiIndex> build_index_set(int d, int p, IndexScheme scheme);

/// Closed-form size of the index set: (p+d)!/(p!d!) for total degree,
/// (p+1)^d for tensor product.
long index_set_size(int d, int p, IndexScheme scheme);

/// Multivariate orthonormal basis {H_k} for independent parameters:
/// H_k(xi) = prod_j phi^j_{alpha_j}(xi_j). Basis indices are 1-based to
/// match the coefficient blocks they multiply.
class GpcBasis {
public:
    GpcBasis(std::vector<Distribution> dists, int order,
             IndexScheme scheme = IndexScheme::TotalDegree);

    int dim() const { return static_cast<int>(dists_.size()); }
    int order() const { return order_; }
    int size() const { return static_cast<int>(indices_.size()); }  // K
    IndexScheme scheme() const { return scheme_; }

    const std::vector<Distribution>& distributions() const { return dists_; }
    const Distribution& distribution(int j) const { return dists_.at(j); }
    const std::vector<MultiIndex>& index_set() const { return indices_; }
    const RecurrenceTable& table(int j) const { return tables_.at(j); }

    /// H_k(xi), k in [1, K]. Throws if xi leaves a bounded support.
    double eval(int k, const std::vector<double>& xi) const;

    /// [H_1(xi); ...; H_K(xi)]; entry 0 is exactly 1.
    std::vector<double> eval_all(const std::vector<double>& xi) const;

    /// Mean of each parameter's measure; the "nominal" parameter point.
    std::vector<double> nominal_point() const;

private:
    void check_point(const std::vector<double>& xi) const;

    std::vector<Distribution> dists_;
    std::vector<RecurrenceTable> tables_;
    std::vector<MultiIndex> indices_;
    int order_;
    IndexScheme scheme_;
};

using GpcBasisPtr = std::shared_ptr<const GpcBasis>;

}  // namespace specsim
