#include "specsim/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace specsim {

namespace {
constexpr double kMergeTol = 1e-12;

// Fuzzy lexicographic ordering used to merge coincident nodes.
struct NodeLess {
    bool operator()(const std::vector<double>& a, const std::vector<double>& b) const {
        for (size_t j = 0; j < a.size(); ++j) {
            if (a[j] < b[j] - kMergeTol) return true;
            if (a[j] > b[j] + kMergeTol) return false;
        }
        return false;
    }
};

int cc_size(int level_index) {  // 1-based rule index within a Smolyak build
    return level_index == 1 ? 1 : (1 << (level_index - 1)) + 1;
}

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

// Accumulate the tensor product of 1-D rules, scaled by coeff, into acc.
void accumulate_tensor(const std::vector<Rule1D>& rules, double coeff,
                       std::map<std::vector<double>, double, NodeLess>& acc) {
    const int d = static_cast<int>(rules.size());
    std::vector<int> idx(d, 0);
    std::vector<double> node(d);
    while (true) {
        double w = coeff;
        for (int j = 0; j < d; ++j) {
            node[j] = rules[j].nodes[idx[j]];
            w *= rules[j].weights[idx[j]];
        }
        acc[node] += w;
        int j = d - 1;
        while (j >= 0 && ++idx[j] == static_cast<int>(rules[j].nodes.size())) idx[j--] = 0;
        if (j < 0) break;
    }
}

RuleND from_map(const std::map<std::vector<double>, double, NodeLess>& acc,
                RuleND::Kind kind) {
    RuleND out;
    out.kind = kind;
    out.nodes.reserve(acc.size());
    out.weights.reserve(acc.size());
    for (const auto& [node, w] : acc) {
        out.nodes.push_back(node);
        out.weights.push_back(w);
    }
    return out;
}
}  // namespace

Rule1D gauss_rule(const Distribution& dist, int n_points) {
    if (n_points < 1) throw std::invalid_argument("gauss_rule: n_points must be >= 1");
    const RecurrenceTable t = recurrence_coeffs(dist, n_points);

    Eigen::VectorXd diag(n_points), sub(std::max(n_points - 1, 0));
    for (int k = 0; k < n_points; ++k) diag[k] = t.alpha[k];
    for (int k = 1; k < n_points; ++k) sub[k - 1] = std::sqrt(t.beta[k]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_rule: tridiagonal eigensolve failed");

    Rule1D rule;
    rule.kind = Rule1D::Kind::Gauss;
    rule.exact_degree = 2 * n_points - 1;
    rule.nodes.resize(n_points);
    rule.weights.resize(n_points);
    double wsum = 0.0;
    for (int k = 0; k < n_points; ++k) {
        rule.nodes[k] = es.eigenvalues()[k];  // ascending
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = v0 * v0;  // beta[0] = 1
        wsum += rule.weights[k];
    }
    for (double& w : rule.weights) w /= wsum;

    // Symmetric measures get bit-symmetric rules so odd moments cancel
    // exactly; the eigensolve alone leaves last-bit asymmetries that degree
    // ~15 monomials would amplify.
    const bool symmetric = dist.family == DistFamily::Gaussian ||
                           dist.family == DistFamily::Uniform ||
                           (dist.family == DistFamily::Beta && dist.shape1 == dist.shape2);
    if (symmetric) {
        const double center = dist.family == DistFamily::Beta ? 0.5 : 0.0;
        for (int i = 0, j = n_points - 1; i < j; ++i, --j) {
            const double off = 0.5 * ((rule.nodes[j] - center) - (rule.nodes[i] - center));
            rule.nodes[i] = center - off;
            rule.nodes[j] = center + off;
            const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
            rule.weights[i] = rule.weights[j] = w;
        }
        if (n_points % 2 == 1) rule.nodes[n_points / 2] = center;
    }
    return rule;
}

Rule1D clenshaw_curtis_rule(int level) {
    if (level < 0) throw std::invalid_argument("clenshaw_curtis_rule: level must be >= 0");
    Rule1D rule;
    rule.kind = Rule1D::Kind::ClenshawCurtis;
    if (level == 0) {
        rule.nodes = {0.0};
        rule.weights = {1.0};
        rule.exact_degree = 0;
        return rule;
    }
    const int n = (1 << level) + 1;
    const int N = n - 1;
    rule.exact_degree = n - 1;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int j = 0; j <= N; ++j) {
        // Nodes descending in j; build ascending and symmetric so that
        // coarser levels nest bit-exactly.
        const double x = std::cos(M_PI * static_cast<double>(j) / N);
        rule.nodes[N - j] = x;
    }
    for (int j = 0; j <= N / 2; ++j) {
        const double v = 0.5 * (rule.nodes[N - j] - rule.nodes[j]);
        rule.nodes[N - j] = v;
        rule.nodes[j] = -v;
    }
    for (int j = 0; j <= N; ++j) {
        const double cj = (j == 0 || j == N) ? 1.0 : 2.0;
        double s = 0.0;
        for (int m = 1; m <= N / 2; ++m) {
            const double term = std::cos(2.0 * M_PI * m * j / N) / (4.0 * m * m - 1.0);
            s += (2 * m == N) ? 0.5 * term : term;
        }
        // weight for the uniform density 1/2 (half of the classic dx weight)
        rule.weights[N - j] = 0.5 * (cj / N) * (1.0 - 2.0 * s);
    }
    return rule;
}

Rule1D clenshaw_curtis_rule(const Distribution& dist, int level) {
    if (dist.family != DistFamily::Uniform)
        throw std::invalid_argument(
            "clenshaw_curtis_rule: only defined for uniform parameters (" + dist.name() + ")");
    return clenshaw_curtis_rule(level);
}

RuleND tensor_grid(const std::vector<Rule1D>& rules) {
    if (rules.empty()) throw std::invalid_argument("tensor_grid: no rules given");
    std::map<std::vector<double>, double, NodeLess> acc;
    accumulate_tensor(rules, 1.0, acc);
    return from_map(acc, RuleND::Kind::Tensor);
}

RuleND smolyak_grid(const std::vector<Distribution>& dists, int level) {
    const int d = static_cast<int>(dists.size());
    if (level < 1) throw std::invalid_argument("smolyak_grid: level must be >= 1");
    if (d < 2) throw std::invalid_argument("smolyak_grid: needs d >= 2");

    // 1-D rules per dimension and index 1..level.
    std::vector<std::vector<Rule1D>> rules(d);
    for (int j = 0; j < d; ++j)
        for (int i = 1; i <= level; ++i)
            rules[j].push_back(dists[j].family == DistFamily::Uniform
                                   ? clenshaw_curtis_rule(i - 1)  // sizes 1,3,5,9,...
                                   : gauss_rule(dists[j], i));

    // Combination formula: sum over q-d+1 <= |i| <= q, q = level+d-1, of
    // (-1)^(q-|i|) C(d-1, q-|i|) times the tensor rule at index vector i.
    const int q = level + d - 1;
    std::map<std::vector<double>, double, NodeLess> acc;
    std::vector<int> iv(d, 1);
    while (true) {
        int norm = 0;
        for (int j = 0; j < d; ++j) norm += iv[j];
        if (norm >= q - d + 1 && norm <= q) {
            const int r = q - norm;
            const double coeff = (r % 2 == 0 ? 1.0 : -1.0) * binomial(d - 1, r);
            std::vector<Rule1D> sel(d);
            for (int j = 0; j < d; ++j) sel[j] = rules[j][iv[j] - 1];
            accumulate_tensor(sel, coeff, acc);
        }
        int j = d - 1;
        while (j >= 0 && ++iv[j] > level) iv[j--] = 1;
        if (j < 0) break;
    }

    RuleND out = from_map(acc, RuleND::Kind::Smolyak);
    // Drop points whose combined weight cancelled to (numerical) zero.
    RuleND cleaned;
    cleaned.kind = out.kind;
    for (int i = 0; i < out.count(); ++i) {
        if (std::abs(out.weights[i]) > 1e-14) {
            cleaned.nodes.push_back(out.nodes[i]);
            cleaned.weights.push_back(out.weights[i]);
        }
    }
    return cleaned;
}

void merge_nodes(RuleND& rule) {
    std::map<std::vector<double>, double, NodeLess> acc;
    for (int i = 0; i < rule.count(); ++i) acc[rule.nodes[i]] += rule.weights[i];
    RuleND merged = from_map(acc, rule.kind);
    rule = std::move(merged);
}

std::vector<double> integrate(
    const RuleND& rule,
    const std::function<std::vector<double>(const std::vector<double>&)>& f) {
    std::vector<double> sum;
    for (int i = 0; i < rule.count(); ++i) {
        const std::vector<double> v = f(rule.nodes[i]);
        if (sum.empty()) sum.assign(v.size(), 0.0);
        if (v.size() != sum.size())
            throw std::runtime_error("integrate: integrand dimension changed between nodes");
        for (size_t k = 0; k < v.size(); ++k) sum[k] += rule.weights[i] * v[k];
    }
    return sum;
}

double integrate_scalar(const RuleND& rule,
                        const std::function<double(const std::vector<double>&)>& f) {
    double sum = 0.0;
    for (int i = 0; i < rule.count(); ++i) sum += rule.weights[i] * f(rule.nodes[i]);
    return sum;
}

}  // namespace specsim
