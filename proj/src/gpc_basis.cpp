#include "specsim/gpc_basis.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace specsim {

namespace {
constexpr int kMaxOrder = 8;  // Laguerre recurrences condition poorly past this

void enumerate_rec(int d, int p, int pos, int remaining, std::vector<int>& cur,
                   std::vector<MultiIndex>& out) {
    if (pos == d) {
        out.push_back({cur});
        return;
    }
    for (int a = 0; a <= remaining; ++a) {
        cur[pos] = a;
        enumerate_rec(d, p, pos + 1, remaining - a, cur, out);
    }
    cur[pos] = 0;
}
}  // namespace

int MultiIndex::total() const {
    return std::accumulate(alpha.begin(), alpha.end(), 0);
}

std::vector<MultiIndex> build_index_set(int d, int p, IndexScheme scheme) {
    if (d < 1) throw std::invalid_argument("build_index_set: d must be >= 1");
    if (p < 0) throw std::invalid_argument("build_index_set: p must be >= 0");

    std::vector<MultiIndex> set;
    std::vector<int> cur(d, 0);
    if (scheme == IndexScheme::TotalDegree) {
        enumerate_rec(d, p, 0, p, cur, set);
    } else {
        long total = index_set_size(d, p, scheme);
        set.reserve(total);
        for (long id = 0; id < total; ++id) {
            long rem = id;
            for (int j = d - 1; j >= 0; --j) {
                cur[j] = static_cast<int>(rem % (p + 1));
                rem /= (p + 1);
            }
            set.push_back({cur});
        }
    }
    std::sort(set.begin(), set.end(), [](const MultiIndex& a, const MultiIndex& b) {
        const int ta = a.total(), tb = b.total();
        if (ta != tb) return ta < tb;
        return a.alpha < b.alpha;
    });
    return set;
}

long index_set_size(int d, int p, IndexScheme scheme) {
    if (scheme == IndexScheme::TensorProduct) {
        long n = 1;
        for (int j = 0; j < d; ++j) n *= (p + 1);
        return n;
    }
    long n = 1;
    for (int j = 1; j <= d; ++j) n = n * (p + j) / j;
    return n;
}

GpcBasis::GpcBasis(std::vector<Distribution> dists, int order, IndexScheme scheme)
    : dists_(std::move(dists)), order_(order), scheme_(scheme) {
    if (dists_.empty()) throw std::invalid_argument("GpcBasis: needs at least one parameter");
    if (order_ < 0) throw std::invalid_argument("GpcBasis: order must be >= 0");
    if (order_ > kMaxOrder)
        throw std::invalid_argument("GpcBasis: order > 8 not supported");
    tables_.reserve(dists_.size());
    for (const auto& dist : dists_) tables_.push_back(recurrence_coeffs(dist, order_));
    indices_ = build_index_set(dim(), order_, scheme_);
}

void GpcBasis::check_point(const std::vector<double>& xi) const {
    if (static_cast<int>(xi.size()) != dim())
        throw std::invalid_argument("GpcBasis: point dimension mismatch");
    for (int j = 0; j < dim(); ++j)
        if (!dists_[j].in_support(xi[j]))
            throw std::domain_error("GpcBasis: point outside the support of parameter " +
                                    std::to_string(j + 1));
}

double GpcBasis::eval(int k, const std::vector<double>& xi) const {
    if (k < 1 || k > size()) throw std::out_of_range("GpcBasis: basis index out of range");
    check_point(xi);
    const MultiIndex& mi = indices_[k - 1];
    double v = 1.0;
    for (int j = 0; j < dim(); ++j)
        v *= eval_univariate(tables_[j], mi.alpha[j], xi[j]);
    return v;
}

std::vector<double> GpcBasis::eval_all(const std::vector<double>& xi) const {
    check_point(xi);
    // Evaluate each univariate family once up to its max degree, then take
    // products; avoids re-running the recurrence per basis function.
    std::vector<std::vector<double>> uni(dim());
    for (int j = 0; j < dim(); ++j) {
        uni[j].resize(order_ + 1);
        for (int deg = 0; deg <= order_; ++deg)
            uni[j][deg] = eval_univariate(tables_[j], deg, xi[j]);
    }
    std::vector<double> out(size());
    for (int k = 0; k < size(); ++k) {
        double v = 1.0;
        for (int j = 0; j < dim(); ++j) v *= uni[j][indices_[k].alpha[j]];
        out[k] = v;
    }
    return out;
}

std::vector<double> GpcBasis::nominal_point() const {
    std::vector<double> xi(dim());
    for (int j = 0; j < dim(); ++j) xi[j] = dists_[j].mean();
    return xi;
}

}  // namespace specsim
