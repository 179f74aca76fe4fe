#include "specsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "parallel_for.hpp"
#include "specsim/sampling.hpp"

namespace specsim {

namespace {
Eigen::Map<const Eigen::MatrixXd> as_blocks(const Eigen::VectorXd& x, int n, int K) {
    return {x.data(), n, K};
}
Eigen::Map<Eigen::MatrixXd> as_blocks(Eigen::VectorXd& x, int n, int K) {
    return {x.data(), n, K};
}
}  // namespace

TestingSet select_testing_points(const RuleND& candidates, const GpcBasis& basis,
                                 double beta) {
    const int K = basis.size();
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("select_testing_points: beta must be in (0,1)");
    if (candidates.count() < K)
        throw std::invalid_argument("select_testing_points: candidate rule has fewer nodes (" +
                                    std::to_string(candidates.count()) + ") than basis size " +
                                    std::to_string(K));

    // order candidates by descending |weight|; stable so construction order
    // breaks ties deterministically
    std::vector<int> order(candidates.count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(candidates.weights[a]) > std::abs(candidates.weights[b]);
    });

    TestingSet ts;
    ts.beta = beta;
    ts.candidates = candidates.count();
    Eigen::MatrixXd Q(K, K);  // orthonormalized rows of accepted basis vectors
    int m = 0;
    for (int idx : order) {
        const auto h_std = basis.eval_all(candidates.nodes[idx]);
        Eigen::Map<const Eigen::VectorXd> h(h_std.data(), K);
        Eigen::VectorXd v = h;
        if (m > 0) v -= Q.topRows(m).transpose() * (Q.topRows(m) * h);
        if (m == 0 || v.norm() / h.norm() > beta) {
            Q.row(m) = v.normalized();
            ts.points.push_back(candidates.nodes[idx]);
            ++m;
            if (m == K) break;
        }
    }
    if (m < K)
        throw std::runtime_error(
            "select_testing_points: only " + std::to_string(m) + " of " + std::to_string(K) +
            " points accepted; lower beta or use a richer candidate rule");

    ts.V.resize(K, K);
    for (int i = 0; i < K; ++i) {
        const auto h = basis.eval_all(ts.points[i]);
        for (int j = 0; j < K; ++j) ts.V(i, j) = h[j];
    }
    ts.V_inv = ts.V.partialPivLu().inverse();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(ts.V);
    ts.cond = svd.singularValues()(0) / svd.singularValues()(K - 1);
    return ts;
}

RuleND default_candidate_rule(const GpcBasis& basis) {
    const int d = basis.dim();
    const int p = basis.order();
    if (d <= 3) {
        std::vector<Rule1D> rules;
        rules.reserve(d);
        for (int j = 0; j < d; ++j) rules.push_back(gauss_rule(basis.distribution(j), p + 1));
        return tensor_grid(rules);
    }
    return smolyak_grid(basis.distributions(), p + 1);
}

Eigen::VectorXd surrogate_eval(const GpcState& state, const std::vector<double>& xi) {
    const auto h = state.basis->eval_all(xi);
    const auto X = as_blocks(state.coeffs, state.n, state.basis->size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(state.n);
    for (int k = 0; k < state.basis->size(); ++k) out += h[k] * X.col(k);
    return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> moments(const GpcState& state) {
    const int K = state.basis->size();
    const auto X = as_blocks(state.coeffs, state.n, K);
    Eigen::VectorXd mean = X.col(0);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(state.n);
    for (int k = 1; k < K; ++k) var += X.col(k).cwiseProduct(X.col(k));
    return {mean, var};
}

double sampling_speedup_ratio(const RuleND& quad, const GpcBasis& basis) {
    return sampling_speedup_ratio(quad.count(), basis);
}
double sampling_speedup_ratio(int candidate_count, const GpcBasis& basis) {
    return static_cast<double>(candidate_count) / basis.size();
}

// --- StSystem ----------------------------------------------------------------

StSystem::StSystem(const Circuit& circuit, GpcBasisPtr basis, TestingSet tset, Mode mode)
    : circuit_(circuit),
      basis_(std::move(basis)),
      tset_(std::move(tset)),
      mode_(mode),
      K_(basis_->size()),
      n_(circuit.size()) {
    if (static_cast<int>(tset_.points.size()) != K_)
        throw std::invalid_argument("StSystem: testing set size does not match basis");
    bound_.reserve(K_);
    for (const auto& pt : tset_.points) bound_.push_back(circuit_.bind_parameters(pt));
    evals_.resize(K_);
    block_lu_.resize(K_);
    for (const auto& dev : circuit_.devices())
        if (dev.kind == DeviceKind::Diode) has_diode_ = true;
}

Eigen::VectorXd StSystem::to_realizations(const Eigen::VectorXd& x) const {
    Eigen::VectorXd z(K_ * n_);
    as_blocks(z, n_, K_) = as_blocks(x, n_, K_) * tset_.V.transpose();
    return z;
}

Eigen::VectorXd StSystem::from_realizations(const Eigen::VectorXd& z) const {
    Eigen::VectorXd x(K_ * n_);
    as_blocks(x, n_, K_) = as_blocks(z, n_, K_) * tset_.V_inv.transpose();
    return x;
}

void StSystem::eval_blocks(const Eigen::VectorXd& x, double t) const {
    const Eigen::VectorXd z = to_realizations(x);
    for (int k = 0; k < K_; ++k)
        circuit_.eval_qf_bound(bound_[k], z.segment(k * n_, n_), tset_.points[k], t,
                               evals_[k]);
}

void StSystem::eval(const Eigen::VectorXd& x, double t, Eigen::VectorXd& q,
                    Eigen::VectorXd& f, Eigen::VectorXd& b) const {
    eval_blocks(x, t);
    q.resize(K_ * n_);
    f.resize(K_ * n_);
    b.resize(K_ * n_);
    for (int k = 0; k < K_; ++k) {
        q.segment(k * n_, n_) = evals_[k].q;
        f.segment(k * n_, n_) = evals_[k].f;
        b.segment(k * n_, n_) = evals_[k].b;
    }
}

void StSystem::factor(const Eigen::VectorXd& x, double t, double cq, double cf) {
    eval_blocks(x, t);
    rcond_ = 1.0;
    if (mode_ == Mode::Decoupled) {
        for (int k = 0; k < K_; ++k) {
            block_lu_[k].compute(cq * evals_[k].dq + cf * evals_[k].df);
            rcond_ = std::min(rcond_, lu_pivot_ratio(block_lu_[k]));
        }
    } else {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(K_ * n_, K_ * n_);
        for (int k = 0; k < K_; ++k) {
            const Eigen::MatrixXd Jk = cq * evals_[k].dq + cf * evals_[k].df;
            for (int j = 0; j < K_; ++j)
                J.block(k * n_, j * n_, n_, n_) = tset_.V(k, j) * Jk;
        }
        coupled_lu_.compute(J);
        rcond_ = lu_pivot_ratio(coupled_lu_);
    }
}

Eigen::VectorXd StSystem::solve(const Eigen::VectorXd& rhs) const {
    if (mode_ == Mode::Coupled) return coupled_lu_.solve(rhs);
    Eigen::VectorXd y(K_ * n_);
    for (int k = 0; k < K_; ++k)
        y.segment(k * n_, n_) = block_lu_[k].solve(rhs.segment(k * n_, n_));
    return from_realizations(y);
}

double StSystem::rcond() const { return rcond_; }

void StSystem::jacobians(const Eigen::VectorXd& x, double t, Eigen::MatrixXd& dq,
                         Eigen::MatrixXd& df) const {
    eval_blocks(x, t);
    dq = Eigen::MatrixXd::Zero(K_ * n_, K_ * n_);
    df = Eigen::MatrixXd::Zero(K_ * n_, K_ * n_);
    for (int k = 0; k < K_; ++k)
        for (int j = 0; j < K_; ++j) {
            dq.block(k * n_, j * n_, n_, n_) = tset_.V(k, j) * evals_[k].dq;
            df.block(k * n_, j * n_, n_, n_) = tset_.V(k, j) * evals_[k].df;
        }
}

Eigen::VectorXd StSystem::state_scales() const {
    return circuit_.scales().replicate(K_, 1);
}

void StSystem::limit_update(const Eigen::VectorXd& x_old, Eigen::VectorXd& x_new) const {
    if (!has_diode_) return;
    const Eigen::VectorXd z_old = to_realizations(x_old);
    Eigen::VectorXd z_new = to_realizations(x_new);
    bool changed = false;
    for (int k = 0; k < K_; ++k) {
        Eigen::VectorXd zk = z_new.segment(k * n_, n_);
        const Eigen::VectorXd zk_before = zk;
        circuit_.limit_update(z_old.segment(k * n_, n_), zk);
        if ((zk - zk_before).cwiseAbs().maxCoeff() > 0.0) {
            z_new.segment(k * n_, n_) = zk;
            changed = true;
        }
    }
    if (changed) x_new = from_realizations(z_new);
}

Eigen::MatrixXd StSystem::assembled_jacobian(const Eigen::VectorXd& x, double t, double cq,
                                             double cf) const {
    eval_blocks(x, t);
    Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(K_ * n_, K_ * n_);
    for (int k = 0; k < K_; ++k)
        blk.block(k * n_, k * n_, n_, n_) = cq * evals_[k].dq + cf * evals_[k].df;
    Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(K_ * n_, K_ * n_);
    for (int i = 0; i < K_; ++i)
        for (int j = 0; j < K_; ++j)
            kron.block(i * n_, j * n_, n_, n_) =
                tset_.V(i, j) * Eigen::MatrixXd::Identity(n_, n_);
    return blk * kron;
}

Eigen::MatrixXd StSystem::direct_jacobian(const Eigen::VectorXd& x, double t, double cq,
                                          double cf) const {
    eval_blocks(x, t);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(K_ * n_, K_ * n_);
    for (int k = 0; k < K_; ++k) {
        const Eigen::MatrixXd Jk = cq * evals_[k].dq + cf * evals_[k].df;
        for (int j = 0; j < K_; ++j) J.block(k * n_, j * n_, n_, n_) = Jk * tset_.V(k, j);
    }
    return J;
}

// --- SgSystem ----------------------------------------------------------------

SgSystem::SgSystem(const Circuit& circuit, GpcBasisPtr basis, RuleND quad)
    : circuit_(circuit),
      basis_(std::move(basis)),
      quad_(std::move(quad)),
      K_(basis_->size()),
      n_(circuit.size()) {
    if (quad_.count() < K_)
        throw std::invalid_argument("SgSystem: quadrature rule has fewer nodes than K");
    bound_.reserve(quad_.count());
    h_at_.reserve(quad_.count());
    for (int i = 0; i < quad_.count(); ++i) {
        bound_.push_back(circuit_.bind_parameters(quad_.nodes[i]));
        h_at_.push_back(basis_->eval_all(quad_.nodes[i]));
    }
}

void SgSystem::eval(const Eigen::VectorXd& x, double t, Eigen::VectorXd& q,
                    Eigen::VectorXd& f, Eigen::VectorXd& b) const {
    const auto X = as_blocks(x, n_, K_);
    q = Eigen::VectorXd::Zero(K_ * n_);
    f = Eigen::VectorXd::Zero(K_ * n_);
    b = Eigen::VectorXd::Zero(K_ * n_);
    auto Q = as_blocks(q, n_, K_);
    auto F = as_blocks(f, n_, K_);
    auto B = as_blocks(b, n_, K_);
    Eigen::VectorXd xt(n_);
    for (int i = 0; i < quad_.count(); ++i) {
        const auto& h = h_at_[i];
        xt.setZero();
        for (int k = 0; k < K_; ++k) xt += h[k] * X.col(k);
        circuit_.eval_qf_bound(bound_[i], xt, quad_.nodes[i], t, scratch_);
        const double w = quad_.weights[i];
        for (int k = 0; k < K_; ++k) {
            const double whk = w * h[k];
            Q.col(k) += whk * scratch_.q;
            F.col(k) += whk * scratch_.f;
            B.col(k) += whk * scratch_.b;
        }
    }
}

void SgSystem::jacobians(const Eigen::VectorXd& x, double t, Eigen::MatrixXd& dq,
                         Eigen::MatrixXd& df) const {
    const auto X = as_blocks(x, n_, K_);
    dq = Eigen::MatrixXd::Zero(K_ * n_, K_ * n_);
    df = Eigen::MatrixXd::Zero(K_ * n_, K_ * n_);
    Eigen::VectorXd xt(n_);
    for (int i = 0; i < quad_.count(); ++i) {
        const auto& h = h_at_[i];
        xt.setZero();
        for (int k = 0; k < K_; ++k) xt += h[k] * X.col(k);
        circuit_.eval_qf_bound(bound_[i], xt, quad_.nodes[i], t, scratch_);
        const double w = quad_.weights[i];
        for (int k = 0; k < K_; ++k)
            for (int j = 0; j < K_; ++j) {
                const double c = w * h[k] * h[j];
                if (c == 0.0) continue;
                dq.block(k * n_, j * n_, n_, n_) += c * scratch_.dq;
                df.block(k * n_, j * n_, n_, n_) += c * scratch_.df;
            }
    }
}

void SgSystem::factor(const Eigen::VectorXd& x, double t, double cq, double cf) {
    Eigen::MatrixXd dq, df;
    jacobians(x, t, dq, df);
    lu_.compute(cq * dq + cf * df);
    rcond_ = lu_pivot_ratio(lu_);
}

Eigen::VectorXd SgSystem::solve(const Eigen::VectorXd& rhs) const { return lu_.solve(rhs); }

double SgSystem::rcond() const { return rcond_; }

Eigen::VectorXd SgSystem::state_scales() const {
    return circuit_.scales().replicate(K_, 1);
}

int parameter_degree(const Circuit& circuit) {
    int deg = 0;
    for (const auto& dev : circuit.devices()) {
        for (const auto& p : dev.params) deg = std::max(deg, p.degree());
        if (dev.kind == DeviceKind::VSource || dev.kind == DeviceKind::ISource) {
            deg = std::max(deg, dev.source.dc.degree());
            deg = std::max(deg, dev.source.offset.degree());
            deg = std::max(deg, dev.source.amp.degree());
            for (const auto& v : dev.source.pwl_v) deg = std::max(deg, v.degree());
        }
    }
    return deg;
}

RuleND default_sg_quadrature(const Circuit& circuit, const GpcBasis& basis) {
    const int d = basis.dim();
    const int target = 2 * basis.order() + parameter_degree(circuit) + 2;
    if (d <= 3) {
        const int pts = target / 2 + 1;  // Gauss n-point rule is exact to 2n-1
        std::vector<Rule1D> rules;
        rules.reserve(d);
        for (int j = 0; j < d; ++j) rules.push_back(gauss_rule(basis.distribution(j), pts));
        return tensor_grid(rules);
    }
    return smolyak_grid(basis.distributions(), basis.order() + 1);
}

// --- intrusive solvers -------------------------------------------------------

GpcState make_gpc_state(GpcBasisPtr basis, int n, Eigen::VectorXd coeffs, double time) {
    GpcState s;
    s.basis = std::move(basis);
    s.n = n;
    s.coeffs = std::move(coeffs);
    s.time = time;
    return s;
}

GpcState nominal_dc_guess(const Circuit& circuit, GpcBasisPtr basis,
                          const NewtonOptions& opts) {
    const int n = circuit.size();
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(basis->size() * n);
    coeffs.head(n) = dc_solve(circuit, circuit.nominal_xi(), opts);
    return make_gpc_state(std::move(basis), n, std::move(coeffs));
}

namespace {
template <typename System>
GpcState solve_dc_impl(System& sys, const NewtonOptions& opts, std::optional<GpcState> x0,
                       NewtonStats* stats) {
    Eigen::VectorXd start;
    if (x0) {
        start = x0->coeffs;
    } else {
        start = nominal_dc_guess(sys.circuit(), sys.basis(), opts).coeffs;
    }
    Eigen::VectorXd x = dc_solve_system(sys, opts, start, 0.0, stats);
    return make_gpc_state(sys.basis(), sys.block_size(), std::move(x));
}
}  // namespace

GpcState st_solve_dc(StSystem& sys, const NewtonOptions& opts, std::optional<GpcState> x0,
                     NewtonStats* stats) {
    return solve_dc_impl(sys, opts, std::move(x0), stats);
}

GpcState sg_solve_dc(SgSystem& sys, const NewtonOptions& opts, std::optional<GpcState> x0,
                     NewtonStats* stats) {
    return solve_dc_impl(sys, opts, std::move(x0), stats);
}

namespace {
template <typename System>
Trajectory solve_transient_impl(System& sys, double t0, double t1, const StepController& ctrl,
                                const NewtonOptions& opts, std::optional<GpcState> x0,
                                const std::vector<double>& must_hit) {
    std::optional<Eigen::VectorXd> start;
    if (x0) start = x0->coeffs;
    return transient_solve_system(sys, t0, t1, ctrl, opts, std::move(start), must_hit);
}
}  // namespace

Trajectory st_solve_transient(StSystem& sys, double t0, double t1, const StepController& ctrl,
                              const NewtonOptions& opts, std::optional<GpcState> x0,
                              const std::vector<double>& must_hit) {
    return solve_transient_impl(sys, t0, t1, ctrl, opts, std::move(x0), must_hit);
}

Trajectory sg_solve_transient(SgSystem& sys, double t0, double t1, const StepController& ctrl,
                              const NewtonOptions& opts, std::optional<GpcState> x0,
                              const std::vector<double>& must_hit) {
    return solve_transient_impl(sys, t0, t1, ctrl, opts, std::move(x0), must_hit);
}

// --- result assembly ---------------------------------------------------------

UqResult uq_from_states(const std::string& method, const Circuit& circuit, GpcBasisPtr basis,
                        const std::vector<double>& times,
                        const std::vector<Eigen::VectorXd>& stacked_states) {
    UqResult r;
    r.method = method;
    r.K = basis->size();
    r.order = basis->order();
    const int n = circuit.size();
    for (int i = 0; i < n; ++i) r.names.push_back(circuit.unknown_name(i));
    r.times = times;
    r.coeffs = stacked_states;
    r.mean.reserve(times.size());
    r.stddev.reserve(times.size());
    for (const auto& coeffs : stacked_states) {
        GpcState s = make_gpc_state(basis, n, coeffs);
        auto [mean, var] = moments(s);
        r.mean.push_back(mean);
        r.stddev.push_back(var.cwiseSqrt());
    }
    return r;
}

// --- stochastic collocation ----------------------------------------------------

UqResult sc_solve(const Circuit& circuit, GpcBasisPtr basis, const RuleND& quad,
                  const ScAnalysis& analysis, const NewtonOptions& opts) {
    const int n = circuit.size();
    const int K = basis->size();
    const int N = quad.count();
    UqResult r;
    r.method = "sc";
    r.K = K;
    r.order = basis->order();
    r.n_hat = N;
    r.kappa_samp = sampling_speedup_ratio(quad, *basis);
    for (int i = 0; i < n; ++i) r.names.push_back(circuit.unknown_name(i));

    std::vector<std::vector<double>> h_at(N);
    for (int i = 0; i < N; ++i) h_at[i] = basis->eval_all(quad.nodes[i]);

    if (analysis.kind == ScAnalysis::Kind::Dc) {
        std::vector<Eigen::VectorXd> sol(N);
        detail::parallel_for(N, [&](long i) {
            sol[i] = dc_solve(circuit, quad.nodes[i], opts);
        });
        r.det_solves = N;
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(K * n);
        auto C = as_blocks(coeffs, n, K);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < K; ++j) C.col(j) += quad.weights[i] * h_at[i][j] * sol[i];
        r.times = {0.0};
        r.coeffs = {coeffs};
    } else {
        double h = analysis.fixed_step;
        if (!(h > 0.0)) {
            // pilot adaptive run at the nominal point fixes the shared grid
            Trajectory pilot = transient_solve(circuit, circuit.nominal_xi(), analysis.t0,
                                               analysis.t1, analysis.pilot, opts);
            if (!pilot.completed)
                throw std::runtime_error("sc_solve: pilot transient failed: " +
                                         pilot.abort_reason);
            h = pilot.min_accepted_step;
        }
        const long steps = std::lround(std::ceil((analysis.t1 - analysis.t0) / h));
        h = (analysis.t1 - analysis.t0) / static_cast<double>(steps);
        r.fixed_step = h;
        r.steps_accepted = static_cast<int>(steps);

        std::vector<Trajectory> trajs(N);
        detail::parallel_for(N, [&](long i) {
            trajs[i] = transient_solve(circuit, quad.nodes[i], analysis.t0, analysis.t1,
                                       StepController::fixed(h), opts);
            if (!trajs[i].completed)
                throw std::runtime_error("sc_solve: node " + std::to_string(i) +
                                         " transient failed: " + trajs[i].abort_reason);
        });
        r.det_solves = N;
        const size_t T = trajs[0].times.size();
        for (size_t m = 0; m < T; ++m) {
            Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(K * n);
            auto C = as_blocks(coeffs, n, K);
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < K; ++j)
                    C.col(j) += quad.weights[i] * h_at[i][j] * trajs[i].states[m];
            r.times.push_back(trajs[0].times[m]);
            r.coeffs.push_back(std::move(coeffs));
        }
    }

    for (const auto& coeffs : r.coeffs) {
        GpcState s = make_gpc_state(basis, n, coeffs);
        auto [mean, var] = moments(s);
        r.mean.push_back(mean);
        r.stddev.push_back(var.cwiseSqrt());
    }
    return r;
}

// --- Monte Carlo ---------------------------------------------------------------

std::vector<double> sample_parameters(const std::vector<Distribution>& dists,
                                      std::uint64_t seed, std::uint64_t index) {
    SampleStream stream(seed, index);
    std::vector<double> xi(dists.size());
    for (size_t j = 0; j < dists.size(); ++j) xi[j] = stream.draw(dists[j]);
    return xi;
}

UqResult mc_solve(const Circuit& circuit, long n_samples, std::uint64_t seed,
                  const McAnalysis& analysis, const NewtonOptions& opts) {
    if (n_samples < 2) throw std::invalid_argument("mc_solve: needs at least 2 samples");
    const int n = circuit.size();
    UqResult r;
    r.method = "mc";
    r.n_hat = static_cast<int>(n_samples);
    r.seed = seed;
    for (int i = 0; i < n; ++i) r.names.push_back(circuit.unknown_name(i));

    std::vector<double> times;
    size_t T = 1;
    double h = 0.0;
    long steps = 0;
    if (analysis.kind == McAnalysis::Kind::Transient) {
        h = analysis.fixed_step;
        if (!(h > 0.0)) {
            StepController pilot;
            Trajectory ptraj = transient_solve(circuit, circuit.nominal_xi(), analysis.t0,
                                               analysis.t1, pilot, opts);
            if (!ptraj.completed)
                throw std::runtime_error("mc_solve: pilot transient failed");
            h = ptraj.min_accepted_step;
        }
        steps = std::lround(std::ceil((analysis.t1 - analysis.t0) / h));
        h = (analysis.t1 - analysis.t0) / static_cast<double>(steps);
        r.fixed_step = h;
        T = static_cast<size_t>(steps) + 1;
        for (long m = 0; m <= steps; ++m) times.push_back(analysis.t0 + m * h);
    } else {
        times = {0.0};
    }

    // per-sample states (T x n each); slots keep merging order-independent
    std::vector<std::vector<Eigen::VectorXd>> sol(n_samples);
    std::vector<char> failed(n_samples, 0);
    detail::parallel_for(n_samples, [&](long i) {
        const auto xi = sample_parameters(circuit.param_dists(), seed,
                                          static_cast<std::uint64_t>(i));
        try {
            if (analysis.kind == McAnalysis::Kind::Dc) {
                sol[i] = {dc_solve(circuit, xi, opts)};
            } else {
                Trajectory traj = transient_solve(circuit, xi, analysis.t0, analysis.t1,
                                                  StepController::fixed(h), opts);
                if (!traj.completed) throw std::runtime_error(traj.abort_reason);
                sol[i] = std::move(traj.states);
            }
        } catch (const std::exception&) {
            failed[i] = 1;
        }
    });

    long ok = 0;
    for (long i = 0; i < n_samples; ++i)
        if (!failed[i]) ++ok;
    r.mc_failures = n_samples - ok;
    r.det_solves = n_samples;
    if (r.mc_failures * 100 > n_samples)
        throw std::runtime_error("mc_solve: more than 1% of samples failed (" +
                                 std::to_string(r.mc_failures) + "/" +
                                 std::to_string(n_samples) + ")");

    r.times = times;
    // deviations are accumulated against the first successful sample, so a
    // parameter-independent circuit reports exactly zero spread
    long first_ok = 0;
    while (failed[first_ok]) ++first_ok;
    for (size_t m = 0; m < T; ++m) {
        const Eigen::VectorXd& anchor = sol[first_ok][m];
        Eigen::VectorXd dsum = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd dsq = Eigen::VectorXd::Zero(n);
        for (long i = 0; i < n_samples; ++i)
            if (!failed[i]) {
                const Eigen::VectorXd d = sol[i][m] - anchor;
                dsum += d;
                dsq += d.cwiseProduct(d);
            }
        const double den = static_cast<double>(ok);
        const Eigen::VectorXd mean = anchor + dsum / den;
        Eigen::VectorXd var =
            (dsq - dsum.cwiseProduct(dsum) / den) / static_cast<double>(ok - 1);
        var = var.cwiseMax(0.0);
        r.mean.push_back(mean);
        r.stddev.push_back(var.cwiseSqrt());
        r.std_error.push_back((var / den).cwiseSqrt());
    }
    return r;
}

}  // namespace specsim
