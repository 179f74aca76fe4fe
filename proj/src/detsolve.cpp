#include "specsim/detsolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace specsim {

namespace {
constexpr double kSingularRcond = 1e-14;

struct ResidualCtx {
    // residual r(x) = cq*(q(x) - q_ref) - qdot_ref + f(x) - b(t)
    double cq = 0.0;
    const Eigen::VectorXd* q_ref = nullptr;
    const Eigen::VectorXd* qdot_ref = nullptr;
};

Eigen::VectorXd residual(DaeSystem& sys, const Eigen::VectorXd& x, double t,
                         const ResidualCtx& ctx) {
    Eigen::VectorXd q, f, b;
    sys.eval(x, t, q, f, b);
    Eigen::VectorXd r = f - b;
    if (ctx.cq != 0.0) r += ctx.cq * (q - *ctx.q_ref);
    if (ctx.qdot_ref) r -= *ctx.qdot_ref;
    return r;
}

double rms(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : std::sqrt(v.squaredNorm() / v.size());
}

// Shared Newton loop for DC and for one implicit integration step.
NewtonStats newton_solve(DaeSystem& sys, Eigen::VectorXd& x, double t, double cq, double cf,
                         const ResidualCtx& ctx, const NewtonOptions& opts) {
    NewtonStats stats;
    const Eigen::VectorXd scales = sys.state_scales();
    Eigen::VectorXd r = residual(sys, x, t, ctx);
    double rnorm = rms(r);
    for (int it = 0; it < opts.max_iters; ++it) {
        sys.factor(x, t, cq, cf);
        const double rc = sys.rcond();
        if (rc >= 0.0 && rc < kSingularRcond)
            throw std::runtime_error(
                "singular MNA Jacobian (floating node or inconsistent circuit)");
        const Eigen::VectorXd dx = sys.solve(-r);
        ++stats.iterations;

        Eigen::VectorXd x_new = x + dx;
        sys.limit_update(x, x_new);

        Eigen::VectorXd r_new = residual(sys, x_new, t, ctx);
        double rnorm_new = rms(r_new);
        if (opts.damping == NewtonOptions::Damping::LineSearch) {
            double lambda = 1.0;
            Eigen::VectorXd step = x_new - x;
            while (rnorm_new > (1.0 - 1e-4 * lambda) * rnorm && rnorm_new > opts.abs_tol &&
                   lambda > 1.0 / 64.0) {
                lambda *= 0.5;
                x_new = x + lambda * step;
                r_new = residual(sys, x_new, t, ctx);
                rnorm_new = rms(r_new);
            }
        }
        const double dnorm = wrms(x_new - x, scales);
        x = x_new;
        r = r_new;
        rnorm = rnorm_new;
        stats.residual_norm = rnorm;
        stats.update_norm = dnorm;
        if (rnorm <= opts.abs_tol && dnorm <= opts.rel_tol * (1.0 + wrms(x, scales))) {
            stats.converged = true;
            return stats;
        }
    }
    stats.residual_norm = rnorm;
    stats.converged = rnorm <= opts.abs_tol;
    return stats;
}
}  // namespace

DeterministicSystem::DeterministicSystem(const Circuit& circuit, std::vector<double> xi)
    : circuit_(circuit), xi_(std::move(xi)), bound_(circuit.bind_parameters(xi_)) {}

void DeterministicSystem::eval(const Eigen::VectorXd& x, double t, Eigen::VectorXd& q,
                               Eigen::VectorXd& f, Eigen::VectorXd& b) const {
    circuit_.eval_qf_bound(bound_, x, xi_, t, scratch_);
    q = scratch_.q;
    f = scratch_.f;
    b = scratch_.b;
}

void DeterministicSystem::factor(const Eigen::VectorXd& x, double t, double cq, double cf) {
    circuit_.eval_qf_bound(bound_, x, xi_, t, scratch_);
    lu_.compute(cq * scratch_.dq + cf * scratch_.df);
    rcond_ = lu_pivot_ratio(lu_);
}

Eigen::VectorXd DeterministicSystem::solve(const Eigen::VectorXd& rhs) const {
    return lu_.solve(rhs);
}

double DeterministicSystem::rcond() const { return rcond_; }

void DeterministicSystem::jacobians(const Eigen::VectorXd& x, double t, Eigen::MatrixXd& dq,
                                    Eigen::MatrixXd& df) const {
    circuit_.eval_qf_bound(bound_, x, xi_, t, scratch_);
    dq = scratch_.dq;
    df = scratch_.df;
}

double lu_pivot_ratio(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    const double dmax = diag.maxCoeff();
    if (!(dmax > 0.0)) return 0.0;
    return diag.minCoeff() / dmax;
}

Eigen::VectorXd differential_rows(const Eigen::MatrixXd& dq) {
    Eigen::VectorXd mask(dq.rows());
    for (Eigen::Index i = 0; i < dq.rows(); ++i)
        mask[i] = dq.row(i).cwiseAbs().sum() > 0.0 ? 1.0 : 0.0;
    return mask;
}

double wrms(const Eigen::VectorXd& v, const Eigen::VectorXd& scales) {
    if (v.size() == 0) return 0.0;
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double w = v[i] / scales[i];
        s += w * w;
    }
    return std::sqrt(s / v.size());
}

Eigen::VectorXd dc_solve_system(DaeSystem& sys, const NewtonOptions& opts,
                                std::optional<Eigen::VectorXd> x0, double t0,
                                NewtonStats* stats_out) {
    Eigen::VectorXd x = x0 ? *x0 : Eigen::VectorXd::Zero(sys.size());
    ResidualCtx ctx;  // pure f(x) = b
    const NewtonStats stats = newton_solve(sys, x, t0, 0.0, 1.0, ctx, opts);
    if (stats_out) *stats_out = stats;
    if (!stats.converged)
        throw std::runtime_error("dc_solve: Newton did not converge in " +
                                 std::to_string(opts.max_iters) +
                                 " iterations (best residual " +
                                 std::to_string(stats.residual_norm) + ")");
    return x;
}

Trajectory transient_solve_system(DaeSystem& sys, double t0, double t1,
                                  const StepController& ctrl, const NewtonOptions& opts,
                                  std::optional<Eigen::VectorXd> x0,
                                  const std::vector<double>& must_hit) {
    if (!(t1 > t0)) throw std::invalid_argument("transient: t1 must exceed t0");
    const double span = t1 - t0;
    const Eigen::VectorXd scales = sys.state_scales();
    const bool fixed = ctrl.mode == StepController::Mode::Fixed;
    if (fixed && !(ctrl.h_fixed > 0.0))
        throw std::invalid_argument("transient: fixed mode needs a positive step");
    const double h_min = ctrl.h_min > 0.0 ? ctrl.h_min : span * 1e-12;
    const double h_max = ctrl.h_max > 0.0 ? ctrl.h_max : span;

    std::vector<double> hits = must_hit;
    hits.push_back(t1);
    std::sort(hits.begin(), hits.end());

    Trajectory traj;
    Eigen::VectorXd x = x0 ? *x0 : dc_solve_system(sys, opts, std::nullopt, t0);
    traj.times.push_back(t0);
    traj.states.push_back(x);

    Eigen::VectorXd q, f, b;
    sys.eval(x, t0, q, f, b);
    Eigen::MatrixXd dq0, df0;
    sys.jacobians(x, t0, dq0, df0);
    Eigen::VectorXd q_prev = q;
    Eigen::VectorXd qdot_prev = differential_rows(dq0).cwiseProduct(b - f);
    Eigen::VectorXd x_prev = x, x_prev2 = x;
    double h_prev = 0.0;

    double t = t0;
    double h = fixed ? ctrl.h_fixed : std::min(h_max, span * 1e-4);
    size_t hit_idx = 0;
    bool first_step = true;
    traj.min_accepted_step = span;

    const double t_end_tol = span * 1e-12;
    while (t < t1 - t_end_tol) {
        while (hit_idx < hits.size() && hits[hit_idx] <= t + t_end_tol) ++hit_idx;
        double h_try = std::max(h, h_min);
        bool landed = false;
        if (hit_idx < hits.size()) {
            const double gap = hits[hit_idx] - t;
            if (h_try >= gap - t_end_tol) {
                h_try = gap;
                landed = true;
            } else if (h_try > 0.5 * gap && !fixed) {
                h_try = 0.5 * gap;  // avoid a sliver step next time
            }
        }

        const double t_new = landed ? hits[hit_idx] : t + h_try;
        const double cq = first_step ? 1.0 / h_try : 2.0 / h_try;
        ResidualCtx ctx;
        ctx.cq = cq;
        ctx.q_ref = &q_prev;
        ctx.qdot_ref = first_step ? nullptr : &qdot_prev;

        Eigen::VectorXd x_new = x;  // warm start
        NewtonStats stats = newton_solve(sys, x_new, t_new, cq, 1.0, ctx, opts);
        traj.newton_iterations += stats.iterations;

        bool accept = stats.converged;
        double est = 0.0;
        if (accept && !fixed && !first_step && h_prev > 0.0) {
            const Eigen::VectorXd x_pred = x_prev + (h_try / h_prev) * (x_prev - x_prev2);
            est = wrms(x_new - x_pred, scales) / (3.0 * (1.0 + h_prev / h_try));
            const double target = ctrl.lte_tol * (1.0 + wrms(x_new, scales));
            if (est > target && h_try > h_min) accept = false;
        }

        if (accept) {
            sys.eval(x_new, t_new, q, f, b);
            const Eigen::VectorXd qdot_new =
                first_step ? Eigen::VectorXd((q - q_prev) / h_try)
                           : Eigen::VectorXd(2.0 / h_try * (q - q_prev) - qdot_prev);
            q_prev = q;
            qdot_prev = qdot_new;
            x_prev2 = x_prev;
            x_prev = x_new;
            x = x_new;
            h_prev = h_try;
            t = t_new;
            traj.times.push_back(t);
            traj.states.push_back(x);
            ++traj.accepted;
            traj.min_accepted_step = std::min(traj.min_accepted_step, h_try);
            first_step = false;
            if (!fixed) {
                double grow = ctrl.grow_clamp;
                if (est > 0.0) {
                    const double target = ctrl.lte_tol * (1.0 + wrms(x, scales));
                    grow = std::min(grow, 0.9 * std::sqrt(target / est));
                }
                h = std::clamp(h_try * std::max(grow, ctrl.shrink_clamp), h_min, h_max);
            }
        } else {
            ++traj.rejected;
            double shrink = 0.5;
            if (stats.converged && est > 0.0) {
                const double target = ctrl.lte_tol * (1.0 + wrms(x_new, scales));
                shrink = std::clamp(0.9 * std::sqrt(target / est), ctrl.shrink_clamp, 0.9);
            }
            const double h_next = h_try * shrink;
            if (fixed || h_next < h_min) {
                traj.completed = false;
                traj.abort_reason = stats.converged
                                        ? "step size underflow under LTE control"
                                        : "Newton failure at minimum step size";
                return traj;
            }
            h = h_next;
        }
    }
    return traj;
}

SensitivityResult transient_with_sensitivity(DaeSystem& sys, double t0, double t1, int steps,
                                             const Eigen::VectorXd& x0,
                                             const NewtonOptions& opts) {
    if (steps < 1) throw std::invalid_argument("transient_with_sensitivity: steps >= 1");
    const int n = sys.size();
    SensitivityResult res;
    res.monodromy = Eigen::MatrixXd::Identity(n, n);
    res.traj.times.push_back(t0);
    res.traj.states.push_back(x0);
    if (t1 == t0) return res;

    const double h = (t1 - t0) / steps;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd q, f, b;
    sys.eval(x, t0, q, f, b);
    Eigen::MatrixXd dq_prev(n, n), df_prev(n, n);
    sys.jacobians(x, t0, dq_prev, df_prev);
    // qdot memory only exists on differential rows; x0 may be inconsistent
    const Eigen::VectorXd mask = differential_rows(dq_prev);
    Eigen::VectorXd q_prev = q;
    Eigen::VectorXd qdot_prev = mask.cwiseProduct(b - f);
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd D = -(mask.asDiagonal() * df_prev);  // d(qdot0)/dx0

    for (int m = 0; m < steps; ++m) {
        const double t_new = t0 + (m + 1) * h;
        const double cq = 2.0 / h;
        ResidualCtx ctx;
        ctx.cq = cq;
        ctx.q_ref = &q_prev;
        ctx.qdot_ref = &qdot_prev;
        NewtonStats stats = newton_solve(sys, x, t_new, cq, 1.0, ctx, opts);
        res.traj.newton_iterations += stats.iterations;
        if (!stats.converged)
            throw std::runtime_error("transient_with_sensitivity: Newton failed at t = " +
                                     std::to_string(t_new));

        Eigen::MatrixXd dq_new(n, n), df_new(n, n);
        sys.jacobians(x, t_new, dq_new, df_new);
        // factor holds J = cq*dq_new + df_new from the last Newton iteration;
        // refresh it at the converged point for the sensitivity solve
        sys.factor(x, t_new, cq, 1.0);
        const Eigen::MatrixXd rhs = cq * (dq_prev * S) + D;
        Eigen::MatrixXd S_new(n, n);
        for (int c = 0; c < n; ++c) S_new.col(c) = sys.solve(rhs.col(c));
        D = cq * (dq_new * S_new - dq_prev * S) - D;
        S = S_new;

        sys.eval(x, t_new, q, f, b);
        const Eigen::VectorXd qdot_new = cq * (q - q_prev) - qdot_prev;
        q_prev = q;
        qdot_prev = qdot_new;
        dq_prev = dq_new;
        df_prev = df_new;
        res.traj.times.push_back(t_new);
        res.traj.states.push_back(x);
        ++res.traj.accepted;
    }
    res.monodromy = S;
    return res;
}

Eigen::VectorXd dc_solve(const Circuit& circuit, const std::vector<double>& xi,
                         const NewtonOptions& opts, std::optional<Eigen::VectorXd> x0,
                         NewtonStats* stats) {
    DeterministicSystem sys(circuit, xi);
    return dc_solve_system(sys, opts, std::move(x0), 0.0, stats);
}

Trajectory transient_solve(const Circuit& circuit, const std::vector<double>& xi, double t0,
                           double t1, const StepController& ctrl, const NewtonOptions& opts,
                           std::optional<Eigen::VectorXd> x0,
                           const std::vector<double>& must_hit) {
    DeterministicSystem sys(circuit, xi);
    return transient_solve_system(sys, t0, t1, ctrl, opts, std::move(x0), must_hit);
}

}  // namespace specsim
