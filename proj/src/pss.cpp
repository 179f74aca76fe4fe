#include "specsim/pss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "specsim/sampling.hpp"

namespace specsim {

namespace {

double vec_wrms(const Eigen::VectorXd& v, const Eigen::VectorXd& scales) {
    return wrms(v, scales);
}

// Shooting initial guess: integrate the stacked system a few periods from
// the stochastic DC point and take the endpoint.
GpcState forced_initial_guess(StSystem& sys, double period, const ShootingOptions& opts) {
    GpcState start = st_solve_dc(sys, opts.newton);
    if (opts.guess_periods <= 0) return start;
    StepController ctrl;
    ctrl.lte_tol = 1e-5;
    Trajectory traj = st_solve_transient(sys, 0.0, opts.guess_periods * period, ctrl,
                                         opts.newton, start);
    if (!traj.completed)
        throw std::runtime_error("shoot_forced: initial-guess transient failed: " +
                                 traj.abort_reason);
    return make_gpc_state(sys.basis(), sys.block_size(), traj.states.back());
}

}  // namespace

ForcedPssResult shoot_forced(StSystem& sys, const ForcedShootingProblem& problem) {
    const double T = problem.period;
    if (!(T > 0.0)) throw std::invalid_argument("shoot_forced: period must be positive");
    const ShootingOptions& opts = problem.opts;
    if (opts.steps_per_period < 32)
        throw std::invalid_argument("shoot_forced: steps_per_period must be >= 32");
    const int n = sys.block_size(), K = sys.block_count();
    const Eigen::VectorXd scales = sys.state_scales();

    Eigen::VectorXd y = problem.initial_guess
                            ? problem.initial_guess->coeffs
                            : forced_initial_guess(sys, T, opts).coeffs;

    ForcedPssResult res;
    const bool decoupled = sys.mode() == StSystem::Mode::Decoupled;
    double gnorm = 0.0;
    for (int it = 0; it < opts.max_iters; ++it) {
        Eigen::VectorXd g(K * n);
        Eigen::VectorXd dy(K * n);
        if (decoupled) {
            // block k is the deterministic circuit at testing point k; solve
            // the K small shooting systems and map back through V
            const Eigen::VectorXd z = sys.to_realizations(y);
            Eigen::VectorXd gz(K * n), dz(K * n);
            for (int k = 0; k < K; ++k) {
                DeterministicSystem det(sys.circuit(), sys.testing_set().points[k]);
                const Eigen::VectorXd zk = z.segment(k * n, n);
                SensitivityResult sr = transient_with_sensitivity(det, 0.0, T,
                                                                  opts.steps_per_period, zk,
                                                                  opts.newton);
                res.newton_iterations += sr.traj.newton_iterations;
                gz.segment(k * n, n) = sr.traj.states.back() - zk;
                const Eigen::MatrixXd A = sr.monodromy - Eigen::MatrixXd::Identity(n, n);
                dz.segment(k * n, n) = A.partialPivLu().solve(-gz.segment(k * n, n));
            }
            g = sys.from_realizations(gz);
            dy = sys.from_realizations(dz);
        } else {
            SensitivityResult sr = transient_with_sensitivity(sys, 0.0, T,
                                                              opts.steps_per_period, y,
                                                              opts.newton);
            res.newton_iterations += sr.traj.newton_iterations;
            g = sr.traj.states.back() - y;
            const Eigen::MatrixXd A =
                sr.monodromy - Eigen::MatrixXd::Identity(K * n, K * n);
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
            if (lu_pivot_ratio(lu) < 1e-13)
                throw std::runtime_error(
                    "shoot_forced: Monodromy - I is singular; the circuit may be autonomous "
                    "(use the autonomous solver)");
            dy = lu.solve(-g);
        }
        gnorm = vec_wrms(g, scales);
        ++res.iterations;
        y += dy;
        if (gnorm <= opts.tol) break;
    }
    if (gnorm > opts.tol)
        throw std::runtime_error(
            "shoot_forced: Newton did not converge (residual " + std::to_string(gnorm) +
            "); a longer initial-guess transient may help");

    // store one period from the converged point
    SensitivityResult sr =
        transient_with_sensitivity(sys, 0.0, T, opts.steps_per_period, y, opts.newton);
    res.residual = vec_wrms(sr.traj.states.back() - y, scales);
    res.periodic_state = make_gpc_state(sys.basis(), n, y);
    res.times = sr.traj.times;
    res.states = sr.traj.states;
    return res;
}

// --- autonomous ---------------------------------------------------------------

namespace {

// One period of the tau-scaled block system dq/dtau + a*(f - b) = 0 for a
// single testing point, with sensitivities w = dz(T)/dz(0) (n x n) and
// s = dz(T)/da (n x 1) propagated through every trapezoidal step.
struct ScaledBlockRun {
    Eigen::VectorXd z_end;
    Eigen::MatrixXd w;
    Eigen::VectorXd s;
    std::vector<Eigen::VectorXd> states;
    long newton_iterations = 0;
};

ScaledBlockRun integrate_scaled_block(const Circuit& circuit,
                                      const std::vector<double>& xi, double a, double t_ref,
                                      int steps, const Eigen::VectorXd& z0,
                                      const NewtonOptions& opts) {
    const int n = circuit.size();
    const double h = t_ref / steps;
    const auto bound = circuit.bind_parameters(xi);
    QfEval ev;

    ScaledBlockRun run;
    run.states.reserve(steps + 1);
    run.states.push_back(z0);

    Eigen::VectorXd z = z0;
    circuit.eval_qf_bound(bound, z, xi, 0.0, ev);
    const Eigen::VectorXd b = ev.b;  // autonomous: constant input
    const Eigen::VectorXd mask = differential_rows(ev.dq);
    Eigen::VectorXd q_prev = ev.q;
    Eigen::VectorXd qdot_prev = a * mask.cwiseProduct(b - ev.f);
    Eigen::MatrixXd dq_prev = ev.dq;

    run.w = Eigen::MatrixXd::Identity(n, n);
    run.s = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd W_dot = -a * (mask.asDiagonal() * ev.df);  // d qdot / d z0
    Eigen::VectorXd s_dot = mask.cwiseProduct(b - ev.f);       // d qdot / d a

    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    for (int m = 0; m < steps; ++m) {
        const double cq = 2.0 / h;
        // Newton on r(z+) = cq (q+ - q-) - qdot- + a (f+ - b)
        double rnorm = 0.0;
        for (int it = 0; it < opts.max_iters; ++it) {
            circuit.eval_qf_bound(bound, z, xi, 0.0, ev);
            const Eigen::VectorXd r = cq * (ev.q - q_prev) - qdot_prev + a * (ev.f - b);
            rnorm = std::sqrt(r.squaredNorm() / n);
            if (rnorm <= opts.abs_tol && it > 0) break;
            lu.compute(cq * ev.dq + a * ev.df);
            z += lu.solve(-r);
            ++run.newton_iterations;
        }
        if (rnorm > opts.abs_tol)
            throw std::runtime_error("autonomous step Newton failed");

        circuit.eval_qf_bound(bound, z, xi, 0.0, ev);
        lu.compute(cq * ev.dq + a * ev.df);
        const Eigen::MatrixXd w_new = lu.solve((cq * (dq_prev * run.w) + W_dot).eval());
        const Eigen::VectorXd s_new =
            lu.solve((cq * (dq_prev * run.s) + s_dot - (ev.f - b)).eval());
        W_dot = cq * (ev.dq * w_new - dq_prev * run.w) - W_dot;
        s_dot = cq * (ev.dq * s_new - dq_prev * run.s) - s_dot;
        run.w = w_new;
        run.s = s_new;

        const Eigen::VectorXd qdot_new = cq * (ev.q - q_prev) - qdot_prev;
        q_prev = ev.q;
        qdot_prev = qdot_new;
        dq_prev = ev.dq;
        run.states.push_back(z);
    }
    run.z_end = z;
    return run;
}

}  // namespace

double AutonomousPssResult::period_at(const std::vector<double>& xi) const {
    const auto h = z0.basis->eval_all(xi);
    double a = 0.0;
    for (int k = 0; k < z0.basis->size(); ++k) a += a_coeffs[k] * h[k];
    return t_ref * a;
}

AutonomousPssResult shoot_autonomous(StSystem& sys,
                                     const AutonomousShootingProblem& problem) {
    const double T0 = problem.t_ref;
    if (!(T0 > 0.0)) throw std::invalid_argument("shoot_autonomous: T0 must be positive");
    const ShootingOptions& opts = problem.opts;
    const int n = sys.block_size(), K = sys.block_count();
    const int j = problem.phase_index;
    if (j < 0 || j >= n)
        throw std::invalid_argument("shoot_autonomous: phase index out of range");
    const Circuit& circuit = sys.circuit();
    const Eigen::MatrixXd& V = sys.testing_set().V;
    const Eigen::MatrixXd& Vi = sys.testing_set().V_inv;
    const Eigen::VectorXd scales = sys.state_scales();

    // unknowns: stacked coefficients z0 (K*n) and scaling coefficients a (K)
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(K * n);
    if (problem.initial_state) {
        z0.head(n) = *problem.initial_state;
    } else {
        throw std::invalid_argument("shoot_autonomous: initial nominal state required");
    }
    z0[j] = problem.phase_level;  // start exactly on the phase constraint
    for (int k = 1; k < K; ++k) z0[k * n + j] = 0.0;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(K);
    a[0] = 1.0;  // H_1 = 1, so a_tilde(xi) = 1 initially

    AutonomousPssResult res;
    res.t_ref = T0;
    double gnorm = 0.0;
    std::vector<ScaledBlockRun> runs(K);
    for (int it = 0; it < opts.max_iters; ++it) {
        const Eigen::VectorXd a_pts = V * a;  // a_tilde at the testing points
        for (int k = 0; k < K; ++k)
            if (!(a_pts[k] > 0.0))
                throw std::runtime_error(
                    "shoot_autonomous: non-positive period scaling at testing point " +
                    std::to_string(k + 1));

        // realization blocks and their sensitivities
        Eigen::VectorXd z = Eigen::VectorXd::Zero(K * n);
        {
            Eigen::Map<Eigen::MatrixXd> Z(z.data(), n, K);
            Eigen::Map<const Eigen::MatrixXd> Z0(z0.data(), n, K);
            Z = Z0 * V.transpose();
        }
        Eigen::VectorXd gz(K * n);
        for (int k = 0; k < K; ++k) {
            runs[k] = integrate_scaled_block(circuit, sys.testing_set().points[k], a_pts[k],
                                             T0, opts.steps_per_period,
                                             z.segment(k * n, n), opts.newton);
            gz.segment(k * n, n) = runs[k].z_end - z.segment(k * n, n);
        }

        // map to coefficient space: g1 = Vinv_blocks(gz), chi = pinned rows
        Eigen::VectorXd g1(K * n);
        {
            Eigen::Map<Eigen::MatrixXd> G1(g1.data(), n, K);
            Eigen::Map<const Eigen::MatrixXd> Gz(gz.data(), n, K);
            G1 = Gz * Vi.transpose();
        }
        Eigen::VectorXd chi(K);
        chi[0] = z0[j] - problem.phase_level;
        for (int k = 1; k < K; ++k) chi[k] = z0[k * n + j];

        gnorm = std::max(vec_wrms(g1, scales), chi.cwiseAbs().maxCoeff());
        ++res.iterations;
        if (gnorm <= opts.tol) break;

        // bordered Jacobian in coefficient space:
        //   [ M - I   S ] [dz0]   [g1 ]
        //   [   E     0 ] [da ] = [chi]
        // with M = (Vinv kron I) blkdiag(w_k) (V kron I) and
        // S(:,c) = (Vinv kron I) [w-block rows: s_k V(k,c)]
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K * n + K, K * n + K);
        for (int bi = 0; bi < K; ++bi)
            for (int bj = 0; bj < K; ++bj) {
                Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
                for (int k = 0; k < K; ++k) acc += Vi(bi, k) * V(k, bj) * runs[k].w;
                A.block(bi * n, bj * n, n, n) = acc;
            }
        A.block(0, 0, K * n, K * n) -= Eigen::MatrixXd::Identity(K * n, K * n);
        for (int bi = 0; bi < K; ++bi)
            for (int c = 0; c < K; ++c) {
                Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
                for (int k = 0; k < K; ++k) col += Vi(bi, k) * V(k, c) * runs[k].s;
                A.block(bi * n, K * n + c, n, 1) = col;
            }
        for (int k = 0; k < K; ++k) A(K * n + k, k * n + j) = 1.0;

        Eigen::VectorXd rhs(K * n + K);
        rhs.head(K * n) = -g1;
        rhs.tail(K) = -chi;
        const Eigen::VectorXd delta = A.partialPivLu().solve(rhs);
        z0 += delta.head(K * n);
        a += delta.tail(K);
    }
    if (gnorm > opts.tol)
        throw std::runtime_error(
            "shoot_autonomous: Newton did not converge (residual " + std::to_string(gnorm) +
            "); check that the phase level lies inside the oscillation range");

    // pin the constrained entries exactly
    z0[j] = problem.phase_level;
    for (int k = 1; k < K; ++k) z0[k * n + j] = 0.0;

    // final one-period trajectory on the scaled axis, stored as coefficients
    const Eigen::VectorXd a_pts = V * a;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(K * n);
    {
        Eigen::Map<Eigen::MatrixXd> Z(z.data(), n, K);
        Eigen::Map<const Eigen::MatrixXd> Z0(z0.data(), n, K);
        Z = Z0 * V.transpose();
    }
    std::vector<ScaledBlockRun> final_runs(K);
    for (int k = 0; k < K; ++k)
        final_runs[k] = integrate_scaled_block(circuit, sys.testing_set().points[k], a_pts[k],
                                               T0, opts.steps_per_period,
                                               z.segment(k * n, n), opts.newton);
    Eigen::VectorXd gz(K * n);
    for (int k = 0; k < K; ++k)
        gz.segment(k * n, n) = final_runs[k].z_end - z.segment(k * n, n);
    res.residual = vec_wrms(sys.from_realizations(gz), scales);

    for (int m = 0; m <= opts.steps_per_period; ++m) {
        res.tau.push_back(T0 * m / opts.steps_per_period);
        Eigen::VectorXd zs(K * n);
        for (int k = 0; k < K; ++k) zs.segment(k * n, n) = final_runs[k].states[m];
        res.states.push_back(sys.from_realizations(zs));
    }
    res.z0 = make_gpc_state(sys.basis(), n, z0);
    res.a_coeffs = a;
    return res;
}

// --- post-processing ------------------------------------------------------------

namespace {
// Fourier coefficient on a uniform single-period grid (endpoint duplicated);
// the rectangle rule is spectrally accurate for periodic integrands.
std::pair<double, double> fourier_pair(const std::vector<double>& times,
                                       const std::vector<double>& values, int harmonic) {
    const size_t M = times.size() - 1;
    const double T = times.back() - times.front();
    double a = 0.0, bsum = 0.0;
    for (size_t m = 0; m < M; ++m) {
        const double phase = 2.0 * M_PI * harmonic * (times[m] - times.front()) / T;
        a += values[m] * std::cos(phase);
        bsum += values[m] * std::sin(phase);
    }
    return {2.0 * a / M, 2.0 * bsum / M};
}
}  // namespace

double harmonic_amplitude(const std::vector<double>& times, const std::vector<double>& values,
                          int harmonic) {
    if (times.size() < 4 || times.size() != values.size())
        throw std::invalid_argument("harmonic_amplitude: bad waveform");
    if (harmonic == 0) {
        double s = 0.0;
        for (size_t m = 0; m + 1 < times.size(); ++m) s += values[m];
        return std::abs(s / (times.size() - 1));
    }
    const auto [a, b] = fourier_pair(times, values, harmonic);
    return std::hypot(a, b);
}

double thd_of_waveform(const std::vector<double>& times, const std::vector<double>& values,
                       int max_harmonic) {
    const double fund = harmonic_amplitude(times, values, 1);
    if (fund < 1e-12) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (int h = 2; h <= max_harmonic; ++h) {
        const double ah = harmonic_amplitude(times, values, h);
        s += ah * ah;
    }
    return std::sqrt(s) / fund;
}

DensityEstimate kernel_density(const std::vector<double>& samples, int grid_points) {
    if (samples.size() < 2) throw std::invalid_argument("kernel_density: too few samples");
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double q1 = sorted[static_cast<size_t>(0.25 * (n - 1))];
    const double q3 = sorted[static_cast<size_t>(0.75 * (n - 1))];
    const double iqr = q3 - q1;
    double spread = std::sqrt(var);
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    double bw = 0.9 * spread * std::pow(n, -0.2);
    if (!(bw > 0.0)) bw = std::max(1e-12, std::abs(mean) * 1e-6 + 1e-12);

    DensityEstimate est;
    est.bandwidth = bw;
    const double lo = sorted.front() - 3.0 * bw, hi = sorted.back() + 3.0 * bw;
    est.value.resize(grid_points);
    est.density.assign(grid_points, 0.0);
    const double norm = 1.0 / (n * bw * std::sqrt(2.0 * M_PI));
    for (int g = 0; g < grid_points; ++g) {
        const double x = lo + (hi - lo) * g / (grid_points - 1);
        est.value[g] = x;
        double s = 0.0;
        for (double v : samples) {
            const double u = (x - v) / bw;
            s += std::exp(-0.5 * u * u);
        }
        est.density[g] = s * norm;
    }
    return est;
}

double average_source_power(const Circuit& circuit, const std::vector<double>& times,
                            const std::vector<Eigen::VectorXd>& states,
                            const std::vector<double>& xi) {
    const size_t M = times.size() - 1;
    double acc = 0.0;
    for (size_t m = 0; m < M; ++m) {
        double p = 0.0;
        for (const auto& dev : circuit.devices()) {
            if (dev.kind == DeviceKind::VSource) {
                const double u = dev.source.value(times[m], xi);
                p += -u * states[m][dev.branch];
            } else if (dev.kind == DeviceKind::ISource) {
                const double u = dev.source.value(times[m], xi);
                const double va = dev.nodes[0] >= 0 ? states[m][dev.nodes[0]] : 0.0;
                const double vb = dev.nodes[1] >= 0 ? states[m][dev.nodes[1]] : 0.0;
                p += u * (vb - va);
            }
        }
        acc += p;
    }
    return acc / M;
}

namespace {
PssStatistics finish_stats(std::vector<double> samples, long undefined) {
    PssStatistics st;
    st.undefined = undefined;
    st.samples = std::move(samples);
    const double n = static_cast<double>(st.samples.size());
    for (double v : st.samples) st.mean += v;
    st.mean /= n;
    for (double v : st.samples) st.stddev += (v - st.mean) * (v - st.mean);
    st.stddev = std::sqrt(st.stddev / (n - 1.0));
    st.density = kernel_density(st.samples);
    return st;
}
}  // namespace

PssStatistics pss_thd(const Circuit& circuit, const ForcedPssResult& result, int node_index,
                      long n_samples, std::uint64_t seed) {
    (void)circuit;
    std::vector<double> samples;
    samples.reserve(n_samples);
    long undefined = 0;
    const int K = result.periodic_state.basis->size();
    const int n = result.periodic_state.n;
    for (long i = 0; i < n_samples; ++i) {
        const auto xi = sample_parameters(result.periodic_state.basis->distributions(), seed,
                                          static_cast<std::uint64_t>(i));
        const auto h = result.periodic_state.basis->eval_all(xi);
        std::vector<double> wave(result.times.size());
        for (size_t m = 0; m < result.times.size(); ++m) {
            double v = 0.0;
            for (int k = 0; k < K; ++k) v += h[k] * result.states[m][k * n + node_index];
            wave[m] = v;
        }
        const double thd = thd_of_waveform(result.times, wave);
        if (std::isnan(thd))
            ++undefined;
        else
            samples.push_back(thd);
    }
    if (samples.size() < 2)
        throw std::runtime_error("pss_thd: fundamental vanishes for nearly all samples");
    return finish_stats(std::move(samples), undefined);
}

PssStatistics pss_power(const Circuit& circuit, const ForcedPssResult& result, long n_samples,
                        std::uint64_t seed) {
    const int K = result.periodic_state.basis->size();
    const int n = result.periodic_state.n;
    std::vector<double> samples;
    samples.reserve(n_samples);
    for (long i = 0; i < n_samples; ++i) {
        const auto xi = sample_parameters(result.periodic_state.basis->distributions(), seed,
                                          static_cast<std::uint64_t>(i));
        const auto h = result.periodic_state.basis->eval_all(xi);
        std::vector<Eigen::VectorXd> realized(result.states.size());
        for (size_t m = 0; m < result.states.size(); ++m) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
            for (int k = 0; k < K; ++k) v += h[k] * result.states[m].segment(k * n, n);
            realized[m] = v;
        }
        samples.push_back(average_source_power(circuit, result.times, realized, xi));
    }
    return finish_stats(std::move(samples), 0);
}

PssStatistics pss_frequency(const Circuit& circuit, const AutonomousPssResult& result,
                            long n_samples, std::uint64_t seed) {
    std::vector<double> samples;
    samples.reserve(n_samples);
    for (long i = 0; i < n_samples; ++i) {
        const auto xi = sample_parameters(circuit.param_dists(), seed,
                                          static_cast<std::uint64_t>(i));
        samples.push_back(1.0 / result.period_at(xi));
    }
    return finish_stats(std::move(samples), 0);
}

std::vector<double> upward_crossings(const std::vector<double>& times,
                                     const std::vector<double>& values, double level) {
    std::vector<double> out;
    for (size_t m = 1; m < times.size(); ++m) {
        if (values[m - 1] < level && values[m] >= level) {
            const double frac = (level - values[m - 1]) / (values[m] - values[m - 1]);
            out.push_back(times[m - 1] + frac * (times[m] - times[m - 1]));
        }
    }
    return out;
}

OscillatorPilot autonomous_pilot(const Circuit& circuit, const std::vector<double>& xi,
                                 double t_ref, int phase_index, double level,
                                 const NewtonOptions& opts, int periods) {
    Eigen::VectorXd x0 = dc_solve(circuit, xi, opts);
    x0[phase_index] += 0.01;  // nudge off the (unstable) equilibrium
    StepController ctrl;
    ctrl.h_max = t_ref / 64.0;
    Trajectory traj = transient_solve(circuit, xi, 0.0, periods * t_ref, ctrl, opts, x0);
    if (!traj.completed)
        throw std::runtime_error("autonomous pilot transient failed: " + traj.abort_reason);

    std::vector<double> v(traj.times.size());
    for (size_t m = 0; m < traj.times.size(); ++m) v[m] = traj.states[m][phase_index];
    const auto crossings = upward_crossings(traj.times, v, level);
    if (crossings.size() < 6)
        throw std::runtime_error(
            "autonomous pilot: too few crossings of the phase level; the circuit may not "
            "oscillate or the level lies outside the swing");
    // measure on late cycles only, after the startup transient has settled
    const size_t tail = crossings.size() / 5 + 2;
    double period = 0.0;
    for (size_t c = crossings.size() - tail; c + 1 < crossings.size(); ++c)
        period += crossings[c + 1] - crossings[c];
    period /= static_cast<double>(tail - 1);

    OscillatorPilot pilot;
    pilot.period = period;
    const double tc = crossings.back();
    const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), tc);
    const size_t hi = std::min<size_t>(it - traj.times.begin(), traj.times.size() - 1);
    const size_t lo = hi - 1;
    const double frac = (tc - traj.times[lo]) / (traj.times[hi] - traj.times[lo]);
    pilot.state_at_crossing = traj.states[lo] + frac * (traj.states[hi] - traj.states[lo]);
    return pilot;
}

}  // namespace specsim
