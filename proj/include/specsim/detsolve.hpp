#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "specsim/circuit.hpp"

namespace specsim {

/// Abstract DAE  d q(x)/dt + f(x) = b(t)  with a pluggable linear solver, so
/// the same Newton/integration kernels drive the deterministic circuit, the
/// stacked collocation-tested system (block-decoupled solves) and the
/// Galerkin system (dense coupled solves).
class DaeSystem {
public:
    virtual ~DaeSystem() = default;
    virtual int size() const = 0;
    virtual void eval(const Eigen::VectorXd& x, double t, Eigen::VectorXd& q,
                      Eigen::VectorXd& f, Eigen::VectorXd& b) const = 0;

    /// Prepare the Newton matrix J = cq * dq/dx + cf * df/dx at (x, t).
    virtual void factor(const Eigen::VectorXd& x, double t, double cq, double cf) = 0;
    virtual Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const = 0;

    /// Reciprocal condition estimate of the last factored matrix, or -1 if
    /// the backend does not provide one.
    virtual double rcond() const { return -1.0; }

    /// Dense Jacobians at (x, t), used by sensitivity propagation.
    virtual void jacobians(const Eigen::VectorXd& x, double t, Eigen::MatrixXd& dq,
                           Eigen::MatrixXd& df) const = 0;

    /// Per-unknown scales for the weighted RMS norm (1 V / 1 mA pattern).
    virtual Eigen::VectorXd state_scales() const = 0;

    /// Device-specific damping of a proposed Newton update (junction limiting).
    virtual void limit_update(const Eigen::VectorXd& x_old, Eigen::VectorXd& x_new) const {
        (void)x_old;
        (void)x_new;
    }
};

/// The deterministic circuit at a fixed parameter point.
class DeterministicSystem : public DaeSystem {
public:
    DeterministicSystem(const Circuit& circuit, std::vector<double> xi);

    int size() const override { return circuit_.size(); }
    void eval(const Eigen::VectorXd& x, double t, Eigen::VectorXd& q, Eigen::VectorXd& f,
              Eigen::VectorXd& b) const override;
    void factor(const Eigen::VectorXd& x, double t, double cq, double cf) override;
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override;
    double rcond() const override;
    void jacobians(const Eigen::VectorXd& x, double t, Eigen::MatrixXd& dq,
                   Eigen::MatrixXd& df) const override;
    Eigen::VectorXd state_scales() const override { return circuit_.scales(); }
    void limit_update(const Eigen::VectorXd& x_old, Eigen::VectorXd& x_new) const override {
        circuit_.limit_update(x_old, x_new);
    }

private:
    const Circuit& circuit_;
    std::vector<double> xi_;
    std::vector<BoundDevice> bound_;
    mutable QfEval scratch_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double rcond_ = -1.0;
};

struct NewtonOptions {
    double abs_tol = 1e-9;   // RMS residual
    double rel_tol = 1e-9;   // weighted-RMS update, relative to state size
    int max_iters = 50;
    enum class Damping { None, LineSearch } damping = Damping::LineSearch;
};

struct NewtonStats {
    int iterations = 0;
    double residual_norm = 0.0;
    double update_norm = 0.0;
    bool converged = false;
};

struct StepController {
    double lte_tol = 1e-6;
    double h_min = 0.0;  // 0: derived from the span
    double h_max = 0.0;  // 0: unbounded
    double grow_clamp = 2.0;
    double shrink_clamp = 0.2;
    enum class Mode { Adaptive, Fixed } mode = Mode::Adaptive;
    double h_fixed = 0.0;  // Fixed mode step

    static StepController fixed(double h) {
        StepController c;
        c.mode = Mode::Fixed;
        c.h_fixed = h;
        return c;
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    int accepted = 0;
    int rejected = 0;
    int newton_iterations = 0;
    bool completed = true;      // false after a step-underflow abort
    std::string abort_reason;
    double min_accepted_step = 0.0;
};

/// Weighted RMS of v with per-entry scales.
double wrms(const Eigen::VectorXd& v, const Eigen::VectorXd& scales);

/// min/max ratio of |U| diagonal magnitudes of an LU factorization; a cheap
/// singularity indicator (0 for an exact zero pivot). Eigen's rcond() misses
/// exact zero pivots, so factor() implementations report this instead.
double lu_pivot_ratio(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu);

/// 1 for rows with charge/flux structure, 0 for algebraic rows. Derivative
/// memory (qdot and its sensitivities) must be zeroed on algebraic rows when
/// integration starts from an inconsistent state, or the memory recursion
/// qdot+ = -qdot- keeps the inconsistency alive forever.
Eigen::VectorXd differential_rows(const Eigen::MatrixXd& dq);

/// Newton solve of f(x, t0) = b(t0) on any DaeSystem. Throws on a singular
/// Jacobian; reports the best residual on non-convergence.
Eigen::VectorXd dc_solve_system(DaeSystem& sys, const NewtonOptions& opts,
                                std::optional<Eigen::VectorXd> x0 = std::nullopt,
                                double t0 = 0.0, NewtonStats* stats = nullptr);

/// Trapezoidal integration (backward-Euler startup step) with LTE-based
/// adaptive stepping; fixed mode takes uniform steps. `must_hit` times are
/// landed on exactly.
Trajectory transient_solve_system(DaeSystem& sys, double t0, double t1,
                                  const StepController& ctrl, const NewtonOptions& opts,
                                  std::optional<Eigen::VectorXd> x0 = std::nullopt,
                                  const std::vector<double>& must_hit = {});

struct SensitivityResult {
    Trajectory traj;
    Eigen::MatrixXd monodromy;  // d x(t1) / d x(t0)
};

/// Fixed-grid trapezoidal integration propagating d x(t)/d x(t0) through
/// every step; the end value is the Monodromy matrix over [t0, t1].
SensitivityResult transient_with_sensitivity(DaeSystem& sys, double t0, double t1, int steps,
                                             const Eigen::VectorXd& x0,
                                             const NewtonOptions& opts = {});

// Circuit-level convenience wrappers.
Eigen::VectorXd dc_solve(const Circuit& circuit, const std::vector<double>& xi,
                         const NewtonOptions& opts = {},
                         std::optional<Eigen::VectorXd> x0 = std::nullopt,
                         NewtonStats* stats = nullptr);

Trajectory transient_solve(const Circuit& circuit, const std::vector<double>& xi, double t0,
                           double t1, const StepController& ctrl = {},
                           const NewtonOptions& opts = {},
                           std::optional<Eigen::VectorXd> x0 = std::nullopt,
                           const std::vector<double>& must_hit = {});

}  // namespace specsim
