#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "specsim/detsolve.hpp"
#include "specsim/gpc_basis.hpp"
#include "specsim/quadrature.hpp"

namespace specsim {

/// Testing points for the collocation-tested (stochastic testing) system:
/// points selected from candidate quadrature nodes so the transformation
/// matrix V, V(i,j) = H_j(xi_i), is invertible and well conditioned.
struct TestingSet {
    std::vector<std::vector<double>> points;  // K points of dimension d
    Eigen::MatrixXd V;
    Eigen::MatrixXd V_inv;
    double beta = 0.0;       // acceptance threshold used
    double cond = 0.0;       // 2-norm condition of V
    int candidates = 0;      // N_hat of the candidate rule
};

/// Greedy selection: candidates sorted by descending |weight|; a candidate
/// is accepted when its basis vector keeps a relative component > beta
/// orthogonal to the span of the accepted ones; stops at K points.
TestingSet select_testing_points(const RuleND& candidates, const GpcBasis& basis, double beta);

/// Default candidate rule: tensor Gauss with p+1 points per axis for d <= 3,
/// Smolyak at level p+1 above.
RuleND default_candidate_rule(const GpcBasis& basis);

/// Stacked gPC coefficient state: blocks of n circuit unknowns per basis
/// function, [xhat^1; ...; xhat^K].
struct GpcState {
    Eigen::VectorXd coeffs;  // K*n
    GpcBasisPtr basis;
    int n = 0;
    double time = 0.0;

    Eigen::VectorBlock<const Eigen::VectorXd> block(int k) const {  // k in [1,K]
        return coeffs.segment((k - 1) * n, n);
    }
};

/// x_tilde(xi) = sum_k xhat^k H_k(xi).
Eigen::VectorXd surrogate_eval(const GpcState& state, const std::vector<double>& xi);

/// mean = first block; variance = sum of squares of the rest (orthonormal
/// basis), elementwise over circuit unknowns.
std::pair<Eigen::VectorXd, Eigen::VectorXd> moments(const GpcState& state);

/// kappa_samp = N_hat / K.
double sampling_speedup_ratio(const RuleND& quad, const GpcBasis& basis);
double sampling_speedup_ratio(int candidate_count, const GpcBasis& basis);

/// Coupled DAE from collocation testing: block k of q/f/b is the circuit
/// evaluated at the surrogate state for testing point xi_k. The Newton
/// matrix factors as blkdiag(J_1..J_K) (V kron I_n); Decoupled mode solves
/// the K small systems and applies V^-1, Coupled mode assembles and solves
/// the dense K*n system. Both produce the same iterates up to roundoff.
class StSystem : public DaeSystem {
public:
    enum class Mode { Decoupled, Coupled };

    StSystem(const Circuit& circuit, GpcBasisPtr basis, TestingSet tset,
             Mode mode = Mode::Decoupled);

    int size() const override { return K_ * n_; }
    void eval(const Eigen::VectorXd& x, double t, Eigen::VectorXd& q, Eigen::VectorXd& f,
              Eigen::VectorXd& b) const override;
    void factor(const Eigen::VectorXd& x, double t, double cq, double cf) override;
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override;
    double rcond() const override;
    void jacobians(const Eigen::VectorXd& x, double t, Eigen::MatrixXd& dq,
                   Eigen::MatrixXd& df) const override;
    Eigen::VectorXd state_scales() const override;
    void limit_update(const Eigen::VectorXd& x_old, Eigen::VectorXd& x_new) const override;

    /// Realizations at the testing points: (V kron I_n) x.
    Eigen::VectorXd to_realizations(const Eigen::VectorXd& x) const;
    Eigen::VectorXd from_realizations(const Eigen::VectorXd& z) const;

    /// Newton matrix assembled from the factored form blkdiag(J_k)(V kron I).
    Eigen::MatrixXd assembled_jacobian(const Eigen::VectorXd& x, double t, double cq,
                                       double cf) const;
    /// The same matrix assembled block by block from the chain rule,
    /// d(block k)/d(xhat^j) = J_k * V(k,j).
    Eigen::MatrixXd direct_jacobian(const Eigen::VectorXd& x, double t, double cq,
                                    double cf) const;

    const TestingSet& testing_set() const { return tset_; }
    const Circuit& circuit() const { return circuit_; }
    GpcBasisPtr basis() const { return basis_; }
    Mode mode() const { return mode_; }
    int block_size() const { return n_; }
    int block_count() const { return K_; }

private:
    void eval_blocks(const Eigen::VectorXd& x, double t) const;

    const Circuit& circuit_;
    GpcBasisPtr basis_;
    TestingSet tset_;
    Mode mode_;
    int K_, n_;
    std::vector<std::vector<BoundDevice>> bound_;  // per testing point
    mutable std::vector<QfEval> evals_;            // per testing point
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> block_lu_;
    Eigen::PartialPivLU<Eigen::MatrixXd> coupled_lu_;
    double rcond_ = -1.0;
    bool has_diode_ = false;
};

/// Coupled DAE from Galerkin testing: block k of q/f/b is the quadrature
/// estimate of <q(x_tilde, .), H_k>; the Jacobian is fully coupled.
class SgSystem : public DaeSystem {
public:
    SgSystem(const Circuit& circuit, GpcBasisPtr basis, RuleND quad);

    int size() const override { return K_ * n_; }
    void eval(const Eigen::VectorXd& x, double t, Eigen::VectorXd& q, Eigen::VectorXd& f,
              Eigen::VectorXd& b) const override;
    void factor(const Eigen::VectorXd& x, double t, double cq, double cf) override;
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override;
    double rcond() const override;
    void jacobians(const Eigen::VectorXd& x, double t, Eigen::MatrixXd& dq,
                   Eigen::MatrixXd& df) const override;
    Eigen::VectorXd state_scales() const override;

    const RuleND& quadrature() const { return quad_; }
    const Circuit& circuit() const { return circuit_; }
    GpcBasisPtr basis() const { return basis_; }
    int block_size() const { return n_; }

private:
    const Circuit& circuit_;
    GpcBasisPtr basis_;
    RuleND quad_;
    int K_, n_;
    std::vector<std::vector<BoundDevice>> bound_;   // per quadrature node
    std::vector<std::vector<double>> h_at_;         // basis values per node
    mutable QfEval scratch_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double rcond_ = -1.0;
};

/// Default Galerkin quadrature: tensor Gauss exact to degree
/// 2p + (parameter-dependence degree) + 2 for d <= 3, Smolyak level p+1
/// above. The exactness margin is heuristic for non-polynomial devices.
RuleND default_sg_quadrature(const Circuit& circuit, const GpcBasis& basis);

/// Maximum polynomial degree of any device parameter in the random variables.
int parameter_degree(const Circuit& circuit);

// --- intrusive solvers -----------------------------------------------------

GpcState st_solve_dc(StSystem& sys, const NewtonOptions& opts = {},
                     std::optional<GpcState> x0 = std::nullopt, NewtonStats* stats = nullptr);

Trajectory st_solve_transient(StSystem& sys, double t0, double t1,
                              const StepController& ctrl = {}, const NewtonOptions& opts = {},
                              std::optional<GpcState> x0 = std::nullopt,
                              const std::vector<double>& must_hit = {});

GpcState sg_solve_dc(SgSystem& sys, const NewtonOptions& opts = {},
                     std::optional<GpcState> x0 = std::nullopt, NewtonStats* stats = nullptr);

Trajectory sg_solve_transient(SgSystem& sys, double t0, double t1,
                              const StepController& ctrl = {}, const NewtonOptions& opts = {},
                              std::optional<GpcState> x0 = std::nullopt,
                              const std::vector<double>& must_hit = {});

/// Stacked initial state with block 1 set to the nominal-parameter DC
/// solution; the default Newton starting point for ST/SG.
GpcState nominal_dc_guess(const Circuit& circuit, GpcBasisPtr basis,
                          const NewtonOptions& opts = {});

GpcState make_gpc_state(GpcBasisPtr basis, int n, Eigen::VectorXd coeffs, double time = 0.0);

// --- non-intrusive solvers ---------------------------------------------------

/// Per-output statistics of one analysis run.
struct UqResult {
    std::string method;
    std::vector<std::string> names;          // circuit unknown names
    std::vector<double> times;               // {0} for DC
    std::vector<Eigen::VectorXd> coeffs;     // per time, K*n (empty for MC)
    std::vector<Eigen::VectorXd> mean;       // per time, n
    std::vector<Eigen::VectorXd> stddev;     // per time, n
    std::vector<Eigen::VectorXd> std_error;  // MC only: standard error of the mean
    int K = 0;
    int order = 0;
    int n_hat = 0;          // candidate/quadrature/sample count
    long det_solves = 0;    // deterministic solve count (SC/MC)
    double kappa_samp = 0.0;
    double cond_v = -1.0;
    std::uint64_t seed = 0;
    long mc_failures = 0;
    int steps_accepted = 0;
    int steps_rejected = 0;
    long newton_iterations = 0;
    double fixed_step = 0.0;  // SC/MC shared transient grid
};

/// Wrap an intrusive trajectory (or a single DC state) as a UqResult.
UqResult uq_from_states(const std::string& method, const Circuit& circuit, GpcBasisPtr basis,
                        const std::vector<double>& times,
                        const std::vector<Eigen::VectorXd>& stacked_states);

struct ScAnalysis {
    enum class Kind { Dc, Transient } kind = Kind::Dc;
    double t0 = 0.0, t1 = 0.0;
    double fixed_step = 0.0;  // 0: pilot-derived
    StepController pilot;     // pilot run controller for the step choice
};

/// Stochastic collocation: deterministic solves at the quadrature nodes and
/// coefficient reconstruction xhat^j = sum_k w_k H_j(xi_k) x(xi_k).
UqResult sc_solve(const Circuit& circuit, GpcBasisPtr basis, const RuleND& quad,
                  const ScAnalysis& analysis, const NewtonOptions& opts = {});

struct McAnalysis {
    enum class Kind { Dc, Transient } kind = Kind::Dc;
    double t0 = 0.0, t1 = 0.0;
    double fixed_step = 0.0;
};

/// Monte Carlo with seeded, order-independent sample streams.
UqResult mc_solve(const Circuit& circuit, long n_samples, std::uint64_t seed,
                  const McAnalysis& analysis, const NewtonOptions& opts = {});

/// Draw one parameter vector (sample `index` of the stream).
std::vector<double> sample_parameters(const std::vector<Distribution>& dists,
                                      std::uint64_t seed, std::uint64_t index);

}  // namespace specsim
