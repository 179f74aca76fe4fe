#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "specsim/spectral.hpp"

namespace specsim {

struct ShootingOptions {
    int steps_per_period = 200;
    double tol = 1e-9;        // weighted-RMS of the shooting residual
    int max_iters = 20;
    int guess_periods = 5;    // transient run length for the initial guess
    NewtonOptions newton;
};

struct ForcedShootingProblem {
    double period = 0.0;
    ShootingOptions opts;
    std::optional<GpcState> initial_guess;
};

struct ForcedPssResult {
    GpcState periodic_state;              // stacked coefficients at t = 0
    std::vector<double> times;            // one period, uniform grid
    std::vector<Eigen::VectorXd> states;  // stacked coefficients over the period
    int iterations = 0;
    double residual = 0.0;
    long newton_iterations = 0;
};

/// One-period map fixed point of the collocation-tested system by shooting
/// Newton; the Jacobian is (Monodromy - I). Decoupled mode runs the K block
/// problems independently and maps through V; Coupled assembles the stacked
/// system. Iterates agree up to roundoff.
ForcedPssResult shoot_forced(StSystem& sys, const ForcedShootingProblem& problem);

struct AutonomousShootingProblem {
    double t_ref = 0.0;       // T0, reference period at the nominal parameters
    int phase_index = 0;      // MNA index pinned by the phase constraint
    double phase_level = 0.0; // lambda
    ShootingOptions opts;
    std::optional<Eigen::VectorXd> initial_state;  // nominal-point state at the crossing
};

struct AutonomousPssResult {
    GpcState z0;                  // periodic point on the scaled time axis
    Eigen::VectorXd a_coeffs;     // gPC coefficients of the period scaling a(xi)
    double t_ref = 0.0;
    std::vector<double> tau;      // scaled-time grid over one period T0
    std::vector<Eigen::VectorXd> states;
    int iterations = 0;
    double residual = 0.0;

    /// T(xi) = T0 * a_tilde(xi).
    double period_at(const std::vector<double>& xi) const;
};

/// Shooting for autonomous circuits: time is scaled per-realization by the
/// gPC-expanded factor a(xi), the state-transition runs over the fixed
/// reference period, and a phase constraint pins the coefficients of one
/// node voltage to make the bordered system determined.
AutonomousPssResult shoot_autonomous(StSystem& sys, const AutonomousShootingProblem& problem);

// --- post-processing ---------------------------------------------------------

/// Total harmonic distortion of a uniformly sampled single-period waveform:
/// RMS of harmonics 2..max_harmonic over the fundamental amplitude.
/// Returns NaN when the fundamental is below 1e-12.
double thd_of_waveform(const std::vector<double>& times, const std::vector<double>& values,
                       int max_harmonic = 10);

/// Amplitude of harmonic h (h = 0 gives |mean|).
double harmonic_amplitude(const std::vector<double>& times, const std::vector<double>& values,
                          int harmonic);

struct DensityEstimate {
    std::vector<double> value;
    std::vector<double> density;
    double bandwidth = 0.0;
};

/// Gaussian kernel density with Silverman bandwidth, sampled on a uniform
/// grid spanning the data plus three bandwidths.
DensityEstimate kernel_density(const std::vector<double>& samples, int grid_points = 256);

struct PssStatistics {
    double mean = 0.0;
    double stddev = 0.0;
    long undefined = 0;  // THD samples with a vanishing fundamental
    std::vector<double> samples;
    DensityEstimate density;
};

/// Sample the forced PSS surrogate: per-draw THD of one node voltage and
/// average power delivered by the sources.
PssStatistics pss_thd(const Circuit& circuit, const ForcedPssResult& result, int node_index,
                      long n_samples, std::uint64_t seed);
PssStatistics pss_power(const Circuit& circuit, const ForcedPssResult& result, long n_samples,
                        std::uint64_t seed);

/// Sample the autonomous period surrogate: oscillation frequency 1/T(xi).
PssStatistics pss_frequency(const Circuit& circuit, const AutonomousPssResult& result,
                            long n_samples, std::uint64_t seed);

/// Average power delivered by all sources over one uniformly sampled period
/// of a deterministic state trajectory.
double average_source_power(const Circuit& circuit, const std::vector<double>& times,
                            const std::vector<Eigen::VectorXd>& states,
                            const std::vector<double>& xi);

/// Linearly interpolated upward crossings of `level` in a node waveform.
std::vector<double> upward_crossings(const std::vector<double>& times,
                                     const std::vector<double>& values, double level);

struct OscillatorPilot {
    Eigen::VectorXd state_at_crossing;  // full state at the last upward crossing
    double period = 0.0;                // measured from late crossings
};

/// Long transient at a fixed parameter point, kicked off the equilibrium, to
/// locate the limit cycle: measures the period from late upward crossings of
/// the phase level and interpolates the state at the final crossing. Used for
/// the autonomous shooting initial guess and as a period oracle.
OscillatorPilot autonomous_pilot(const Circuit& circuit, const std::vector<double>& xi,
                                 double t_ref, int phase_index, double level,
                                 const NewtonOptions& opts = {}, int periods = 150);

}  // namespace specsim
