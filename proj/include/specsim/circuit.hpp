#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "specsim/distribution.hpp"
#include "specsim/expression.hpp"

namespace specsim {

enum class DeviceKind {
    Resistor,
    Capacitor,
    Inductor,
    VSource,
    ISource,
    Diode,
    MosfetL1,
    Nlcs,  // cubic voltage-controlled current source: i = -g1*v + g3*v^3
};

/// Time shape of an independent source. Amplitude-like arguments may depend
/// on the random parameters; the time profile itself may not.
struct SourceSpec {
    enum class Kind { Dc, Sin, Pwl } kind = Kind::Dc;
    Expr dc = Expr::constant(0.0);                  // Dc value
    Expr offset = Expr::constant(0.0), amp = Expr::constant(0.0);  // Sin
    double freq = 0.0, phase = 0.0;                 // Sin (rad)
    std::vector<double> pwl_t;                      // Pwl breakpoints
    std::vector<Expr> pwl_v;

    double value(double t, const std::vector<double>& xi) const;
};

struct Device {
    DeviceKind kind;
    std::string name;
    std::vector<int> nodes;   // MNA node indices, -1 for ground
    std::vector<Expr> params; // meaning depends on kind (see circuit.cpp)
    SourceSpec source;        // V/I sources only
    int branch = -1;          // extra MNA unknown for VSource / Inductor
};

/// Everything eval_qf produces at one (x, xi, t) point: the charge/flux and
/// resistive vectors of the MNA equation d q(x,xi)/dt + f(x,xi) = B u(t),
/// their state Jacobians (analytic stamps), and the assembled B u(t) term.
struct QfEval {
    Eigen::VectorXd q, f, b;
    Eigen::MatrixXd dq, df;
};

/// Per-device numeric parameter snapshot at a fixed xi.
struct BoundDevice {
    std::vector<double> values;
    double source_scale = 0.0;  // unused for non-sources
};

class Circuit {
public:
    /// MNA size: non-ground nodes plus branch-current unknowns.
    int size() const { return n_; }
    int node_count() const { return static_cast<int>(node_names_.size()); }
    int dim() const { return static_cast<int>(param_names_.size()); }

    const std::vector<Device>& devices() const { return devices_; }
    const std::vector<std::string>& param_names() const { return param_names_; }
    const std::vector<Distribution>& param_dists() const { return param_dists_; }
    const std::vector<std::string>& node_names() const { return node_names_; }

    /// Name of MNA unknown i: "v(node)" or "i(device)".
    std::string unknown_name(int i) const;

    /// Index of a node's voltage unknown; throws for unknown names.
    int node_index(const std::string& name) const;

    /// Mean of each parameter's measure: the nominal parameter point.
    std::vector<double> nominal_xi() const;

    /// Deterministic parameter snapshot for every device; pure in xi.
    std::vector<BoundDevice> bind_parameters(const std::vector<double>& xi) const;

    /// q, f, Jacobians and B u(t) at (x, xi, t).
    QfEval eval_qf(const Eigen::VectorXd& x, const std::vector<double>& xi, double t) const;
    void eval_qf_bound(const std::vector<BoundDevice>& bound, const Eigen::VectorXd& x,
                       const std::vector<double>& xi, double t, QfEval& out) const;

    /// Input incidence matrix B (size n x m, one column per source) and the
    /// source value vector u(t) at a bound parameter point.
    Eigen::MatrixXd input_matrix() const;
    Eigen::VectorXd source_values(double t, const std::vector<double>& xi) const;

    /// Junction-voltage limiting: damp Newton updates across diode junctions
    /// so the exponential cannot run away. x_new is adjusted in place.
    void limit_update(const Eigen::VectorXd& x_old, Eigen::VectorXd& x_new) const;

    /// Weighted-RMS scales per unknown (1 V for voltages, 1 mA for currents).
    Eigen::VectorXd scales() const;

    /// True if any device parameter or source depends on the parameters.
    bool is_stochastic() const;

    // Construction (used by the netlist parser and by tests building
    // circuits programmatically).
    int add_node(const std::string& name);           // returns index, "0" -> -1
    void add_device(Device dev);
    void declare_param(const std::string& name, const Distribution& dist);
    void finalize();                                 // assigns branch indices

private:
    std::vector<Device> devices_;
    std::vector<std::string> node_names_;
    std::vector<std::string> param_names_;
    std::vector<Distribution> param_dists_;
    std::vector<int> source_order_;  // device index per B column
    int n_ = 0;
    bool finalized_ = false;
};

/// Shockley thermal voltage at 300 K.
constexpr double kThermalVoltage = 0.025852;

}  // namespace specsim
