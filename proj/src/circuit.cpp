#include "specsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace specsim {

namespace {

// Argument layout per device kind (see bind_parameters):
//   Resistor/Capacitor/Inductor: [value]
//   Diode: [is, eta]
//   MosfetL1: [vt0, kp, lambda, w, l]
//   Nlcs: [g1, g3]
// Sources carry their values in SourceSpec instead.

// Exponent cap for the diode exponential; beyond it the characteristic is
// continued linearly (value- and slope-continuous), so eval_qf never
// overflows no matter what state Newton proposes.
constexpr double kDiodeExpCap = 40.0;

inline void add_at(Eigen::VectorXd& v, int i, double val) {
    if (i >= 0) v[i] += val;
}
inline void add_at(Eigen::MatrixXd& m, int i, int j, double val) {
    if (i >= 0 && j >= 0) m(i, j) += val;
}
inline double state_at(const Eigen::VectorXd& x, int i) { return i >= 0 ? x[i] : 0.0; }

double diode_current(double vd, double isat, double eta, double* g_out) {
    const double vt = eta * kThermalVoltage;
    const double arg = vd / vt;
    double i, g;
    if (arg <= kDiodeExpCap) {
        const double e = std::exp(arg);
        i = isat * (e - 1.0);
        g = isat / vt * e;
    } else {
        const double e = std::exp(kDiodeExpCap);
        i = isat * (e * (1.0 + (arg - kDiodeExpCap)) - 1.0);
        g = isat / vt * e;
    }
    if (g_out) *g_out = g;
    return i;
}

// SPICE-style junction limiting of a proposed voltage step.
double pnjlim(double vnew, double vold, double vt, double vcrit) {
    if (vnew > vcrit && std::abs(vnew - vold) > 2.0 * vt) {
        if (vold > 0.0) {
            const double arg = 1.0 + (vnew - vold) / vt;
            vnew = arg > 0.0 ? vold + vt * std::log(arg) : vcrit;
        } else {
            vnew = vt * std::log(vnew / vt);
        }
    }
    return vnew;
}

}  // namespace

double SourceSpec::value(double t, const std::vector<double>& xi) const {
    switch (kind) {
        case Kind::Dc:
            return dc.eval(xi);
        case Kind::Sin:
            return offset.eval(xi) + amp.eval(xi) * std::sin(2.0 * M_PI * freq * t + phase);
        case Kind::Pwl: {
            if (pwl_t.empty()) return 0.0;
            if (t <= pwl_t.front()) return pwl_v.front().eval(xi);
            if (t >= pwl_t.back()) return pwl_v.back().eval(xi);
            const auto it = std::upper_bound(pwl_t.begin(), pwl_t.end(), t);
            const size_t hi = static_cast<size_t>(it - pwl_t.begin());
            const double t0 = pwl_t[hi - 1], t1 = pwl_t[hi];
            const double v0 = pwl_v[hi - 1].eval(xi), v1 = pwl_v[hi].eval(xi);
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        }
    }
    return 0.0;
}

std::string Circuit::unknown_name(int i) const {
    if (i < node_count()) return "v(" + node_names_[i] + ")";
    for (const auto& dev : devices_)
        if (dev.branch == i) return "i(" + dev.name + ")";
    return "x" + std::to_string(i);
}

int Circuit::node_index(const std::string& name) const {
    if (name == "0" || name == "gnd") return -1;
    const auto it = std::find(node_names_.begin(), node_names_.end(), name);
    if (it == node_names_.end()) throw std::invalid_argument("unknown node '" + name + "'");
    return static_cast<int>(it - node_names_.begin());
}

std::vector<double> Circuit::nominal_xi() const {
    std::vector<double> xi(param_dists_.size());
    for (size_t j = 0; j < xi.size(); ++j) xi[j] = param_dists_[j].mean();
    return xi;
}

int Circuit::add_node(const std::string& name) {
    if (name == "0" || name == "gnd") return -1;
    const auto it = std::find(node_names_.begin(), node_names_.end(), name);
    if (it != node_names_.end()) return static_cast<int>(it - node_names_.begin());
    node_names_.push_back(name);
    return static_cast<int>(node_names_.size()) - 1;
}

void Circuit::add_device(Device dev) {
    for (const auto& d : devices_)
        if (d.name == dev.name)
            throw std::invalid_argument("duplicate device name '" + dev.name + "'");
    devices_.push_back(std::move(dev));
    finalized_ = false;
}

void Circuit::declare_param(const std::string& name, const Distribution& dist) {
    for (const auto& p : param_names_)
        if (p == name) throw std::invalid_argument("duplicate parameter '" + name + "'");
    param_names_.push_back(name);
    param_dists_.push_back(dist);
}

void Circuit::finalize() {
    int next = node_count();
    source_order_.clear();
    for (size_t i = 0; i < devices_.size(); ++i) {
        Device& dev = devices_[i];
        if (dev.kind == DeviceKind::VSource || dev.kind == DeviceKind::Inductor)
            dev.branch = next++;
        if (dev.kind == DeviceKind::VSource || dev.kind == DeviceKind::ISource)
            source_order_.push_back(static_cast<int>(i));
    }
    n_ = next;
    finalized_ = true;
}

std::vector<BoundDevice> Circuit::bind_parameters(const std::vector<double>& xi) const {
    std::vector<BoundDevice> bound(devices_.size());
    for (size_t i = 0; i < devices_.size(); ++i) {
        const Device& dev = devices_[i];
        BoundDevice& b = bound[i];
        b.values.resize(dev.params.size());
        for (size_t k = 0; k < dev.params.size(); ++k) {
            b.values[k] = dev.params[k].eval(xi);
            if (!std::isfinite(b.values[k]))
                throw std::runtime_error("device " + dev.name +
                                         ": parameter evaluates non-finite");
        }
        switch (dev.kind) {
            case DeviceKind::Resistor:
            case DeviceKind::Capacitor:
            case DeviceKind::Inductor:
                if (!(b.values[0] > 0.0))
                    throw std::runtime_error("device " + dev.name +
                                             ": non-positive value at this parameter point");
                break;
            default:
                break;
        }
    }
    return bound;
}

QfEval Circuit::eval_qf(const Eigen::VectorXd& x, const std::vector<double>& xi,
                        double t) const {
    QfEval out;
    eval_qf_bound(bind_parameters(xi), x, xi, t, out);
    return out;
}

void Circuit::eval_qf_bound(const std::vector<BoundDevice>& bound, const Eigen::VectorXd& x,
                            const std::vector<double>& xi, double t, QfEval& out) const {
    if (!finalized_) throw std::logic_error("Circuit::finalize() not called");
    const int n = n_;
    out.q = Eigen::VectorXd::Zero(n);
    out.f = Eigen::VectorXd::Zero(n);
    out.b = Eigen::VectorXd::Zero(n);
    out.dq = Eigen::MatrixXd::Zero(n, n);
    out.df = Eigen::MatrixXd::Zero(n, n);

    for (size_t di = 0; di < devices_.size(); ++di) {
        const Device& dev = devices_[di];
        const auto& pv = bound[di].values;
        switch (dev.kind) {
            case DeviceKind::Resistor: {
                const int a = dev.nodes[0], bnode = dev.nodes[1];
                const double g = 1.0 / pv[0];
                const double v = state_at(x, a) - state_at(x, bnode);
                add_at(out.f, a, g * v);
                add_at(out.f, bnode, -g * v);
                add_at(out.df, a, a, g);
                add_at(out.df, a, bnode, -g);
                add_at(out.df, bnode, a, -g);
                add_at(out.df, bnode, bnode, g);
                break;
            }
            case DeviceKind::Capacitor: {
                const int a = dev.nodes[0], bnode = dev.nodes[1];
                const double c = pv[0];
                const double v = state_at(x, a) - state_at(x, bnode);
                add_at(out.q, a, c * v);
                add_at(out.q, bnode, -c * v);
                add_at(out.dq, a, a, c);
                add_at(out.dq, a, bnode, -c);
                add_at(out.dq, bnode, a, -c);
                add_at(out.dq, bnode, bnode, c);
                break;
            }
            case DeviceKind::Inductor: {
                const int a = dev.nodes[0], bnode = dev.nodes[1], br = dev.branch;
                const double ell = pv[0];
                const double i = x[br];
                add_at(out.q, br, ell * i);
                add_at(out.dq, br, br, ell);
                add_at(out.f, a, i);
                add_at(out.f, bnode, -i);
                add_at(out.df, a, br, 1.0);
                add_at(out.df, bnode, br, -1.0);
                // branch KVL: d(L i)/dt - (va - vb) = 0
                add_at(out.f, br, -(state_at(x, a) - state_at(x, bnode)));
                add_at(out.df, br, a, -1.0);
                add_at(out.df, br, bnode, 1.0);
                break;
            }
            case DeviceKind::VSource: {
                const int a = dev.nodes[0], bnode = dev.nodes[1], br = dev.branch;
                const double i = x[br];
                add_at(out.f, a, i);
                add_at(out.f, bnode, -i);
                add_at(out.df, a, br, 1.0);
                add_at(out.df, bnode, br, -1.0);
                add_at(out.f, br, state_at(x, a) - state_at(x, bnode));
                add_at(out.df, br, a, 1.0);
                add_at(out.df, br, bnode, -1.0);
                add_at(out.b, br, dev.source.value(t, xi));
                break;
            }
            case DeviceKind::ISource: {
                const int a = dev.nodes[0], bnode = dev.nodes[1];
                const double u = dev.source.value(t, xi);
                // current u flows from node a through the source to node b
                add_at(out.b, a, -u);
                add_at(out.b, bnode, u);
                break;
            }
            case DeviceKind::Diode: {
                const int a = dev.nodes[0], bnode = dev.nodes[1];
                const double vd = state_at(x, a) - state_at(x, bnode);
                double g = 0.0;
                const double i = diode_current(vd, pv[0], pv[1], &g);
                add_at(out.f, a, i);
                add_at(out.f, bnode, -i);
                add_at(out.df, a, a, g);
                add_at(out.df, a, bnode, -g);
                add_at(out.df, bnode, a, -g);
                add_at(out.df, bnode, bnode, g);
                break;
            }
            case DeviceKind::MosfetL1: {
                const int nd = dev.nodes[0], ng = dev.nodes[1], ns = dev.nodes[2];
                const double vt0 = pv[0], kp = pv[1], lam = pv[2], wl = pv[3] / pv[4];
                double vd = state_at(x, nd), vg = state_at(x, ng), vs = state_at(x, ns);
                // square law is symmetric in drain/source
                int td = nd, ts = ns;
                double sign = 1.0;
                if (vd < vs) {
                    std::swap(vd, vs);
                    std::swap(td, ts);
                    sign = -1.0;
                }
                const double vgs = vg - vs, vds = vd - vs, vov = vgs - vt0;
                double id = 0.0, gm = 0.0, gds = 0.0;
                if (vov > 0.0) {
                    const double c = kp * wl;
                    if (vds < vov) {
                        id = c * (vov * vds - 0.5 * vds * vds) * (1.0 + lam * vds);
                        gm = c * vds * (1.0 + lam * vds);
                        gds = c * (vov - vds) * (1.0 + lam * vds) +
                              c * (vov * vds - 0.5 * vds * vds) * lam;
                    } else {
                        id = 0.5 * c * vov * vov * (1.0 + lam * vds);
                        gm = c * vov * (1.0 + lam * vds);
                        gds = 0.5 * c * vov * vov * lam;
                    }
                }
                // current sign*id flows td -> ts
                add_at(out.f, td, sign * id);
                add_at(out.f, ts, -sign * id);
                // derivatives w.r.t. (vd', vg, vs') in the swapped frame:
                //   d id / d vd' = gds; d id / d vg = gm; d id / d vs' = -gm - gds
                add_at(out.df, td, td, sign * gds * 1.0);
                add_at(out.df, td, ng, sign * gm);
                add_at(out.df, td, ts, sign * (-gm - gds));
                add_at(out.df, ts, td, -sign * gds);
                add_at(out.df, ts, ng, -sign * gm);
                add_at(out.df, ts, ts, -sign * (-gm - gds));
                break;
            }
            case DeviceKind::Nlcs: {
                const int a = dev.nodes[0], bnode = dev.nodes[1];
                const double g1 = pv[0], g3 = pv[1];
                const double v = state_at(x, a) - state_at(x, bnode);
                const double i = -g1 * v + g3 * v * v * v;
                const double g = -g1 + 3.0 * g3 * v * v;
                add_at(out.f, a, i);
                add_at(out.f, bnode, -i);
                add_at(out.df, a, a, g);
                add_at(out.df, a, bnode, -g);
                add_at(out.df, bnode, a, -g);
                add_at(out.df, bnode, bnode, g);
                break;
            }
        }
    }
}

Eigen::MatrixXd Circuit::input_matrix() const {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n_, static_cast<int>(source_order_.size()));
    for (size_t c = 0; c < source_order_.size(); ++c) {
        const Device& dev = devices_[source_order_[c]];
        if (dev.kind == DeviceKind::VSource) {
            B(dev.branch, static_cast<int>(c)) = 1.0;
        } else {
            if (dev.nodes[0] >= 0) B(dev.nodes[0], static_cast<int>(c)) = -1.0;
            if (dev.nodes[1] >= 0) B(dev.nodes[1], static_cast<int>(c)) = 1.0;
        }
    }
    return B;
}

Eigen::VectorXd Circuit::source_values(double t, const std::vector<double>& xi) const {
    Eigen::VectorXd u(static_cast<int>(source_order_.size()));
    for (size_t c = 0; c < source_order_.size(); ++c)
        u[static_cast<int>(c)] = devices_[source_order_[c]].source.value(t, xi);
    return u;
}

void Circuit::limit_update(const Eigen::VectorXd& x_old, Eigen::VectorXd& x_new) const {
    for (size_t di = 0; di < devices_.size(); ++di) {
        const Device& dev = devices_[di];
        if (dev.kind != DeviceKind::Diode) continue;
        const double isat = dev.params[0].is_constant() ? dev.params[0].eval({}) : 1e-14;
        const double eta = dev.params[1].is_constant() ? dev.params[1].eval({}) : 1.0;
        const double vt = eta * kThermalVoltage;
        const double vcrit = vt * std::log(vt / (std::sqrt(2.0) * isat));
        const int a = dev.nodes[0], b = dev.nodes[1];
        const double vold = state_at(x_old, a) - state_at(x_old, b);
        const double vnew = state_at(x_new, a) - state_at(x_new, b);
        const double vlim = pnjlim(vnew, vold, vt, vcrit);
        if (vlim != vnew) {
            // push the correction onto whichever terminal is not ground
            const double dv = vlim - vnew;
            if (a >= 0)
                x_new[a] += dv;
            else if (b >= 0)
                x_new[b] -= dv;
        }
    }
}

Eigen::VectorXd Circuit::scales() const {
    Eigen::VectorXd s = Eigen::VectorXd::Ones(n_);
    for (int i = node_count(); i < n_; ++i) s[i] = 1e-3;
    return s;
}

bool Circuit::is_stochastic() const {
    for (const auto& dev : devices_) {
        for (const auto& p : dev.params)
            if (!p.is_constant()) return true;
        if (dev.kind == DeviceKind::VSource || dev.kind == DeviceKind::ISource) {
            const auto& s = dev.source;
            if (!s.dc.is_constant() || !s.offset.is_constant() || !s.amp.is_constant())
                return true;
            for (const auto& v : s.pwl_v)
                if (!v.is_constant()) return true;
        }
    }
    return false;
}

}  // namespace specsim
