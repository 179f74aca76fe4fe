#include "specsim/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace specsim {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw std::invalid_argument("netlist line " + std::to_string(line) + ": " + msg);
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::string join(const std::vector<std::string>& toks, size_t from) {
    std::string out;
    for (size_t i = from; i < toks.size(); ++i) {
        if (i > from) out += ' ';
        out += toks[i];
    }
    return out;
}

// Splits "sin(a b c)" -> {"a","b","c"}; commas and whitespace both separate.
std::vector<std::string> call_args(const std::string& s, size_t open, int line) {
    const size_t close = s.rfind(')');
    if (close == std::string::npos || close < open) fail(line, "missing ')' in source spec");
    std::string inner = s.substr(open + 1, close - open - 1);
    for (auto& c : inner)
        if (c == ',') c = ' ';
    return split_ws(inner);
}

double parse_num(const std::string& tok, int line, const std::string& what) {
    try {
        return parse_si_number(tok);
    } catch (const std::exception& e) {
        fail(line, what + ": " + e.what());
    }
}

Expr parse_expr(const std::string& text, const std::vector<std::string>& params, int line) {
    try {
        return Expr::parse(text, params);
    } catch (const std::exception& e) {
        fail(line, e.what());
    }
}

SourceSpec parse_source(const std::vector<std::string>& toks, size_t from,
                        const std::vector<std::string>& params, int line) {
    SourceSpec src;
    const std::string rest = join(toks, from);
    if (rest.rfind("sin(", 0) == 0) {
        const auto args = call_args(rest, 3, line);
        if (args.size() < 3 || args.size() > 4)
            fail(line, "sin() takes offset, amplitude, frequency [, phase]");
        src.kind = SourceSpec::Kind::Sin;
        src.offset = parse_expr(args[0], params, line);
        src.amp = parse_expr(args[1], params, line);
        src.freq = parse_num(args[2], line, "sin frequency");
        src.phase = args.size() > 3 ? parse_num(args[3], line, "sin phase") : 0.0;
        if (!(src.freq > 0.0)) fail(line, "sin frequency must be positive");
    } else if (rest.rfind("pwl(", 0) == 0) {
        const auto args = call_args(rest, 3, line);
        if (args.size() < 2 || args.size() % 2 != 0)
            fail(line, "pwl() takes time/value pairs");
        src.kind = SourceSpec::Kind::Pwl;
        for (size_t i = 0; i < args.size(); i += 2) {
            src.pwl_t.push_back(parse_num(args[i], line, "pwl time"));
            src.pwl_v.push_back(parse_expr(args[i + 1], params, line));
            if (src.pwl_t.size() > 1 && src.pwl_t.back() <= src.pwl_t[src.pwl_t.size() - 2])
                fail(line, "pwl times must increase");
        }
    } else {
        src.kind = SourceSpec::Kind::Dc;
        src.dc = parse_expr(rest, params, line);
    }
    return src;
}

// key=expr model arguments, with per-kind defaults.
std::vector<Expr> parse_model_args(const std::vector<std::string>& toks, size_t from,
                                   const std::vector<std::string>& keys,
                                   const std::vector<double>& defaults,
                                   const std::vector<std::string>& params, int line) {
    std::vector<Expr> out;
    out.reserve(keys.size());
    for (double d : defaults) out.push_back(Expr::constant(d));
    for (size_t i = from; i < toks.size(); ++i) {
        const size_t eq = toks[i].find('=');
        if (eq == std::string::npos) fail(line, "expected key=value, got '" + toks[i] + "'");
        const std::string key = toks[i].substr(0, eq);
        const auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) fail(line, "unknown model argument '" + key + "'");
        out[it - keys.begin()] = parse_expr(toks[i].substr(eq + 1), params, line);
    }
    return out;
}

}  // namespace

Netlist parse_netlist(const std::string& text) {
    Netlist net;
    Circuit& ckt = net.circuit;
    std::istringstream in(text);
    std::string raw;
    int line = 0;

    // first pass collects parameter declarations so device expressions can
    // reference parameters declared anywhere in the file
    {
        std::istringstream scan(text);
        int ln = 0;
        while (std::getline(scan, raw)) {
            ++ln;
            const std::string l = lower(raw);
            const auto toks = split_ws(l);
            if (toks.empty() || toks[0] != "param") continue;
            if (toks.size() < 3) fail(ln, "param needs a name and a distribution");
            const std::string& name = toks[1];
            const std::string spec = join(toks, 2);
            Distribution dist;
            try {
                if (spec == "gaussian") {
                    dist = Distribution::gaussian();
                } else if (spec == "uniform") {
                    dist = Distribution::uniform();
                } else if (spec.rfind("gamma(", 0) == 0) {
                    const auto args = call_args(spec, 5, ln);
                    if (args.size() != 1) fail(ln, "gamma(<shape>)");
                    dist = Distribution::gamma(parse_num(args[0], ln, "gamma shape"));
                } else if (spec.rfind("beta(", 0) == 0) {
                    const auto args = call_args(spec, 4, ln);
                    if (args.size() != 2) fail(ln, "beta(<alpha>,<beta>)");
                    dist = Distribution::beta(parse_num(args[0], ln, "beta alpha"),
                                              parse_num(args[1], ln, "beta beta"));
                } else {
                    fail(ln, "unknown distribution '" + spec + "'");
                }
                ckt.declare_param(name, dist);
            } catch (const std::invalid_argument& e) {
                if (std::string(e.what()).rfind("netlist line", 0) == 0) throw;
                fail(ln, e.what());
            }
        }
    }
    const auto& params = ckt.param_names();

    while (std::getline(in, raw)) {
        ++line;
        std::string l = lower(raw);
        if (l.empty()) continue;
        const auto toks = split_ws(l);
        if (toks.empty()) continue;
        const char c0 = toks[0][0];
        if (c0 == '*' || c0 == ';') continue;
        if (toks[0] == "param") continue;  // handled in the first pass

        if (c0 == '.') {
            if (toks[0] == ".end") continue;
            Analysis an;
            if (toks[0] == ".dc") {
                an.kind = Analysis::Kind::Dc;
            } else if (toks[0] == ".tran") {
                if (toks.size() < 2) fail(line, ".tran needs a stop time");
                an.kind = Analysis::Kind::Tran;
                an.tstop = parse_num(toks[1], line, "stop time");
                if (toks.size() > 2) an.lte_tol = parse_num(toks[2], line, "lte tolerance");
                if (!(an.tstop > 0.0)) fail(line, "stop time must be positive");
            } else if (toks[0] == ".pss") {
                if (toks.size() >= 2 && toks[1] == "auto") {
                    if (toks.size() != 5) fail(line, ".pss auto <T0> <node> <lambda>");
                    an.kind = Analysis::Kind::PssAuto;
                    an.period = parse_num(toks[2], line, "reference period");
                    an.node = toks[3];
                    an.level = parse_num(toks[4], line, "phase level");
                } else {
                    if (toks.size() != 2) fail(line, ".pss <T>");
                    an.kind = Analysis::Kind::PssForced;
                    an.period = parse_num(toks[1], line, "period");
                }
                if (!(an.period > 0.0)) fail(line, "period must be positive");
            } else {
                fail(line, "unknown card '" + toks[0] + "'");
            }
            net.analyses.push_back(an);
            continue;
        }

        Device dev;
        dev.name = toks[0];
        auto need = [&](size_t n, const char* what) {
            if (toks.size() < n) fail(line, std::string(what));
        };
        switch (c0) {
            case 'r':
            case 'c':
            case 'l': {
                need(4, "device needs two nodes and a value");
                dev.kind = c0 == 'r'   ? DeviceKind::Resistor
                           : c0 == 'c' ? DeviceKind::Capacitor
                                       : DeviceKind::Inductor;
                dev.nodes = {ckt.add_node(toks[1]), ckt.add_node(toks[2])};
                dev.params = {parse_expr(join(toks, 3), params, line)};
                const double nominal = dev.params[0].eval(ckt.nominal_xi());
                if (!(nominal > 0.0))
                    fail(line, "device " + dev.name + ": non-positive nominal value");
                break;
            }
            case 'v':
            case 'i': {
                need(4, "source needs two nodes and a value");
                dev.kind = c0 == 'v' ? DeviceKind::VSource : DeviceKind::ISource;
                dev.nodes = {ckt.add_node(toks[1]), ckt.add_node(toks[2])};
                dev.source = parse_source(toks, 3, params, line);
                break;
            }
            case 'd': {
                need(3, "diode needs two nodes");
                dev.kind = DeviceKind::Diode;
                dev.nodes = {ckt.add_node(toks[1]), ckt.add_node(toks[2])};
                dev.params = parse_model_args(toks, 3, {"is", "eta"}, {1e-14, 1.0},
                                              params, line);
                break;
            }
            case 'm': {
                need(4, "mosfet needs drain, gate, source nodes");
                dev.kind = DeviceKind::MosfetL1;
                dev.nodes = {ckt.add_node(toks[1]), ckt.add_node(toks[2]),
                             ckt.add_node(toks[3])};
                dev.params = parse_model_args(toks, 4, {"vt0", "kp", "lambda", "w", "l"},
                                              {1.0, 2e-5, 0.0, 1e-5, 1e-5}, params, line);
                break;
            }
            case 'n': {
                need(3, "nlcs needs two nodes");
                dev.kind = DeviceKind::Nlcs;
                dev.nodes = {ckt.add_node(toks[1]), ckt.add_node(toks[2])};
                dev.params = parse_model_args(toks, 3, {"g1", "g3"}, {1e-3, 1e-3},
                                              params, line);
                break;
            }
            default:
                fail(line, "unknown device type '" + std::string(1, c0) + "'");
        }
        try {
            ckt.add_device(std::move(dev));
        } catch (const std::exception& e) {
            fail(line, e.what());
        }
    }

    ckt.finalize();
    if (ckt.size() == 0) throw std::invalid_argument("netlist: empty circuit");
    return net;
}

Netlist parse_netlist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open netlist '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_netlist(ss.str());
}

}  // namespace specsim
