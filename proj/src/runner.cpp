#include "specsim/runner.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "specsim/netlist.hpp"
#include "specsim/pss.hpp"
#include "specsim/results_io.hpp"

namespace specsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double elapsed_s(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

RuleND make_rule(const RunConfig& cfg, const GpcBasis& basis, bool for_galerkin,
                 const Circuit& circuit) {
    const int d = basis.dim();
    std::string kind = cfg.quad;
    if (kind == "auto") kind = d <= 3 ? "tensor" : "smolyak";
    if (kind == "tensor") {
        if (for_galerkin) return default_sg_quadrature(circuit, basis);
        std::vector<Rule1D> rules;
        for (int j = 0; j < d; ++j)
            rules.push_back(gauss_rule(basis.distribution(j), basis.order() + 1));
        return tensor_grid(rules);
    }
    if (kind == "smolyak") {
        if (d < 2)
            throw ConfigError("smolyak quadrature needs at least two parameters");
        const int level = cfg.level > 0 ? cfg.level : basis.order() + 1;
        return smolyak_grid(basis.distributions(), level);
    }
    throw ConfigError("unknown quadrature kind '" + cfg.quad + "'");
}

std::string analysis_tag(const Analysis& an) {
    switch (an.kind) {
        case Analysis::Kind::Dc: return "dc";
        case Analysis::Kind::Tran: return "transient";
        case Analysis::Kind::PssForced:
        case Analysis::Kind::PssAuto: return "pss";
    }
    return "?";
}

bool analysis_selected(const RunConfig& cfg, const Analysis& an) {
    if (cfg.analysis == "all") return true;
    const std::string tag = analysis_tag(an);
    if (cfg.analysis == "tran") return tag == "transient";
    return cfg.analysis == tag;
}

void write_result(const RunConfig& cfg, const std::string& name, const UqResult& r) {
    const std::string path = cfg.out_dir + "/" + name + "." + cfg.format;
    if (cfg.format == "json")
        write_waveform_json(path, r);
    else
        write_waveform_csv(path, r);
}

json config_json(const RunConfig& cfg) {
    return json{{"netlist", cfg.netlist_path},
                {"method", cfg.method},
                {"order", cfg.order},
                {"beta", cfg.beta},
                {"quad", cfg.quad},
                {"level", cfg.level},
                {"samples", cfg.samples},
                {"seed", cfg.seed},
                {"out", cfg.out_dir},
                {"format", cfg.format},
                {"analysis", cfg.analysis},
                {"steps_per_period", cfg.steps_per_period},
                {"st_mode", cfg.st_mode}};
}

struct AnalysisLog {
    json j;
};

UqResult run_intrusive_dc(const RunConfig& cfg, const Circuit& circuit, GpcBasisPtr basis,
                          const TestingSet* tset, const RuleND* sg_quad, json& log) {
    const NewtonOptions nopts;
    NewtonStats stats;
    GpcState state;
    if (cfg.method == "st") {
        StSystem sys(circuit, basis, *tset,
                     cfg.st_mode == "coupled" ? StSystem::Mode::Coupled
                                              : StSystem::Mode::Decoupled);
        state = st_solve_dc(sys, nopts, std::nullopt, &stats);
    } else {
        SgSystem sys(circuit, basis, *sg_quad);
        state = sg_solve_dc(sys, nopts, std::nullopt, &stats);
    }
    log["newton_iterations"] = stats.iterations;
    log["residual"] = stats.residual_norm;
    return uq_from_states(cfg.method, circuit, basis, {0.0}, {state.coeffs});
}

UqResult run_intrusive_tran(const RunConfig& cfg, const Circuit& circuit, GpcBasisPtr basis,
                            const TestingSet* tset, const RuleND* sg_quad,
                            const Analysis& an, json& log) {
    const NewtonOptions nopts;
    StepController ctrl;
    if (an.lte_tol > 0.0) ctrl.lte_tol = an.lte_tol;
    Trajectory traj;
    if (cfg.method == "st") {
        StSystem sys(circuit, basis, *tset,
                     cfg.st_mode == "coupled" ? StSystem::Mode::Coupled
                                              : StSystem::Mode::Decoupled);
        traj = st_solve_transient(sys, 0.0, an.tstop, ctrl, nopts);
    } else {
        SgSystem sys(circuit, basis, *sg_quad);
        traj = sg_solve_transient(sys, 0.0, an.tstop, ctrl, nopts);
    }
    if (!traj.completed)
        throw std::runtime_error("transient aborted: " + traj.abort_reason);
    log["steps_accepted"] = traj.accepted;
    log["steps_rejected"] = traj.rejected;
    log["newton_iterations"] = traj.newton_iterations;
    UqResult r = uq_from_states(cfg.method, circuit, basis, traj.times, traj.states);
    r.steps_accepted = traj.accepted;
    r.steps_rejected = traj.rejected;
    return r;
}

UqResult run_pss(const RunConfig& cfg, const Circuit& circuit, GpcBasisPtr basis,
                 const TestingSet& tset, const Analysis& an, json& log) {
    if (cfg.method != "st")
        throw ConfigError("periodic steady-state analysis requires --method st");
    StSystem sys(circuit, basis, tset,
                 cfg.st_mode == "coupled" ? StSystem::Mode::Coupled
                                          : StSystem::Mode::Decoupled);
    const int n = circuit.size();
    UqResult r;
    if (an.kind == Analysis::Kind::PssForced) {
        ForcedShootingProblem prob;
        prob.period = an.period;
        prob.opts.steps_per_period = cfg.steps_per_period;
        ForcedPssResult res = shoot_forced(sys, prob);
        log["iterations"] = res.iterations;
        log["residual"] = res.residual;
        r = uq_from_states(cfg.method, circuit, basis, res.times, res.states);

        // node densities: THD on the first non-ground node, source power
        if (circuit.node_count() > 0) {
            const PssStatistics thd = pss_thd(circuit, res, 0, 10000, cfg.seed);
            write_density_csv(cfg.out_dir + "/thd_density.csv", thd.density);
            log["thd"] = {{"mean", thd.mean},
                          {"std", thd.stddev},
                          {"undefined_samples", thd.undefined},
                          {"node", circuit.unknown_name(0)}};
        }
        const PssStatistics pw = pss_power(circuit, res, 10000, cfg.seed);
        write_density_csv(cfg.out_dir + "/power_density.csv", pw.density);
        log["power"] = {{"mean", pw.mean}, {"std", pw.stddev}};
    } else {
        const int phase_index = circuit.node_index(an.node);
        const OscillatorPilot pilot = autonomous_pilot(circuit, circuit.nominal_xi(),
                                                       an.period, phase_index, an.level);
        AutonomousShootingProblem prob;
        prob.t_ref = an.period;
        prob.phase_index = phase_index;
        prob.phase_level = an.level;
        prob.opts.steps_per_period = cfg.steps_per_period;
        prob.initial_state = pilot.state_at_crossing;
        AutonomousPssResult res = shoot_autonomous(sys, prob);
        log["iterations"] = res.iterations;
        log["residual"] = res.residual;
        log["t_ref"] = res.t_ref;
        log["pilot_period"] = pilot.period;
        log["a_coeffs"] = std::vector<double>(res.a_coeffs.data(),
                                              res.a_coeffs.data() + res.a_coeffs.size());
        r = uq_from_states(cfg.method, circuit, basis, res.tau, res.states);

        const PssStatistics freq = pss_frequency(circuit, res, 10000, cfg.seed);
        write_density_csv(cfg.out_dir + "/frequency_density.csv", freq.density);
        log["frequency"] = {{"mean", freq.mean}, {"std", freq.stddev}};
    }
    (void)n;
    return r;
}

}  // namespace

int run(const RunConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    json summary;
    json timing;
    try {
        if (cfg.method != "st" && cfg.method != "sg" && cfg.method != "sc" &&
            cfg.method != "mc")
            throw ConfigError("unknown method '" + cfg.method + "'");
        if (cfg.format != "csv" && cfg.format != "json")
            throw ConfigError("unknown format '" + cfg.format + "'");
        if (cfg.order < 0 || cfg.order > 8) throw ConfigError("order must be in [0, 8]");
        if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) throw ConfigError("beta must be in (0,1)");

        Netlist net;
        try {
            net = parse_netlist_file(cfg.netlist_path);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        const Circuit& circuit = net.circuit;
        if (circuit.dim() == 0 && cfg.method != "mc")
            throw ConfigError("netlist declares no random parameters");

        fs::create_directories(cfg.out_dir);
        summary["config"] = config_json(cfg);
        summary["circuit"] = {{"unknowns", circuit.size()},
                              {"nodes", circuit.node_count()},
                              {"parameters", circuit.dim()}};

        auto basis = std::make_shared<const GpcBasis>(circuit.param_dists(), cfg.order);
        summary["K"] = basis->size();

        // method-specific setup
        std::optional<TestingSet> tset;
        std::optional<RuleND> quad;
        if (cfg.method == "st") {
            const RuleND candidates = make_rule(cfg, *basis, false, circuit);
            tset = select_testing_points(candidates, *basis, cfg.beta);
            summary["n_hat"] = candidates.count();
            summary["kappa_samp"] = sampling_speedup_ratio(candidates, *basis);
            summary["cond_V"] = tset->cond;
        } else if (cfg.method == "sg") {
            quad = make_rule(cfg, *basis, true, circuit);
            summary["n_hat"] = quad->count();
        } else if (cfg.method == "sc") {
            quad = make_rule(cfg, *basis, false, circuit);
            summary["n_hat"] = quad->count();
            summary["kappa_samp"] = sampling_speedup_ratio(*quad, *basis);
        } else {
            summary["n_hat"] = cfg.samples;
        }

        bool ran_any = false;
        json analyses = json::object();
        for (const Analysis& an : net.analyses) {
            if (!analysis_selected(cfg, an)) continue;
            const std::string tag = analysis_tag(an);
            json log;
            const auto t_an = std::chrono::steady_clock::now();
            UqResult r;
            if (an.kind == Analysis::Kind::Dc) {
                if (cfg.method == "st" || cfg.method == "sg") {
                    r = run_intrusive_dc(cfg, circuit, basis, tset ? &*tset : nullptr,
                                         quad ? &*quad : nullptr, log);
                } else if (cfg.method == "sc") {
                    ScAnalysis sc;
                    sc.kind = ScAnalysis::Kind::Dc;
                    r = sc_solve(circuit, basis, *quad, sc);
                } else {
                    McAnalysis mc;
                    mc.kind = McAnalysis::Kind::Dc;
                    r = mc_solve(circuit, cfg.samples, cfg.seed, mc);
                }
            } else if (an.kind == Analysis::Kind::Tran) {
                if (cfg.method == "st" || cfg.method == "sg") {
                    r = run_intrusive_tran(cfg, circuit, basis, tset ? &*tset : nullptr,
                                           quad ? &*quad : nullptr, an, log);
                } else if (cfg.method == "sc") {
                    ScAnalysis sc;
                    sc.kind = ScAnalysis::Kind::Transient;
                    sc.t1 = an.tstop;
                    if (an.lte_tol > 0.0) sc.pilot.lte_tol = an.lte_tol;
                    r = sc_solve(circuit, basis, *quad, sc);
                    log["fixed_step"] = r.fixed_step;
                    log["steps"] = r.steps_accepted;
                } else {
                    McAnalysis mc;
                    mc.kind = McAnalysis::Kind::Transient;
                    mc.t1 = an.tstop;
                    r = mc_solve(circuit, cfg.samples, cfg.seed, mc);
                    log["fixed_step"] = r.fixed_step;
                    log["failures"] = r.mc_failures;
                }
            } else {
                r = run_pss(cfg, circuit, basis, *tset, an, log);
            }
            r.seed = cfg.seed;
            write_result(cfg, tag, r);
            log["det_solves"] = r.det_solves;
            analyses[tag] = std::move(log);
            timing[tag + "_seconds"] = elapsed_s(t_an);
            ran_any = true;
        }
        if (!ran_any)
            throw ConfigError("no analysis card in the netlist matches --analysis " +
                              cfg.analysis);
        summary["analyses"] = std::move(analyses);
        write_text_file(cfg.out_dir + "/summary.json", summary.dump(2) + "\n");
        timing["total_seconds"] = elapsed_s(t_start);
        write_text_file(cfg.out_dir + "/timing.json", timing.dump(2) + "\n");
        return kRunOk;
    } catch (const ConfigError& e) {
        json err{{"error", e.what()}, {"kind", "config"}};
        std::cerr << err.dump() << "\n";
        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        if (!ec) {
            std::ofstream out(cfg.out_dir + "/error.json");
            out << err.dump(2) << "\n";
        }
        return kConfigError;
    } catch (const std::exception& e) {
        json err{{"error", e.what()}, {"kind", "solver"}};
        std::cerr << err.dump() << "\n";
        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        if (!ec) {
            std::ofstream out(cfg.out_dir + "/error.json");
            out << err.dump(2) << "\n";
        }
        return kSolverError;
    }
}

namespace {
Eigen::VectorXd interp_coeffs(const WaveformData& w, double t) {
    const auto it = std::lower_bound(w.times.begin(), w.times.end(), t);
    size_t hi = std::min<size_t>(it - w.times.begin(), w.times.size() - 1);
    if (hi == 0) return w.coeffs[0];
    const size_t lo = hi - 1;
    const double span = w.times[hi] - w.times[lo];
    const double frac = span > 0.0 ? (t - w.times[lo]) / span : 0.0;
    return w.coeffs[lo] + frac * (w.coeffs[hi] - w.coeffs[lo]);
}
}  // namespace

int compare(const std::string& dir_a, const std::string& dir_b, double tolerance,
            CompareReport* report) {
    try {
        json sum_a = json::parse(read_text_file(dir_a + "/summary.json"));
        json sum_b = json::parse(read_text_file(dir_b + "/summary.json"));
        if (sum_a.at("K") != sum_b.at("K") ||
            sum_a.at("config").at("order") != sum_b.at("config").at("order"))
            throw ConfigError("result directories use different bases (K or order differ)");

        CompareReport rep;
        bool found = false;
        for (const std::string tag : {"dc", "transient", "pss"}) {
            std::string pa, pb;
            for (const char* ext : {".csv", ".json"}) {
                if (fs::exists(dir_a + "/" + tag + ext)) pa = dir_a + "/" + tag + ext;
                if (fs::exists(dir_b + "/" + tag + ext)) pb = dir_b + "/" + tag + ext;
            }
            if (pa.empty() || pb.empty()) continue;
            const WaveformData wa = read_waveform(pa);
            const WaveformData wb = read_waveform(pb);
            if (wa.K == 0 || wb.K == 0)
                throw ConfigError(tag + ": no gPC coefficients to compare (MC run?)");
            if (wa.K != wb.K || wa.names != wb.names)
                throw ConfigError(tag + ": mismatched basis or output ordering");
            found = true;
            double acc = 0.0;
            for (size_t m = 0; m < wa.times.size(); ++m) {
                const Eigen::VectorXd diff =
                    wa.coeffs[m] - interp_coeffs(wb, wa.times[m]);
                const double l2 = diff.norm();
                rep.max_l2 = std::max(rep.max_l2, l2);
                acc += l2;
                ++rep.points;
            }
            rep.mean_l2 = rep.points ? acc / rep.points : 0.0;
        }
        if (!found) throw ConfigError("no common analysis results between the directories");
        rep.pass = rep.max_l2 <= tolerance;
        json out{{"max_l2", rep.max_l2},
                 {"mean_l2", rep.mean_l2},
                 {"points", rep.points},
                 {"tolerance", tolerance},
                 {"pass", rep.pass}};
        std::cout << out.dump(2) << "\n";
        if (report) *report = rep;
        return rep.pass ? kRunOk : kCompareFailed;
    } catch (const std::exception& e) {
        json err{{"error", e.what()}, {"kind", "config"}};
        std::cerr << err.dump() << "\n";
        return kConfigError;
    }
}

}  // namespace specsim
