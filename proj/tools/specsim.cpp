#include <CLI11.hpp>

#include "specsim/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"specsim - stochastic spectral circuit simulator"};
    app.require_subcommand(1);

    specsim::RunConfig cfg;
    CLI::App* run = app.add_subcommand("run", "run an analysis from a netlist");
    run->add_option("netlist", cfg.netlist_path, "netlist file")->required();
    run->add_option("--method", cfg.method, "st | sg | sc | mc")
        ->check(CLI::IsMember({"st", "sg", "sc", "mc"}));
    run->add_option("--order", cfg.order, "gPC total-degree order p");
    run->add_option("--beta", cfg.beta, "testing-point selection threshold");
    run->add_option("--quad", cfg.quad, "candidate/collocation rule: auto | tensor | smolyak")
        ->check(CLI::IsMember({"auto", "tensor", "smolyak"}));
    run->add_option("--level", cfg.level, "smolyak level (default p+1)");
    run->add_option("--samples", cfg.samples, "Monte Carlo sample count");
    run->add_option("--seed", cfg.seed, "random seed");
    run->add_option("--out", cfg.out_dir, "output directory");
    run->add_option("--format", cfg.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--analysis", cfg.analysis, "all | dc | tran | pss")
        ->check(CLI::IsMember({"all", "dc", "tran", "pss"}));
    run->add_option("--steps-per-period", cfg.steps_per_period, "PSS shooting grid");
    run->add_option("--st-mode", cfg.st_mode, "decoupled | coupled Newton linear algebra")
        ->check(CLI::IsMember({"decoupled", "coupled"}));

    std::string dir_a, dir_b;
    double tol = 1e-8;
    CLI::App* cmp = app.add_subcommand("compare", "compare two result directories");
    cmp->add_option("a", dir_a, "first result directory")->required();
    cmp->add_option("b", dir_b, "second result directory")->required();
    cmp->add_option("--tol", tol, "max L2 coefficient difference to pass");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : specsim::kConfigError;
    }

    if (run->parsed()) return specsim::run(cfg);
    return specsim::compare(dir_a, dir_b, tol);
}
