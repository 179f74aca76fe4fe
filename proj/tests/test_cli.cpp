#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "specsim/results_io.hpp"
#include "specsim/runner.hpp"

using namespace specsim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_netlist(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

const char* kDividerNet = R"(
param xi1 uniform
v1 1 0 1
r1 1 2 1k
r2 2 0 1k*(1+0.1*xi1)
.dc
)";

const char* kAffineNet = R"(
param xi1 uniform
i1 0 1 1m*(1+0.2*xi1)
r1 1 0 1k
.dc
)";
}  // namespace

TEST_CASE("st dc run writes summary and coefficients") {
    TempDir tmp("specsim_cli_st");
    write_netlist(tmp.file("div.sp"), kDividerNet);
    RunConfig cfg;
    cfg.netlist_path = tmp.file("div.sp");
    cfg.method = "st";
    cfg.order = 3;
    cfg.out_dir = tmp.file("out");
    REQUIRE(run(cfg) == kRunOk);

    const json summary = json::parse(read_text_file(tmp.file("out/summary.json")));
    CHECK(summary.at("K") == 4);  // d=1, p=3
    CHECK(summary.at("n_hat") == 4);
    CHECK(summary.at("cond_V").get<double>() > 1.0);
    CHECK(summary.contains("analyses"));
    CHECK(fs::exists(tmp.file("out/dc.csv")));
    CHECK(fs::exists(tmp.file("out/timing.json")));

    const WaveformData w = read_waveform(tmp.file("out/dc.csv"));
    CHECK(w.K == 4);
    CHECK(w.times.size() == 1);
    CHECK(w.names.size() == 3);
}

TEST_CASE("csv round trip preserves doubles exactly") {
    TempDir tmp("specsim_cli_rt");
    write_netlist(tmp.file("div.sp"), kDividerNet);
    for (const char* format : {"csv", "json"}) {
        RunConfig cfg;
        cfg.netlist_path = tmp.file("div.sp");
        cfg.out_dir = tmp.file(std::string("out_") + format);
        cfg.format = format;
        REQUIRE(run(cfg) == kRunOk);
        const WaveformData w =
            read_waveform(cfg.out_dir + "/dc." + std::string(format));
        // write the parsed table again and compare bytes
        UqResult r;
        r.method = "st";
        r.K = w.K;
        r.names = w.names;
        r.times = w.times;
        r.coeffs = w.coeffs;
        r.mean = w.mean;
        r.stddev = w.stddev;
        const std::string again = cfg.out_dir + "/again." + std::string(format);
        if (std::string(format) == "csv")
            write_waveform_csv(again, r);
        else
            write_waveform_json(again, r);
        CHECK(read_text_file(again) ==
              read_text_file(cfg.out_dir + "/dc." + std::string(format)));
    }
}

TEST_CASE("mc runs are bit identical for a fixed seed") {
    TempDir tmp("specsim_cli_mc");
    write_netlist(tmp.file("div.sp"), kDividerNet);
    RunConfig cfg;
    cfg.netlist_path = tmp.file("div.sp");
    cfg.method = "mc";
    cfg.samples = 400;
    cfg.seed = 123;
    cfg.out_dir = tmp.file("a");
    REQUIRE(run(cfg) == kRunOk);
    cfg.out_dir = tmp.file("b");
    REQUIRE(run(cfg) == kRunOk);
    CHECK(read_text_file(tmp.file("a/dc.csv")) == read_text_file(tmp.file("b/dc.csv")));
    // summary excludes wall time, so it is byte-stable too
    CHECK(read_text_file(tmp.file("a/summary.json")) ==
          read_text_file(tmp.file("b/summary.json")));
}

TEST_CASE("missing netlist exits with a config error naming the path") {
    TempDir tmp("specsim_cli_missing");
    RunConfig cfg;
    cfg.netlist_path = tmp.file("nope.sp");
    cfg.out_dir = tmp.file("out");
    CHECK(run(cfg) == kConfigError);
    const json err = json::parse(read_text_file(tmp.file("out/error.json")));
    CHECK(err.at("error").get<std::string>().find("nope.sp") != std::string::npos);
    CHECK(err.at("kind") == "config");
}

TEST_CASE("config validation failures") {
    TempDir tmp("specsim_cli_val");
    write_netlist(tmp.file("div.sp"), kDividerNet);
    RunConfig cfg;
    cfg.netlist_path = tmp.file("div.sp");
    cfg.out_dir = tmp.file("out");
    cfg.method = "bogus";
    CHECK(run(cfg) == kConfigError);
    cfg.method = "st";
    cfg.order = 11;
    CHECK(run(cfg) == kConfigError);
    cfg.order = 3;
    cfg.beta = 2.0;
    CHECK(run(cfg) == kConfigError);

    // pss cards require the st method
    write_netlist(tmp.file("pss.sp"),
                  "param xi1 uniform\nv1 1 0 sin(0 1 1k)\nr1 1 2 1k\nc1 2 0 1u\n.pss 1m\n");
    RunConfig pss;
    pss.netlist_path = tmp.file("pss.sp");
    pss.out_dir = tmp.file("out2");
    pss.method = "mc";
    CHECK(run(pss) == kConfigError);
}

TEST_CASE("solver failures exit with status 3") {
    TempDir tmp("specsim_cli_solver");
    // floating capacitor node: singular DC Jacobian
    write_netlist(tmp.file("bad.sp"),
                  "param xi1 uniform\nv1 1 0 1\nr1 1 0 1k\nc1 2 0 1u\n.dc\n");
    RunConfig cfg;
    cfg.netlist_path = tmp.file("bad.sp");
    cfg.out_dir = tmp.file("out");
    CHECK(run(cfg) == kSolverError);
    const json err = json::parse(read_text_file(tmp.file("out/error.json")));
    CHECK(err.at("kind") == "solver");
}

TEST_CASE("compare: st vs sg on an affine circuit passes") {
    TempDir tmp("specsim_cli_cmp");
    write_netlist(tmp.file("aff.sp"), kAffineNet);
    RunConfig cfg;
    cfg.netlist_path = tmp.file("aff.sp");
    cfg.out_dir = tmp.file("st");
    cfg.method = "st";
    REQUIRE(run(cfg) == kRunOk);
    cfg.out_dir = tmp.file("sg");
    cfg.method = "sg";
    REQUIRE(run(cfg) == kRunOk);

    CompareReport rep;
    CHECK(compare(tmp.file("st"), tmp.file("sg"), 1e-8, &rep) == kRunOk);
    CHECK(rep.pass);
    CHECK(rep.max_l2 < 1e-8);

    // a run compared with itself is exactly zero
    CHECK(compare(tmp.file("st"), tmp.file("st"), 0.0, &rep) == kRunOk);
    CHECK(rep.max_l2 == 0.0);

    // mismatched order is a validation error
    cfg.out_dir = tmp.file("p2");
    cfg.method = "st";
    cfg.order = 2;
    REQUIRE(run(cfg) == kRunOk);
    CHECK(compare(tmp.file("st"), tmp.file("p2"), 1e-8) == kConfigError);

    // failing tolerance reports kCompareFailed
    cfg.out_dir = tmp.file("mcdir");
    cfg.method = "mc";
    REQUIRE(run(cfg) == kRunOk);
    CHECK(compare(tmp.file("st"), tmp.file("mcdir"), 1e-8) == kConfigError);  // no coeffs
}

TEST_CASE("tran and pss through the runner") {
    TempDir tmp("specsim_cli_tran");
    write_netlist(tmp.file("rc.sp"), R"(
param xi1 uniform
v1 1 0 sin(0 1 1k)
r1 1 2 1k*(1+0.1*xi1)
c1 2 0 1u
.tran 2m
.pss 1m
)");
    RunConfig cfg;
    cfg.netlist_path = tmp.file("rc.sp");
    cfg.out_dir = tmp.file("out");
    cfg.method = "st";
    cfg.order = 2;
    REQUIRE(run(cfg) == kRunOk);
    CHECK(fs::exists(tmp.file("out/transient.csv")));
    CHECK(fs::exists(tmp.file("out/pss.csv")));
    CHECK(fs::exists(tmp.file("out/thd_density.csv")));
    CHECK(fs::exists(tmp.file("out/power_density.csv")));
    const json summary = json::parse(read_text_file(tmp.file("out/summary.json")));
    CHECK(summary.at("analyses").contains("transient"));
    CHECK(summary.at("analyses").at("pss").at("iterations").get<int>() <= 6);

    // analysis filter: only the transient card runs
    cfg.out_dir = tmp.file("only_tran");
    cfg.analysis = "tran";
    REQUIRE(run(cfg) == kRunOk);
    CHECK(fs::exists(tmp.file("only_tran/transient.csv")));
    CHECK_FALSE(fs::exists(tmp.file("only_tran/pss.csv")));
}
