#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace specsim {

/// Effective configuration of one `specsim run` invocation.
struct RunConfig {
    std::string netlist_path;
    std::string method = "st";      // st | sg | sc | mc
    int order = 3;                  // gPC order p
    double beta = 1e-2;             // testing-point acceptance threshold
    std::string quad = "auto";      // auto | tensor | smolyak
    int level = 0;                  // smolyak level (0: p+1)
    long samples = 10000;           // MC sample count
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string format = "csv";     // csv | json
    std::string analysis = "all";   // all | dc | tran | pss
    int steps_per_period = 200;     // PSS shooting grid
    std::string st_mode = "decoupled";  // decoupled | coupled
};

/// Exit statuses shared by the library entry points and the CLI.
enum RunStatus : int {
    kRunOk = 0,
    kCompareFailed = 1,
    kConfigError = 2,
    kSolverError = 3,
};

/// Execute a full run: parse, dispatch every requested analysis, write
/// result files into the output directory. Never throws; failures are
/// reported through the status and an error.json record.
int run(const RunConfig& config);

struct CompareReport {
    double max_l2 = 0.0;
    double mean_l2 = 0.0;
    long points = 0;
    bool pass = false;
    std::string detail;
};

/// Compare the coefficient vectors of two result directories over the same
/// circuit and basis; the report is also written to stdout as JSON.
int compare(const std::string& dir_a, const std::string& dir_b, double tolerance,
            CompareReport* report = nullptr);

}  // namespace specsim
