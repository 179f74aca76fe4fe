#pragma once

#include <string>
#include <vector>

#include "specsim/pss.hpp"
#include "specsim/spectral.hpp"

namespace specsim {

/// Waveform tables are written with one row per time point and per-output
/// column groups `<output>:mean,<output>:std,<output>:c1..cK` (no coefficient
/// columns for Monte Carlo), at full double precision.
void write_waveform_csv(const std::string& path, const UqResult& result);
void write_waveform_json(const std::string& path, const UqResult& result);

void write_density_csv(const std::string& path, const DensityEstimate& density);

/// Waveform data read back for comparisons.
struct WaveformData {
    std::vector<std::string> names;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> coeffs;  // per time, K*n stacked (may be empty)
    std::vector<Eigen::VectorXd> mean, stddev;
    int K = 0;
};

WaveformData read_waveform(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Full-precision double formatting used in all CSV output.
std::string format_double(double v);

}  // namespace specsim
