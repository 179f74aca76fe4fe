#include "specsim/results_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace specsim {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_waveform_csv(const std::string& path, const UqResult& r) {
    std::ostringstream out;
    out << "time";
    const bool with_coeffs = !r.coeffs.empty();
    for (size_t o = 0; o < r.names.size(); ++o) {
        out << ',' << r.names[o] << ":mean," << r.names[o] << ":std";
        if (with_coeffs)
            for (int k = 1; k <= r.K; ++k) out << ',' << r.names[o] << ":c" << k;
    }
    out << '\n';
    const int n = static_cast<int>(r.names.size());
    for (size_t m = 0; m < r.times.size(); ++m) {
        out << format_double(r.times[m]);
        for (int o = 0; o < n; ++o) {
            out << ',' << format_double(r.mean[m][o]) << ',' << format_double(r.stddev[m][o]);
            if (with_coeffs)
                for (int k = 0; k < r.K; ++k)
                    out << ',' << format_double(r.coeffs[m][k * n + o]);
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

void write_waveform_json(const std::string& path, const UqResult& r) {
    json j;
    j["times"] = r.times;
    j["K"] = r.coeffs.empty() ? 0 : r.K;
    const int n = static_cast<int>(r.names.size());
    json outputs = json::object();
    for (int o = 0; o < n; ++o) {
        json entry;
        std::vector<double> mean, sd;
        for (size_t m = 0; m < r.times.size(); ++m) {
            mean.push_back(r.mean[m][o]);
            sd.push_back(r.stddev[m][o]);
        }
        entry["mean"] = mean;
        entry["std"] = sd;
        if (!r.coeffs.empty()) {
            std::vector<std::vector<double>> cc;
            for (size_t m = 0; m < r.times.size(); ++m) {
                std::vector<double> row(r.K);
                for (int k = 0; k < r.K; ++k) row[k] = r.coeffs[m][k * n + o];
                cc.push_back(std::move(row));
            }
            entry["coeff"] = cc;
        }
        outputs[r.names[o]] = std::move(entry);
    }
    j["outputs"] = std::move(outputs);
    write_text_file(path, j.dump(2) + "\n");
}

void write_density_csv(const std::string& path, const DensityEstimate& d) {
    std::ostringstream out;
    out << "value,density\n";
    for (size_t i = 0; i < d.value.size(); ++i)
        out << format_double(d.value[i]) << ',' << format_double(d.density[i]) << '\n';
    write_text_file(path, out.str());
}

namespace {
std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

WaveformData read_waveform_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty waveform file " + path);
    const auto header = split(line, ',');
    WaveformData w;
    // columns: time, then per output mean/std[/c1..cK]
    int K = 0;
    std::vector<std::string> names;
    for (size_t c = 1; c < header.size(); ++c) {
        const auto pos = header[c].rfind(':');
        const std::string name = header[c].substr(0, pos);
        const std::string field = header[c].substr(pos + 1);
        if (names.empty() || names.back() != name) names.push_back(name);
        if (names.size() == 1 && field.size() > 1 && field[0] == 'c')
            K = std::max(K, std::atoi(field.c_str() + 1));
    }
    w.names = names;
    w.K = K;
    const int n = static_cast<int>(names.size());
    const int per_output = 2 + K;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (static_cast<int>(cells.size()) != 1 + n * per_output)
            throw std::runtime_error("malformed waveform row in " + path);
        w.times.push_back(std::stod(cells[0]));
        Eigen::VectorXd mean(n), sd(n), coeffs(K * n);
        for (int o = 0; o < n; ++o) {
            const int base = 1 + o * per_output;
            mean[o] = std::stod(cells[base]);
            sd[o] = std::stod(cells[base + 1]);
            for (int k = 0; k < K; ++k) coeffs[k * n + o] = std::stod(cells[base + 2 + k]);
        }
        w.mean.push_back(std::move(mean));
        w.stddev.push_back(std::move(sd));
        if (K > 0) w.coeffs.push_back(std::move(coeffs));
    }
    return w;
}

WaveformData read_waveform_json(const std::string& path) {
    json j = json::parse(read_text_file(path));
    WaveformData w;
    w.times = j.at("times").get<std::vector<double>>();
    w.K = j.at("K").get<int>();
    for (auto it = j.at("outputs").begin(); it != j.at("outputs").end(); ++it)
        w.names.push_back(it.key());
    const int n = static_cast<int>(w.names.size());
    const size_t T = w.times.size();
    w.mean.assign(T, Eigen::VectorXd(n));
    w.stddev.assign(T, Eigen::VectorXd(n));
    if (w.K > 0) w.coeffs.assign(T, Eigen::VectorXd(w.K * n));
    for (int o = 0; o < n; ++o) {
        const json& entry = j.at("outputs").at(w.names[o]);
        const auto mean = entry.at("mean").get<std::vector<double>>();
        const auto sd = entry.at("std").get<std::vector<double>>();
        for (size_t m = 0; m < T; ++m) {
            w.mean[m][o] = mean[m];
            w.stddev[m][o] = sd[m];
        }
        if (w.K > 0) {
            const auto cc = entry.at("coeff").get<std::vector<std::vector<double>>>();
            for (size_t m = 0; m < T; ++m)
                for (int k = 0; k < w.K; ++k) w.coeffs[m][k * n + o] = cc[m][k];
        }
    }
    return w;
}
}  // namespace

WaveformData read_waveform(const std::string& path) {
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
        return read_waveform_json(path);
    return read_waveform_csv(path);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace specsim
