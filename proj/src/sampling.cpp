#include "specsim/sampling.hpp"

#include <cmath>

namespace specsim {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t index)
    : eng_(splitmix64(splitmix64(seed) ^ (index + 0x51'7c'c1'b7'27'22'0a95ULL))) {}

double SampleStream::uniform01() {
    // 53-bit mantissa in (0,1); never returns 0
    const std::uint64_t r = eng_() >> 11;
    return (static_cast<double>(r) + 0.5) * (1.0 / 9007199254740992.0);
}

double SampleStream::normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double SampleStream::gamma(double shape) {
    if (shape < 1.0) {
        // boost to shape+1 and scale back
        const double u = uniform01();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double SampleStream::draw(const Distribution& dist) {
    switch (dist.family) {
        case DistFamily::Gaussian: return normal();
        case DistFamily::Uniform: return 2.0 * uniform01() - 1.0;
        case DistFamily::Gamma: return gamma(dist.shape1);
        case DistFamily::Beta: {
            const double x = gamma(dist.shape1);
            const double y = gamma(dist.shape2);
            return x / (x + y);
        }
    }
    return 0.0;
}

}  // namespace specsim
