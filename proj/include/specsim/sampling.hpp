#pragma once

#include <cstdint>
#include <random>

#include "specsim/distribution.hpp"

namespace specsim {

/// Deterministic per-sample random stream: sample i of a run seeded with s
/// draws from an engine keyed by (s, i), so results do not depend on
/// evaluation order or worker count. Distribution transforms are spelled
/// out (Box-Muller, Marsaglia-Tsang) instead of using std:: distributions,
/// whose output is implementation-defined.
class SampleStream {
public:
    SampleStream(std::uint64_t seed, std::uint64_t index);

    double uniform01();              // (0, 1)
    double normal();                 // standard normal
    double gamma(double shape);      // Gamma(shape, 1)
    double draw(const Distribution& dist);

private:
    std::mt19937_64 eng_;
};

}  // namespace specsim
