#pragma once

#include <string>
#include <vector>

#include "specsim/circuit.hpp"

namespace specsim {

/// Analysis request parsed from a netlist card.
struct Analysis {
    enum class Kind { Dc, Tran, PssForced, PssAuto } kind = Kind::Dc;
    double tstop = 0.0;    // .tran
    double lte_tol = 0.0;  // .tran optional tolerance (0 = default)
    double period = 0.0;   // .pss T / .pss auto T0
    std::string node;      // .pss auto phase node
    double level = 0.0;    // .pss auto lambda
};

struct Netlist {
    Circuit circuit;
    std::vector<Analysis> analyses;
};

/// Parse a SPICE-like netlist (see README for the grammar). Errors carry the
/// offending line number.
Netlist parse_netlist(const std::string& text);

Netlist parse_netlist_file(const std::string& path);

}  // namespace specsim
