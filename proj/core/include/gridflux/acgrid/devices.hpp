#pragma once

#include <string>
#include <vector>

#include "gridflux/netlist/document.hpp"

namespace gridflux::acgrid {

/// Node pair <name>R / <name>I.
struct BusPair {
    std::string name;
    std::string node_r;
    std::string node_i;

    static BusPair named(const std::string& name) { return {name, name + "R", name + "I"}; }
};

struct SlackSpec {
    BusPair bus;
    double v_mag = 1.0;
    double v_angle = 0.0;  // rad
};

struct CplSpec {
    BusPair bus;
    double p = 0.0;
    double q = 0.0;
    double curr_lim = 1000.0;
};

struct BranchSpec {
    BusPair from;
    BusPair to;
    double x = 0.1;
};

inline constexpr double kOmegaSync = 376.99111843077515;  // 2*pi*60

struct MachineSpec {
    BusPair bus;
    double h = 3.0;
    double d = 0.5;
    double xd_p = 0.2;
    double p_mech = 0.5;
    double e_mag = 1.0;
    double omega_s = kOmegaSync;
    /// Integral voltage regulator holding |V_bus| at v_set (0 = fixed E).
    bool avr = false;
    double v_set = 1.0;
};

// X cards against the shipped library. Instance names are derived from the
// bus names (Xslack_<bus>, Xload_<bus>, Xbr_<from>_<to>, Xgen_<bus>).
netlist::DeviceCard slack_instance(const SlackSpec& s);
netlist::DeviceCard cpl_instance(const CplSpec& c);
netlist::DeviceCard branch_instance(const BranchSpec& b);
netlist::DeviceCard machine_instance(const MachineSpec& m);

// The same devices expanded to primitive V/B/R/C/L cards.
std::vector<netlist::DeviceCard> emit_slack(const SlackSpec& s);
std::vector<netlist::DeviceCard> emit_cpl(const CplSpec& c);
std::vector<netlist::DeviceCard> emit_branch(const BranchSpec& b);
std::vector<netlist::DeviceCard> emit_machine(const MachineSpec& m);

}  // namespace gridflux::acgrid
