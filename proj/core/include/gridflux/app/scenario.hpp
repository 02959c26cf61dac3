#pragma once

#include <map>
#include <string>

#include "gridflux/acgrid/devices.hpp"
#include "gridflux/hvdc/hvdc.hpp"
#include "gridflux/netlist/document.hpp"

namespace gridflux::app {

/// The four-bus, two-area system with an HVDC link between bus 1 and bus 2.
/// Reconstructed topology: infinite bus at bus 2, machine at bus 4, constant
/// power load at bus 3, rectifier at bus 1, inverter at bus 2.
struct ScenarioConfig {
    double x_12 = 0.2, x_13 = 0.1, x_14 = 0.1, x_23 = 0.1;
    double v_2 = 1.0;
    double v_4 = 1.0971;
    hvdc::HvdcParams hvdc;
    hvdc::HvdcControlParams control;
    /// H, D, x_d' are used; p_mech sets the machine dispatch. The AVR holds
    /// |V_4| at v_4.
    acgrid::MachineSpec machine{acgrid::BusPair::named("Bus4"), 3.0, 0.5, 0.2, 0.5, 1.0,
                                acgrid::kOmegaSync, true, 1.0971};
    double load_p = 0.9, load_q = 0.49;
    /// Remaining GENROU data, carried for reference only.
    std::map<std::string, double> genrou = {
        {"Td_p", 7.0}, {"Td_pp", 0.03}, {"Tq_p", 0.75}, {"Tq_pp", 0.05}, {"xd", 2.1},  {"xq", 0.5},
        {"xq_p", 0.25}, {"xd_pp", 0.18}, {"xq_pp", 0.18}, {"xl", 0.15}, {"ra", 0.0},
    };
    double t_stop = 200.0;
    double step_h = 0.01;
};

/// Overrides fields from a JSON object (see README for the keys). Throws
/// std::invalid_argument on unknown keys or a malformed file.
ScenarioConfig load_scenario_config(const std::string& path, ScenarioConfig base = {});

netlist::NetlistDocument build_case4bus(const ScenarioConfig& sc);

}  // namespace gridflux::app
