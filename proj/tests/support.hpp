#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "gridflux/mna/dae_system.hpp"
#include "gridflux/netlist/document.hpp"
#include "gridflux/netlist/elaborate.hpp"

namespace testsupport {

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(GRIDFLUX_FIXTURES) + "/" + name, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Netlist text -> stamped system, keeping the intermediate stages alive.
struct Built {
    gridflux::netlist::NetlistDocument doc;
    gridflux::netlist::FlatCircuit flat;
    gridflux::mna::SystemLayout layout;
    gridflux::mna::DaeSystem sys;

    explicit Built(gridflux::netlist::NetlistDocument d)
        : doc(std::move(d)),
          flat(gridflux::netlist::elaborate(doc)),
          layout(gridflux::mna::build_layout(flat)),
          sys(flat, layout) {}

    std::size_t at(const std::string& var) const {
        auto i = layout.index_of(var);
        if (!i) throw std::runtime_error("no variable " + var);
        return *i;
    }
};

inline Built build(const std::string& text) { return Built(gridflux::netlist::parse_netlist(text)); }

}  // namespace testsupport
