#include <stdexcept>

#include "gridflux/acgrid/devices.hpp"
#include "gridflux/acgrid/library.hpp"

namespace gridflux::acgrid {

using netlist::DeviceCard;
using netlist::DeviceKind;
using netlist::Expr;

namespace {

DeviceCard x_card(std::string name, std::vector<std::string> nodes, std::string subckt, netlist::ParamList params) {
    DeviceCard c;
    c.kind = DeviceKind::Instance;
    c.name = std::move(name);
    c.nodes = std::move(nodes);
    c.subckt = std::move(subckt);
    c.params = std::move(params);
    return c;
}

}  // namespace

DeviceCard slack_instance(const SlackSpec& s) {
    if (!(s.v_mag > 0.0)) throw std::invalid_argument("slack voltage magnitude must be positive");
    return x_card("Xslack_" + s.bus.name, {s.bus.node_r, s.bus.node_i}, "SLACK",
                  {{"VMAG", Expr::number(s.v_mag)}, {"VANG", Expr::number(s.v_angle)}});
}

DeviceCard cpl_instance(const CplSpec& c) {
    if (!(c.curr_lim > 0.0)) throw std::invalid_argument("CPL current limit must be positive");
    return x_card("Xload_" + c.bus.name, {c.bus.node_r, c.bus.node_i}, "CPL",
                  {{"P", Expr::number(c.p)}, {"Q", Expr::number(c.q)}, {"CurrLim", Expr::number(c.curr_lim)}});
}

DeviceCard branch_instance(const BranchSpec& b) {
    if (b.x == 0.0) throw std::invalid_argument("branch reactance must be nonzero");
    return x_card("Xbr_" + b.from.name + "_" + b.to.name, {b.from.node_r, b.from.node_i, b.to.node_r, b.to.node_i},
                  "ACBRANCH", {{"X", Expr::number(b.x)}});
}

DeviceCard machine_instance(const MachineSpec& m) {
    if (!(m.h > 0.0) || !(m.xd_p > 0.0)) throw std::invalid_argument("machine needs H > 0 and XDP > 0");
    return x_card("Xgen_" + m.bus.name, {m.bus.node_r, m.bus.node_i}, "MACHINE",
                  {{"H", Expr::number(m.h)},
                   {"D", Expr::number(m.d)},
                   {"XDP", Expr::number(m.xd_p)},
                   {"PM", Expr::number(m.p_mech)},
                   {"E", Expr::number(m.e_mag)},
                   {"OMEGA_S", Expr::number(m.omega_s)},
                   {"AVR", Expr::number(m.avr ? 1.0 : 0.0)},
                   {"VSET", Expr::number(m.v_set)}});
}

std::vector<DeviceCard> emit_slack(const SlackSpec& s) { return expand_instance(slack_instance(s)); }
std::vector<DeviceCard> emit_cpl(const CplSpec& c) { return expand_instance(cpl_instance(c)); }
std::vector<DeviceCard> emit_branch(const BranchSpec& b) { return expand_instance(branch_instance(b)); }
std::vector<DeviceCard> emit_machine(const MachineSpec& m) { return expand_instance(machine_instance(m)); }

}  // namespace gridflux::acgrid
