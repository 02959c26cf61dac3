#include "gridflux/acgrid/library.hpp"

#include "gridflux/netlist/elaborate.hpp"

namespace gridflux::acgrid {

const netlist::NetlistDocument& powergrid_library() {
    static const netlist::NetlistDocument lib = netlist::parse_netlist(powergrid_library_text());
    return lib;
}

std::vector<netlist::DeviceCard> expand_instance(const netlist::DeviceCard& x_card) {
    netlist::NetlistDocument doc;
    doc.devices.push_back(x_card);
    netlist::merge_subckts(doc, powergrid_library());
    const auto flat = netlist::elaborate(doc);
    std::vector<netlist::DeviceCard> out;
    out.reserve(flat.instances.size());
    for (const auto& d : flat.instances) {
        netlist::DeviceCard c;
        c.kind = d.kind;
        c.name = d.name;
        c.nodes = d.node_names;
        c.b_mode = d.b_mode;
        c.value = d.kind == netlist::DeviceKind::BSource ? d.expr : netlist::Expr::number(d.value);
        if (d.ic) c.ic = netlist::Expr::number(*d.ic);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace gridflux::acgrid
