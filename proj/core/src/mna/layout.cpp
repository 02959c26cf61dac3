#include "gridflux/error.hpp"
#include "gridflux/mna/dae_system.hpp"
#include "../netlist/text_util.hpp"

namespace gridflux::mna {

using netlist::BMode;
using netlist::DeviceKind;
using netlist::detail::to_lower;

std::optional<std::size_t> SystemLayout::index_of(std::string_view var_name) const {
    auto it = lookup.find(to_lower(var_name));
    if (it == lookup.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> SystemLayout::aux_of(std::string_view device) const {
    auto it = aux_lookup.find(to_lower(device));
    if (it == aux_lookup.end()) return std::nullopt;
    return it->second;
}

SystemLayout build_layout(const netlist::FlatCircuit& c) {
    if (c.node_count() <= 1) throw CircuitError("empty circuit");
    SystemLayout l;
    l.n_nodes = c.node_count() - 1;
    for (std::size_t n = 1; n < c.node_count(); ++n) l.var_names.push_back("V(" + c.node_names[n] + ")");

    auto add_aux = [&](const netlist::FlatDevice& d) {
        l.aux_lookup.emplace(to_lower(d.name), l.var_names.size());
        l.var_names.push_back("I(" + d.name + ")");
    };
    for (const auto& d : c.instances) {
        if (d.kind == DeviceKind::VSource || (d.kind == DeviceKind::BSource && d.b_mode == BMode::Voltage)) add_aux(d);
    }
    for (const auto& d : c.instances) {
        if (d.kind == DeviceKind::Inductor) add_aux(d);
    }
    l.n_aux = l.var_names.size() - l.n_nodes;
    l.total = l.var_names.size();
    for (std::size_t i = 0; i < l.total; ++i) {
        if (!l.lookup.emplace(to_lower(l.var_names[i]), i).second) {
            throw CircuitError("duplicate unknown " + l.var_names[i]);
        }
    }
    return l;
}

}  // namespace gridflux::mna
