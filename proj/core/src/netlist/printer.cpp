#include <fmt/format.h>

#include "gridflux/netlist/document.hpp"

namespace gridflux::netlist {

namespace {

std::string value_text(const Expr& e) {
    if (e.is_number()) return e.to_string();
    return "{" + e.to_string() + "}";
}

void append_params(std::string& out, const ParamList& params) {
    for (const auto& [name, e] : params) out += fmt::format(" {}={}", name, value_text(e));
}

}  // namespace

std::string print_card(const DeviceCard& card) {
    std::string out = card.name;
    for (const auto& n : card.nodes) out += " " + n;
    switch (card.kind) {
        case DeviceKind::Instance:
            out += " " + card.subckt;
            if (!card.params.empty()) {
                out += " PARAMS:";
                append_params(out, card.params);
            }
            break;
        case DeviceKind::BSource:
            out += card.b_mode == BMode::Current ? " I=" : " V=";
            out += "{" + card.value.to_string() + "}";
            break;
        default:
            out += " " + value_text(card.value);
            if (card.ic) out += " IC=" + value_text(*card.ic);
            break;
    }
    return out;
}

std::string print_netlist(const NetlistDocument& doc) {
    std::string out;
    if (doc.title) {
        out += *doc.title + "\n";
    } else {
        out += "* untitled\n";
    }
    for (const auto& s : doc.subckt_defs) {
        out += ".SUBCKT " + s.name;
        for (const auto& p : s.ports) out += " " + p;
        if (!s.param_defaults.empty()) {
            out += " PARAMS:";
            for (const auto& [name, v] : s.param_defaults) out += fmt::format(" {}={}", name, v);
        }
        out += "\n";
        for (const auto& c : s.body) out += print_card(c) + "\n";
        out += ".ENDS " + s.name + "\n";
    }
    for (const auto& c : doc.devices) out += print_card(c) + "\n";
    for (const auto& d : doc.directives) {
        switch (d.kind) {
            case DirectiveKind::Param:
                out += ".PARAM";
                append_params(out, d.assignments);
                break;
            case DirectiveKind::Tran:
                out += fmt::format(".TRAN {} {}", d.tstep, d.tstop);
                break;
            case DirectiveKind::Print:
            case DirectiveKind::Options:
                out += d.kind == DirectiveKind::Print ? ".PRINT" : ".OPTIONS";
                for (const auto& w : d.words) out += " " + w;
                append_params(out, d.assignments);
                break;
        }
        out += "\n";
    }
    out += ".END\n";
    return out;
}

}  // namespace gridflux::netlist
