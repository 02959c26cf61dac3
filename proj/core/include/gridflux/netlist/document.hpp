#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridflux/netlist/expr.hpp"

namespace gridflux::netlist {

enum class DeviceKind { VSource, BSource, Resistor, Capacitor, Inductor, Instance };

/// Which quantity a B-source's expression defines.
enum class BMode { Current, Voltage };

/// Ordered name -> expression list; names are case-insensitive.
using ParamList = std::vector<std::pair<std::string, Expr>>;

struct DeviceCard {
    DeviceKind kind = DeviceKind::Resistor;
    std::string name;
    std::vector<std::string> nodes;
    /// Value of V/R/C/L cards, expression of B cards. Unused for X cards.
    Expr value;
    BMode b_mode = BMode::Current;
    /// IC= on capacitors (voltage) and inductors (current).
    std::optional<Expr> ic;
    /// Referenced SUBCKT and PARAMS: overrides of an X card.
    std::string subckt;
    ParamList params;
    std::size_t line = 0;

    /// Ignores `line`.
    friend bool operator==(const DeviceCard& a, const DeviceCard& b);
};

struct SubcktDef {
    std::string name;
    std::vector<std::string> ports;
    std::vector<std::pair<std::string, double>> param_defaults;
    std::vector<DeviceCard> body;
    std::size_t line = 0;

    friend bool operator==(const SubcktDef& a, const SubcktDef& b);
};

enum class DirectiveKind { Param, Tran, Print, Options };

struct Directive {
    DirectiveKind kind = DirectiveKind::Param;
    /// .PARAM assignments and .OPTIONS / .PRINT key=value pairs.
    ParamList assignments;
    /// .TRAN: step and stop time.
    double tstep = 0.0;
    double tstop = 0.0;
    /// .PRINT: analysis word then output names; .OPTIONS: group words.
    std::vector<std::string> words;
    std::size_t line = 0;

    friend bool operator==(const Directive& a, const Directive& b);
};

struct NetlistDocument {
    std::optional<std::string> title;
    std::vector<DeviceCard> devices;
    std::vector<SubcktDef> subckt_defs;  // definition order; names unique (case-insensitive)
    std::vector<Directive> directives;

    const SubcktDef* find_subckt(std::string_view name) const;
    bool empty() const { return devices.empty() && subckt_defs.empty() && directives.empty(); }

    friend bool operator==(const NetlistDocument& a, const NetlistDocument& b);
};

/// Parses netlist text. The first non-comment line is the title unless it
/// begins with '.' or parses as a device card. Throws ParseError.
NetlistDocument parse_netlist(std::string_view source);

/// Netlist text that parses back to an equal document.
std::string print_netlist(const NetlistDocument& doc);
std::string print_card(const DeviceCard& card);

/// Appends the SUBCKT definitions of `library` to `doc`, skipping names `doc`
/// already defines.
void merge_subckts(NetlistDocument& doc, const NetlistDocument& library);

}  // namespace gridflux::netlist
