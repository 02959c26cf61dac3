#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridflux/netlist/document.hpp"

namespace gridflux::netlist {

/// A primitive device after subcircuit expansion. Names are hierarchical
/// (`<instance>.<name>`), parameters are substituted, and the expression of a
/// B-source only references V(...) and I(...).
struct FlatDevice {
    DeviceKind kind = DeviceKind::Resistor;  // never Instance
    std::string name;
    std::vector<std::string> node_names;
    std::vector<std::size_t> nodes;  // indices into FlatCircuit::node_names; 0 is ground
    /// Numeric value of V/R/C/L.
    double value = 0.0;
    /// B-source expression.
    Expr expr;
    BMode b_mode = BMode::Current;
    std::optional<double> ic;
};

struct FlatCircuit {
    std::vector<std::string> node_names;  // [0] == "0"
    std::vector<FlatDevice> instances;
    std::size_t num_aux = 0;

    std::size_t node_count() const { return node_names.size(); }
    /// Case-insensitive; nullopt for unknown names.
    std::optional<std::size_t> find_node(std::string_view name) const;
    const FlatDevice* find_device(std::string_view name) const;

    std::unordered_map<std::string, std::size_t> node_lookup;    // lower-cased name -> index
    std::unordered_map<std::string, std::size_t> device_lookup;  // lower-cased name -> instance index
};

inline constexpr int kMaxSubcktDepth = 32;

/// Expands X-instances and substitutes parameters. Top-level .PARAM values
/// are visible everywhere; an instance sees its SUBCKT defaults overridden by
/// its PARAMS: list, evaluated in the enclosing scope. Throws ElaborationError.
FlatCircuit elaborate(const NetlistDocument& doc);

/// Values of the top-level .PARAM directives, in order.
std::vector<std::pair<std::string, double>> global_params(const NetlistDocument& doc);

}  // namespace gridflux::netlist
