#include "gridflux/netlist/elaborate.hpp"

#include <fmt/format.h>

#include "gridflux/error.hpp"
#include "text_util.hpp"

namespace gridflux::netlist {

using detail::to_lower;

namespace {

using Scope = std::unordered_map<std::string, double>;

Expr bind_params(const Expr& e, const Scope& scope, const std::string& context) {
    return substitute(e, [&](const Reference& ref) -> std::optional<Expr> {
        if (ref.kind != Reference::Kind::Param) return std::nullopt;
        auto it = scope.find(to_lower(ref.name));
        if (it == scope.end()) {
            throw ElaborationError(fmt::format("undefined parameter {} in {}", ref.name, context));
        }
        return Expr::number(it->second);
    });
}

double numeric(const Expr& e, const Scope& scope, const std::string& context) {
    const Expr bound = bind_params(e, scope, context);
    if (!is_closed(bound)) {
        throw ElaborationError(fmt::format("{} must be a constant, got {}", context, e.to_string()));
    }
    try {
        return eval_expr(bound, Bindings{});
    } catch (const DomainError& ex) {
        throw ElaborationError(fmt::format("{}: {}", context, ex.what()));
    }
}

class Elaborator {
public:
    explicit Elaborator(const NetlistDocument& doc) : doc_(doc) {}

    FlatCircuit run() {
        Scope scope;
        for (const auto& [name, v] : global_params(doc_)) scope[to_lower(name)] = v;
        expand(doc_.devices, scope, "", {}, 0);
        return finish();
    }

private:
    const NetlistDocument& doc_;
    std::vector<FlatDevice> out_;

    using PortMap = std::unordered_map<std::string, std::string>;

    static std::string join(const std::string& prefix, const std::string& name) {
        return prefix.empty() ? name : prefix + "." + name;
    }

    void expand(const std::vector<DeviceCard>& cards, const Scope& scope, const std::string& prefix,
                const PortMap& ports, int depth) {
        std::unordered_map<std::string, bool> local;
        for (const auto& c : cards) local[to_lower(c.name)] = true;

        auto map_node = [&](const std::string& n) -> std::string {
            if (n == "0") return n;
            auto it = ports.find(to_lower(n));
            if (it != ports.end()) return it->second;
            return join(prefix, n);
        };

        for (const auto& card : cards) {
            const std::string name = join(prefix, card.name);
            if (card.kind == DeviceKind::Instance) {
                instance(card, name, scope, map_node, depth);
                continue;
            }
            FlatDevice d;
            d.kind = card.kind;
            d.name = name;
            for (const auto& n : card.nodes) d.node_names.push_back(map_node(n));
            if (card.kind == DeviceKind::BSource) {
                d.b_mode = card.b_mode;
                const Expr bound = bind_params(card.value, scope, "device " + name);
                d.expr = substitute(bound, [&](const Reference& ref) -> std::optional<Expr> {
                    if (ref.kind == Reference::Kind::Voltage) return Expr::voltage(map_node(ref.name));
                    if (ref.kind == Reference::Kind::Current && local.count(to_lower(ref.name))) {
                        return Expr::current(join(prefix, ref.name));
                    }
                    return std::nullopt;
                });
            } else {
                d.value = numeric(card.value, scope, "value of " + name);
                if (card.ic) d.ic = numeric(*card.ic, scope, "IC of " + name);
            }
            out_.push_back(std::move(d));
        }
    }

    template <class MapNode>
    void instance(const DeviceCard& card, const std::string& name, const Scope& scope, const MapNode& map_node,
                  int depth) {
        const SubcktDef* def = doc_.find_subckt(card.subckt);
        if (!def) {
            throw ElaborationError(fmt::format("undefined subcircuit {} (instance {})", card.subckt, name));
        }
        if (depth + 1 > kMaxSubcktDepth) {
            throw ElaborationError(fmt::format("subcircuit nesting deeper than {} at instance {} (recursive {}?)",
                                               kMaxSubcktDepth, name, def->name));
        }
        if (card.nodes.size() != def->ports.size()) {
            throw ElaborationError(fmt::format("instance {} connects {} node(s) but {} has {} port(s)", name,
                                               card.nodes.size(), def->name, def->ports.size()));
        }
        Scope inner = scope;
        for (const auto& [p, v] : def->param_defaults) inner[to_lower(p)] = v;
        for (const auto& [p, e] : card.params) {
            bool declared = false;
            for (const auto& [dp, _] : def->param_defaults) declared = declared || detail::iequals(dp, p);
            if (!declared) {
                throw ElaborationError(
                    fmt::format("instance {} overrides undeclared parameter {} of {}", name, p, def->name));
            }
            inner[to_lower(p)] = numeric(e, scope, fmt::format("parameter {} of {}", p, name));
        }
        PortMap ports;
        for (std::size_t i = 0; i < def->ports.size(); ++i) ports[to_lower(def->ports[i])] = map_node(card.nodes[i]);
        expand(def->body, inner, name, ports, depth + 1);
    }

    FlatCircuit finish() {
        FlatCircuit c;
        c.node_names.push_back("0");
        c.node_lookup["0"] = 0;
        for (std::size_t i = 0; i < out_.size(); ++i) {
            auto& d = out_[i];
            if (!c.device_lookup.emplace(to_lower(d.name), i).second) {
                throw ElaborationError("duplicate device name " + d.name + " after expansion");
            }
            for (const auto& n : d.node_names) {
                auto [it, inserted] = c.node_lookup.emplace(to_lower(n), c.node_names.size());
                if (inserted) c.node_names.push_back(n);
                d.nodes.push_back(it->second);
            }
            if (d.kind == DeviceKind::VSource || d.kind == DeviceKind::Inductor ||
                (d.kind == DeviceKind::BSource && d.b_mode == BMode::Voltage)) {
                ++c.num_aux;
            }
        }
        for (const auto& d : out_) {
            if (d.kind != DeviceKind::BSource) continue;
            for (const auto& ref : collect_references(d.expr)) {
                if (ref.kind == Reference::Kind::Voltage && !c.node_lookup.count(to_lower(ref.name))) {
                    throw ElaborationError(
                        fmt::format("{} references node {} which no device connects", d.name, ref.name));
                }
                if (ref.kind == Reference::Kind::Current) {
                    auto it = c.device_lookup.find(to_lower(ref.name));
                    const bool ok = it != c.device_lookup.end() && [&] {
                        const auto& t = out_[it->second];
                        return t.kind == DeviceKind::VSource || t.kind == DeviceKind::Inductor ||
                               (t.kind == DeviceKind::BSource && t.b_mode == BMode::Voltage);
                    }();
                    if (!ok) {
                        throw ElaborationError(fmt::format(
                            "{} references I({}), which is not a voltage source or inductor", d.name, ref.name));
                    }
                }
            }
        }
        c.instances = std::move(out_);
        return c;
    }
};

}  // namespace

std::optional<std::size_t> FlatCircuit::find_node(std::string_view name) const {
    auto it = node_lookup.find(to_lower(name));
    if (it == node_lookup.end()) return std::nullopt;
    return it->second;
}

const FlatDevice* FlatCircuit::find_device(std::string_view name) const {
    auto it = device_lookup.find(to_lower(name));
    if (it == device_lookup.end()) return nullptr;
    return &instances[it->second];
}

std::vector<std::pair<std::string, double>> global_params(const NetlistDocument& doc) {
    std::vector<std::pair<std::string, double>> out;
    Scope scope;
    for (const auto& d : doc.directives) {
        if (d.kind != DirectiveKind::Param) continue;
        for (const auto& [name, e] : d.assignments) {
            const double v = numeric(e, scope, "parameter " + name);
            scope[to_lower(name)] = v;
            out.emplace_back(name, v);
        }
    }
    return out;
}

FlatCircuit elaborate(const NetlistDocument& doc) { return Elaborator(doc).run(); }

}  // namespace gridflux::netlist
