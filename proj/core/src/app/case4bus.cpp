#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "gridflux/acgrid/library.hpp"
#include "gridflux/app/scenario.hpp"

namespace gridflux::app {

using nlohmann::json;

namespace {

// Reads obj[key] into `field` when present, consuming the key.
template <class T>
void take(json& obj, const char* key, T& field) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    field = it->get<T>();
    obj.erase(it);
}

void reject_leftovers(const json& obj, const std::string& where) {
    if (!obj.empty()) {
        throw std::invalid_argument("unknown key '" + obj.begin().key() + "' in scenario config" +
                                    (where.empty() ? "" : " section " + where));
    }
}

json section(json& root, const char* key) {
    auto it = root.find(key);
    if (it == root.end()) return json::object();
    json out = *it;
    root.erase(it);
    if (!out.is_object()) throw std::invalid_argument(std::string("scenario config section ") + key + " must be an object");
    return out;
}

}  // namespace

ScenarioConfig load_scenario_config(const std::string& path, ScenarioConfig sc) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("file not found: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("malformed scenario config " + path + ": " + e.what());
    }
    if (!root.is_object()) throw std::invalid_argument("scenario config must be a JSON object");
    try {
        take(root, "x_12", sc.x_12);
        take(root, "x_13", sc.x_13);
        take(root, "x_14", sc.x_14);
        take(root, "x_23", sc.x_23);
        take(root, "v_2", sc.v_2);
        take(root, "v_4", sc.v_4);
        take(root, "load_p", sc.load_p);
        take(root, "load_q", sc.load_q);
        take(root, "t_stop", sc.t_stop);
        take(root, "step_h", sc.step_h);

        json m = section(root, "machine");
        take(m, "h", sc.machine.h);
        take(m, "d", sc.machine.d);
        take(m, "xd_p", sc.machine.xd_p);
        take(m, "p_mech", sc.machine.p_mech);
        take(m, "e_mag", sc.machine.e_mag);
        take(m, "avr", sc.machine.avr);
        reject_leftovers(m, "machine");

        json h = section(root, "hvdc");
        auto& p = sc.hvdc;
        take(h, "x_cr", p.x_cr);
        take(h, "x_ci", p.x_ci);
        take(h, "n_rec", p.n_rec);
        take(h, "n_inv", p.n_inv);
        take(h, "k_r", p.k_r);
        take(h, "k_i", p.k_i);
        take(h, "r_cr", p.r_cr);
        take(h, "r_ci", p.r_ci);
        take(h, "dc_line_r", p.dc_line_r);
        take(h, "dc_line_l", p.dc_line_l);
        take(h, "l_smooth_r", p.l_smooth_r);
        take(h, "l_smooth_i", p.l_smooth_i);
        take(h, "omega", p.omega);
        if (h.contains("x_dc")) {
            p.x_dc = h["x_dc"].is_null() ? std::nullopt : std::optional<double>(h["x_dc"].get<double>());
            h.erase("x_dc");
        }
        take(h, "p_dc_rec", p.p_dc_rec);
        take(h, "p_dc_inv", p.p_dc_inv);
        take(h, "appendix_c_scaling", p.appendix_c_scaling);
        reject_leftovers(h, "hvdc");

        json c = section(root, "control");
        auto& cp = sc.control;
        take(c, "i_dc_ref", cp.i_dc_ref);
        take(c, "v_ac_ref", cp.v_ac_ref);
        take(c, "t_meas", cp.t_meas);
        take(c, "alpha_min", cp.alpha_min);
        take(c, "alpha_max", cp.alpha_max);
        take(c, "v1", cp.v1);
        take(c, "v2", cp.v2);
        take(c, "imax1", cp.imax1);
        take(c, "imax2", cp.imax2);
        take(c, "extinction_control", cp.extinction_control);
        take(c, "beta_ref", cp.beta_ref);
        take(c, "beta_init", cp.beta_init);
        take(c, "kp_cc", cp.kp_cc);
        take(c, "ki_cc", cp.ki_cc);
        take(c, "kp_ec", cp.kp_ec);
        take(c, "ki_ec", cp.ki_ec);
        take(c, "k_aw", cp.k_aw);
        take(c, "t_alpha", cp.t_alpha);
        reject_leftovers(c, "control");

        json g = section(root, "genrou");
        for (auto& [k, v] : g.items()) sc.genrou[k] = v.get<double>();

        reject_leftovers(root, "");
    } catch (const json::exception& e) {
        throw std::invalid_argument("bad value in scenario config " + path + ": " + e.what());
    }
    return sc;
}

netlist::NetlistDocument build_case4bus(const ScenarioConfig& sc) {
    using acgrid::BusPair;
    const BusPair b1 = BusPair::named("Bus1");
    const BusPair b2 = BusPair::named("Bus2");
    const BusPair b3 = BusPair::named("Bus3");
    const BusPair b4 = BusPair::named("Bus4");

    netlist::NetlistDocument doc;
    doc.title = "four-bus two-area system with an LCC-HVDC link (bus 1 -> bus 2)";
    auto& d = doc.devices;
    d.push_back(acgrid::slack_instance({b2, sc.v_2, 0.0}));
    d.push_back(acgrid::branch_instance({b1, b2, sc.x_12}));
    d.push_back(acgrid::branch_instance({b1, b3, sc.x_13}));
    d.push_back(acgrid::branch_instance({b1, b4, sc.x_14}));
    d.push_back(acgrid::branch_instance({b2, b3, sc.x_23}));
    acgrid::MachineSpec m = sc.machine;
    m.bus = b4;
    m.v_set = sc.v_4;
    d.push_back(acgrid::machine_instance(m));
    d.push_back(acgrid::cpl_instance({b3, sc.load_p, sc.load_q, 1000.0}));
    for (auto& c : hvdc::emit_hvdc(sc.hvdc, sc.control, b1, b2)) d.push_back(std::move(c));

    netlist::Directive tran;
    tran.kind = netlist::DirectiveKind::Tran;
    tran.tstep = sc.step_h;
    tran.tstop = sc.t_stop;
    doc.directives.push_back(tran);
    netlist::Directive opts;
    opts.kind = netlist::DirectiveKind::Options;
    opts.assignments = {{"RELTOL", netlist::Expr::number(1e-1)}, {"ABSTOL", netlist::Expr::number(1e-3)}};
    doc.directives.push_back(opts);
    netlist::Directive print;
    print.kind = netlist::DirectiveKind::Print;
    print.words = {"TRAN",          "VM(Bus1)",          "VM(Bus2)",         "VM(Bus3)",
                   "VM(Bus4)",      "V(Xhvdc.alpha)",    "V(Xhvdc.beta)",    "V(Xhvdc.gamma)",
                   "I(Xhvdc.Ldc)",  "V(Xhvdc.Pdc_rec)",  "V(Xhvdc.Pdc_inv)", "V(Xgen_Bus4.delta)"};
    doc.directives.push_back(print);

    netlist::merge_subckts(doc, acgrid::powergrid_library());
    return doc;
}

}  // namespace gridflux::app
