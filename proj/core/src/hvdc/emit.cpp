#include <stdexcept>

#include "gridflux/hvdc/hvdc.hpp"
#include "../netlist/text_util.hpp"

namespace gridflux::hvdc {

using netlist::Expr;

std::vector<netlist::DeviceCard> emit_hvdc(const HvdcParams& p, const HvdcControlParams& cp,
                                           const acgrid::BusPair& rec_bus, const acgrid::BusPair& inv_bus,
                                           const std::string& name) {
    if (netlist::detail::iequals(rec_bus.name, inv_bus.name)) {
        throw std::invalid_argument("HVDC rectifier and inverter must be on different buses");
    }
    if (!(cp.alpha_min < cp.alpha_max)) throw std::invalid_argument("HVDC needs alpha_min < alpha_max");
    if (cp.v1 > cp.v2) throw std::invalid_argument("HVDC VDCOL needs v1 <= v2");
    if (!(p.dc_line_r > 0.0)) throw std::invalid_argument("HVDC DC line resistance must be positive");

    // Gdc carries omega*(L_r + L_i); the SUBCKT back-solves the line part.
    double gdc = 0.0;
    if (p.x_dc) {
        gdc = *p.x_dc;
    } else {
        const Thevenin t = thevenin_params(p);
        gdc = p.omega * (t.l_r + t.l_i);
    }
    auto num = [](double v) { return Expr::number(v); };
    netlist::DeviceCard c;
    c.kind = netlist::DeviceKind::Instance;
    c.name = name;
    c.nodes = {name + "_Idc", rec_bus.node_r, inv_bus.node_r, rec_bus.node_i, inv_bus.node_i};
    c.subckt = "CHVDC2";
    c.params = {
        {"Tr", num(cp.t_meas)},
        {"V1", num(cp.v1)},
        {"V2", num(cp.v2)},
        {"Imax1", num(cp.imax1)},
        {"Imax2", num(cp.imax2)},
        {"Alpha_min_r", num(cp.alpha_min)},
        {"Alpha_max_r", num(cp.alpha_max)},
        {"Talpr", num(cp.t_alpha)},
        {"Tap", num(p.k_r)},
        {"Xc", num(p.x_cr)},
        {"Gdc", num(gdc)},
        {"Nbr", num(p.n_rec)},
        {"Xci", num(p.x_ci)},
        {"Nbr_inv", num(p.n_inv)},
        {"Tap_inv", num(p.k_i)},
        {"Rcr", num(p.r_cr)},
        {"Rci", num(p.r_ci)},
        {"Rdc", num(p.dc_line_r)},
        {"Lsr", num(p.l_smooth_r)},
        {"Lsi", num(p.l_smooth_i)},
        {"Omega", num(p.omega)},
        {"Idc_ref", num(cp.i_dc_ref)},
        {"Vac_ref", num(cp.v_ac_ref)},
        {"Beta_ref", num(cp.beta_ref)},
        {"Beta_init", num(cp.beta_init)},
        {"ExtCtrl", num(cp.extinction_control ? 1.0 : 0.0)},
        {"Kp_cc", num(cp.kp_cc)},
        {"Ki_cc", num(cp.ki_cc)},
        {"Kp_ec", num(cp.kp_ec)},
        {"Ki_ec", num(cp.ki_ec)},
        {"Kaw", num(cp.k_aw)},
        {"NbrFull", num(p.appendix_c_scaling ? 1.0 : 0.0)},
    };
    return {c};
}

}  // namespace gridflux::hvdc
