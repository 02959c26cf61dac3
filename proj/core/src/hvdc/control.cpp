#include <algorithm>
#include <cmath>

#include "gridflux/hvdc/hvdc.hpp"

namespace gridflux::hvdc {

double vdcol(double v_ac_meas, const HvdcControlParams& cp) {
    const double span = std::max(cp.v2 - cp.v1, 1e-9);
    const double s = std::clamp((v_ac_meas - cp.v1) / span, 0.0, 1.0);
    return cp.imax1 + (cp.imax2 - cp.imax1) * s;
}

double current_order(double v_ac_meas, const HvdcControlParams& cp) {
    return std::min(cp.i_dc_ref, vdcol(v_ac_meas, cp));
}

double clamp_alpha(double cos_alpha_demand, const HvdcControlParams& cp) {
    return std::acos(std::clamp(cos_alpha_demand, std::cos(cp.alpha_max), std::cos(cp.alpha_min)));
}

CurrentController::CurrentController(const HvdcControlParams& cp, double alpha0, double xi0)
    : cp_(cp), alpha_(alpha0), xi_(xi0) {}

double CurrentController::step(double i_meas, double v_meas, double h) {
    const double err = current_order(v_meas, cp_) - i_meas;
    // Backward Euler on xi' = ki*err + kaw*(clamp(c) - c), c = kp*err + xi,
    // solved piecewise: the clamp is either inactive or pins c.
    const double lo = std::cos(cp_.alpha_max);
    const double hi = std::cos(cp_.alpha_min);
    double xi = xi_ + h * cp_.ki_cc * err;
    double c = cp_.kp_cc * err + xi;
    if (c > hi || c < lo) {
        const double bound = c > hi ? hi : lo;
        xi = (xi_ + h * (cp_.ki_cc * err + cp_.k_aw * (bound - cp_.kp_cc * err))) / (1 + h * cp_.k_aw);
        c = cp_.kp_cc * err + xi;
    }
    xi_ = xi;
    const double a_cmd = clamp_alpha(c, cp_);
    alpha_ = (alpha_ + h / cp_.t_alpha * a_cmd) / (1 + h / cp_.t_alpha);
    return alpha_;
}

}  // namespace gridflux::hvdc
