#include <algorithm>
#include <cmath>

#include "gridflux/error.hpp"
#include "gridflux/hvdc/hvdc.hpp"

namespace gridflux::hvdc {

namespace {

double clamp_unit(double v, bool& clamped) {
    clamped = v < -1.0 || v > 1.0;
    return std::clamp(v, -1.0, 1.0);
}

double bridge_scale(int n, const HvdcParams& p) { return p.appendix_c_scaling ? n : 1.0; }

double converter_l(int n, double x, double omega) { return 1.75 * n * x / omega; }

}  // namespace

Thevenin thevenin_params(const HvdcParams& p) {
    return {p.dc_line_l / 2 + p.l_smooth_r + converter_l(p.n_rec, p.x_cr, p.omega),
            p.dc_line_l / 2 + p.l_smooth_i + converter_l(p.n_inv, p.x_ci, p.omega), p.dc_line_r / 2,
            p.dc_line_r / 2};
}

HvdcParams resolve_line_inductance(const HvdcParams& p) {
    HvdcParams out = p;
    if (!p.x_dc) return out;
    const double fixed = p.l_smooth_r + p.l_smooth_i + converter_l(p.n_rec, p.x_cr, p.omega) +
                         converter_l(p.n_inv, p.x_ci, p.omega);
    out.dc_line_l = std::max(0.0, *p.x_dc / p.omega - fixed);
    return out;
}

RectifierResult rectifier_algebra(double v_acr, double k_r, double alpha, double i_dc, const HvdcParams& p) {
    RectifierResult r{};
    const double e_ac = kBridge * v_acr / k_r;
    r.e_rec = e_ac * std::cos(alpha);
    r.r_rec = 3 * p.x_cr / M_PI + 2 * p.r_cr;
    r.v_dcr = bridge_scale(p.n_rec, p) * r.e_rec - p.n_rec * r.r_rec * i_dc;
    const double arg = clamp_unit(std::cos(alpha) - std::sqrt(2.0) * i_dc * p.x_cr / e_ac, r.clamped);
    r.mu = std::acos(arg) - alpha;
    return r;
}

InverterResult inverter_algebra(double v_aci, double k_i, double beta, double i_dc, const HvdcParams& p) {
    InverterResult r{};
    const double e_ac = kBridge * v_aci / k_i;
    r.e_inv = e_ac * std::cos(beta);
    r.r_inv = 3 * p.x_ci / M_PI + 2 * p.r_ci;
    r.v_dci = bridge_scale(p.n_inv, p) * r.e_inv + p.n_inv * r.r_inv * i_dc;
    const double arg = clamp_unit(std::cos(beta) + std::sqrt(2.0) * i_dc * p.x_ci / e_ac, r.clamped);
    r.gamma = std::acos(arg);
    r.mu = beta - r.gamma;
    return r;
}

double no_load_voltage(double v_ac, double k, int n, const HvdcParams& p) {
    return bridge_scale(n, p) * kBridge * v_ac / k;
}

double dc_line_dynamics(double v_dcr, double v_dci, double i_dc, const HvdcParams& p) {
    const Thevenin t = thevenin_params(p);
    const double l = t.l_r + t.l_i;
    if (l == 0.0) throw CircuitError("algebraic DC link unsupported (L_r + L_i = 0)");
    return (v_dcr - v_dci - (t.r_r + t.r_i) * i_dc) / l;
}

double power_factor(double v_dc, double v_dc0) { return std::clamp(v_dc / v_dc0, 1e-3, 1.0); }

AcInjection ac_injections(const ConverterState& s, Side side) {
    AcInjection a{};
    a.p_ac = s.v_dc * s.i_dc;
    const double pf = power_factor(s.v_dc, s.v_dc0);
    a.q_ac = std::fabs(a.p_ac) * std::sqrt(1 - pf * pf) / pf;
    const double den = std::max(s.v_r * s.v_r + s.v_i * s.v_i, 1e-12);
    // Rectifier: CPL quotient with (P, Q). Inverter: the circuit draws
    // (-P, Q); reported here as the injected current.
    const double sign = side == Side::Rectifier ? 1.0 : -1.0;
    const double pd = sign * a.p_ac;
    const double ir = std::clamp((pd * s.v_r + a.q_ac * s.v_i) / den, -1000.0, 1000.0);
    const double ii = std::clamp((pd * s.v_i - a.q_ac * s.v_r) / den, -1000.0, 1000.0);
    a.i_r = sign * ir;
    a.i_i = sign * ii;
    return a;
}

}  // namespace gridflux::hvdc
