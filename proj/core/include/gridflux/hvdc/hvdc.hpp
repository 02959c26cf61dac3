#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridflux/acgrid/devices.hpp"
#include "gridflux/netlist/document.hpp"

namespace gridflux::hvdc {

struct HvdcParams {
    double x_cr = 0.2, x_ci = 0.2;
    int n_rec = 6, n_inv = 6;
    double k_r = 1.0, k_i = 1.0;
    double r_cr = 0.0, r_ci = 0.0;
    double dc_line_r = 0.05;
    double dc_line_l = 0.0;
    double l_smooth_r = 0.0, l_smooth_i = 0.0;
    double omega = acgrid::kOmegaSync;
    /// When set, dc_line_l is back-solved from it (see resolve_line_inductance).
    std::optional<double> x_dc = 0.111;
    double p_dc_rec = 0.8, p_dc_inv = 0.7;
    /// true: N multiplies the whole DC voltage; false: only the commutation drop.
    bool appendix_c_scaling = true;
};

struct HvdcControlParams {
    double i_dc_ref = 1.0;
    double v_ac_ref = 1.0;
    double t_meas = 0.005;
    double alpha_min = 0.21, alpha_max = 0.35;
    double v1 = 1.0, v2 = 1.0, imax1 = 1.0, imax2 = 1.0;  // VDCOL breakpoints
    bool extinction_control = false;
    double beta_ref = 0.3490658503988659;   // 20 deg
    double beta_init = 0.6108652381980153;  // 35 deg
    double kp_cc = 1.0, ki_cc = 20.0;
    double kp_ec = 0.5, ki_ec = 10.0;
    double k_aw = 20.0;  // anti-windup back-calculation gain
    double t_alpha = 1.0;
};

struct Thevenin {
    double l_r, l_i, r_r, r_i;
};

/// Per-side inductances and resistances of the two Thevenin equivalents.
Thevenin thevenin_params(const HvdcParams& p);

/// Copy of `p` with dc_line_l chosen so that omega*(L_r + L_i) = x_dc,
/// floored at 0 when the converter terms alone exceed x_dc.
HvdcParams resolve_line_inductance(const HvdcParams& p);

/// 3*sqrt(2)/pi.
inline constexpr double kBridge = 1.3504744742356595;

struct RectifierResult {
    double e_rec;  // per-bridge EMF, 3*sqrt2/pi * V/K * cos(alpha)
    double r_rec;  // 3*X/pi + 2*R
    double mu;
    double v_dcr;
    bool clamped;  // acos argument left [-1, 1]
};

struct InverterResult {
    double e_inv;
    double r_inv;
    double gamma;
    double mu;  // beta - gamma
    double v_dci;
    bool clamped;
};

RectifierResult rectifier_algebra(double v_acr, double k_r, double alpha, double i_dc, const HvdcParams& p);
InverterResult inverter_algebra(double v_aci, double k_i, double beta, double i_dc, const HvdcParams& p);

/// Ideal no-load DC voltage of one converter (times N under whole-expression scaling).
double no_load_voltage(double v_ac, double k, int n, const HvdcParams& p);

/// di/dt of the DC mesh. Throws CircuitError when L_r + L_i = 0.
double dc_line_dynamics(double v_dcr, double v_dci, double i_dc, const HvdcParams& p);

/// Voltage-dependent current order limit (piecewise linear).
double vdcol(double v_ac_meas, const HvdcControlParams& cp);
/// min(i_dc_ref, vdcol(v)).
double current_order(double v_ac_meas, const HvdcControlParams& cp);
/// Clamps a cos(alpha) demand to the alpha band and returns alpha.
double clamp_alpha(double cos_alpha_demand, const HvdcControlParams& cp);

/// Discrete (backward Euler) replica of the rectifier current controller in
/// the CHVDC2 netlist, useful as a reference outside the circuit solver.
class CurrentController {
public:
    CurrentController(const HvdcControlParams& cp, double alpha0, double xi0);
    /// Advances by h and returns the filtered firing angle.
    double step(double i_meas, double v_meas, double h);
    double alpha() const { return alpha_; }

private:
    HvdcControlParams cp_;
    double alpha_;
    double xi_;
};

enum class Side { Rectifier, Inverter };

struct ConverterState {
    double v_r = 1.0, v_i = 0.0;  // AC bus voltage components
    double v_dc = 0.0;
    double v_dc0 = kBridge;  // ideal no-load DC voltage
    double i_dc = 0.0;
};

struct AcInjection {
    double p_ac;  // rectifier: drawn; inverter: injected
    double q_ac;  // drawn at both converters
    double i_r;   // same convention as p_ac
    double i_i;
};

double power_factor(double v_dc, double v_dc0);
AcInjection ac_injections(const ConverterState& s, Side side);

/// X card instantiating CHVDC2 from the shipped library. The Module port is
/// wired to node <name>_Idc. Throws std::invalid_argument when both ends are
/// on the same bus.
std::vector<netlist::DeviceCard> emit_hvdc(const HvdcParams& p, const HvdcControlParams& cp,
                                           const acgrid::BusPair& rec_bus, const acgrid::BusPair& inv_bus,
                                           const std::string& name = "Xhvdc");

}  // namespace gridflux::hvdc
