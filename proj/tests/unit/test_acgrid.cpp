#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "gridflux/acgrid/devices.hpp"
#include "gridflux/acgrid/library.hpp"
#include "gridflux/solver/solver.hpp"
#include "support.hpp"

using namespace gridflux;
using acgrid::BusPair;
using cd = std::complex<double>;

namespace {

testsupport::Built assemble(std::vector<netlist::DeviceCard> cards) {
    netlist::NetlistDocument doc;
    doc.title = "acgrid test";
    doc.devices = std::move(cards);
    netlist::merge_subckts(doc, acgrid::powergrid_library());
    return testsupport::Built(std::move(doc));
}

solver::SolverOptions tight() {
    solver::SolverOptions o;
    o.abs_tol = 1e-11;
    o.rel_tol = 1e-12;
    o.newton_tol = 1e-11;
    return o;
}

const BusPair A = BusPair::named("A");
const BusPair B = BusPair::named("B");

}  // namespace

TEST_CASE("slack: rails follow the phasor") {
    const double ang = 0.51 * std::numbers::pi / 180;
    auto b = assemble({acgrid::slack_instance({A, 1.0507, ang})});
    auto dc = solver::dc_operating_point(b.sys, tight());
    CHECK(dc.x[b.at("V(AR)")] == doctest::Approx(1.0507 * std::cos(ang)).epsilon(1e-12));
    CHECK(std::abs(dc.x[b.at("V(AR)")] - 1.0507) < 1e-4);
    CHECK(std::abs(dc.x[b.at("V(AI)")] - 0.00935) < 1e-5);
    CHECK(std::abs(dc.x[b.at("I(Xslack_A.VammR)")]) < 1e-12);
    CHECK(std::abs(dc.x[b.at("I(Xslack_A.VammI)")]) < 1e-12);

    auto unit = assemble({acgrid::slack_instance({A, 1.0, 0.0})});
    auto u = solver::dc_operating_point(unit.sys, tight());
    CHECK(u.x[unit.at("V(AR)")] == 1.0);
    CHECK(u.x[unit.at("V(AI)")] == 0.0);
}

TEST_CASE("cpl: ammeter currents at pinned voltages") {
    struct Case {
        double vmag, vang, p, q, ir, ii;
    };
    const Case cases[] = {
        {1.0, 0.0, 0.9, 0.49, 0.9, -0.49},
        {1.0, std::numbers::pi / 2, 1.0, 0.0, 0.0, 1.0},
        {1e-6, 0.0, 1.0, 0.0, 1000.0, 0.0},
    };
    for (const auto& c : cases) {
        auto b = assemble({acgrid::slack_instance({A, c.vmag, c.vang}), acgrid::cpl_instance({A, c.p, c.q, 1000.0})});
        auto dc = solver::dc_operating_point(b.sys, tight());
        CHECK(dc.x[b.at("I(Xload_A.VammR)")] == doctest::Approx(c.ir).epsilon(1e-9));
        CHECK(std::abs(dc.x[b.at("I(Xload_A.VammI)")] - c.ii) < 1e-9);
    }
}

TEST_CASE("branch: reactive transfer and antisymmetry") {
    auto b = assemble({acgrid::slack_instance({A, 1.0, 0.0}), acgrid::slack_instance({B, 0.9, 0.0}),
                       acgrid::branch_instance({A, B, 0.1})});
    auto dc = solver::dc_operating_point(b.sys, tight());
    // Slack ammeters read the current injected into their bus.
    const double ar = dc.x[b.at("I(Xslack_A.VammR)")], ai = dc.x[b.at("I(Xslack_A.VammI)")];
    const double br = dc.x[b.at("I(Xslack_B.VammR)")], bi = dc.x[b.at("I(Xslack_B.VammI)")];
    CHECK(std::abs(ar) < 1e-12);
    CHECK(ai == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ar == -br);
    CHECK(ai == -bi);

    auto flat = assemble({acgrid::slack_instance({A, 1.0, 0.0}), acgrid::slack_instance({B, 1.0, 0.0}),
                          acgrid::branch_instance({A, B, 0.1})});
    auto z = solver::dc_operating_point(flat.sys, tight());
    CHECK(z.x[flat.at("I(Xslack_A.VammR)")] == 0.0);
    CHECK(z.x[flat.at("I(Xslack_A.VammI)")] == 0.0);
}

TEST_CASE("branch: x = 0.2 gives an admittance of 5") {
    auto b = assemble({acgrid::slack_instance({A, 1.0, 0.0}), acgrid::slack_instance({B, 1.0, 0.3}),
                       acgrid::branch_instance({A, B, 0.2})});
    auto dc = solver::dc_operating_point(b.sys, tight());
    const cd i(dc.x[b.at("I(Xslack_A.VammR)")], dc.x[b.at("I(Xslack_A.VammI)")]);
    const cd dv = 1.0 - std::polar(1.0, 0.3);
    CHECK(std::abs(i) / std::abs(dv) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("generator convention: slack power into a CPL is positive") {
    auto b = assemble({acgrid::slack_instance({A, 1.0, 0.0}), acgrid::branch_instance({A, B, 0.1}),
                       acgrid::cpl_instance({B, 0.9, 0.49, 1000.0})});
    auto dc = solver::dc_operating_point(b.sys, tight());
    const cd v(dc.x[b.at("V(AR)")], dc.x[b.at("V(AI)")]);
    const cd i(dc.x[b.at("I(Xslack_A.VammR)")], dc.x[b.at("I(Xslack_A.VammI)")]);
    const cd s = v * std::conj(i);
    CHECK(s.real() == doctest::Approx(0.9).epsilon(1e-9));  // lossless branch
    CHECK(s.real() > 0.0);
}

namespace {

// Machine behind XDP, one branch to an infinite bus at 1/0.
struct Smib {
    double h = 3.0, d = 0.5, xdp = 0.2, x = 0.1, pm = 0.5, e = 1.0;

    double k() const { return e / (xdp + x); }
    double delta0() const { return std::asin(pm / k()); }

    // Backward Euler on M dw' = pm - k sin(delta) - d dw, delta' = dw.
    std::vector<std::pair<double, double>> oracle(double delta, double dw, double step, int n) const {
        const double m = 2 * h / acgrid::kOmegaSync;
        std::vector<std::pair<double, double>> out{{delta, dw}};
        for (int s = 0; s < n; ++s) {
            double dn = delta, wn = dw;
            for (int it = 0; it < 50; ++it) {
                const double f1 = m * (wn - dw) / step - pm + k() * std::sin(dn) + d * wn;
                const double f2 = (dn - delta) / step - wn;
                // [[m/h + d, k cos], [-1, 1/h]]
                const double a = m / step + d, bb = k() * std::cos(dn), c = -1.0, dd = 1.0 / step;
                const double det = a * dd - bb * c;
                const double dw_ = (f1 * dd - bb * f2) / det;
                const double dd_ = (a * f2 - c * f1) / det;
                wn -= dw_;
                dn -= dd_;
                if (std::abs(dw_) + std::abs(dd_) < 1e-15) break;
            }
            delta = dn;
            dw = wn;
            out.emplace_back(delta, dw);
        }
        return out;
    }

    testsupport::Built circuit(std::optional<double> delta_ic) const {
        acgrid::MachineSpec m;
        m.bus = A;
        m.h = h;
        m.d = d;
        m.xd_p = xdp;
        m.p_mech = pm;
        m.e_mag = e;
        auto cards = acgrid::expand_instance(acgrid::machine_instance(m));
        if (delta_ic) {
            for (auto& c : cards) {
                if (c.name == "Xgen_A.Cdelta") c.ic = netlist::Expr::number(*delta_ic);
                if (c.name == "Xgen_A.Cdw") c.ic = netlist::Expr::number(0.0);
            }
        }
        cards.push_back(acgrid::slack_instance({B, 1.0, 0.0}));
        cards.push_back(acgrid::branch_instance({A, B, x}));
        return assemble(std::move(cards));
    }
};

struct Trace {
    std::vector<double> delta, dw;
};

Trace simulate(const testsupport::Built& b, double step, double t_stop) {
    auto opts = tight();
    opts.step_h = step;
    opts.t_stop = t_stop;
    Trace tr;
    const auto id = b.at("V(Xgen_A.delta)"), iw = b.at("V(Xgen_A.dw)");
    solver::integrate(b.sys, opts, [&](const solver::SystemState& st) {
        tr.delta.push_back(st.x[id]);
        tr.dw.push_back(st.x[iw]);
    });
    return tr;
}

}  // namespace

TEST_CASE("machine: the operating point is an equilibrium") {
    Smib s;
    auto b = s.circuit(std::nullopt);
    auto tr = simulate(b, 0.01, 10.0);
    CHECK(tr.delta.front() == doctest::Approx(s.delta0()).epsilon(1e-9));
    for (std::size_t i = 0; i < tr.delta.size(); ++i) {
        CHECK(std::abs(tr.delta[i] - tr.delta.front()) < 1e-9);
        CHECK(std::abs(tr.dw[i]) < 1e-9);
    }
}

TEST_CASE("machine: damped return matches the swing oracle") {
    Smib s;
    const double d0 = s.delta0() + 0.1;
    auto tr = simulate(s.circuit(d0), 0.01, 10.0);
    auto ref = s.oracle(d0, 0.0, 0.01, static_cast<int>(tr.delta.size()) - 1);
    REQUIRE(ref.size() == tr.delta.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        worst = std::max(worst, std::abs(tr.delta[i] - ref[i].first));
        worst = std::max(worst, std::abs(tr.dw[i] - ref[i].second));
    }
    CHECK(worst < 1e-6);
    CHECK(std::abs(tr.delta.back() - s.delta0()) < 1e-4);
}

TEST_CASE("machine: undamped swing stays bounded") {
    Smib s;
    s.d = 0.0;
    const double d0 = s.delta0() + 0.1;
    auto tr = simulate(s.circuit(d0), 0.01, 10.0);
    auto ref = s.oracle(d0, 0.0, 0.01, static_cast<int>(tr.delta.size()) - 1);
    int sign_changes = 0;
    double peak = 0.0;
    for (std::size_t i = 0; i < tr.dw.size(); ++i) {
        CHECK(std::abs(tr.dw[i] - ref[i].second) < 1e-6);
        peak = std::max(peak, std::abs(tr.dw[i]));
        if (i > 0 && (tr.dw[i] > 0) != (tr.dw[i - 1] > 0)) ++sign_changes;
    }
    // Backward Euler only dissipates: M dw^2 / 2 never exceeds the initial
    // potential energy above the equilibrium.
    auto pot = [&](double d) { return -s.pm * d - s.k() * std::cos(d); };
    const double m = 2 * s.h / acgrid::kOmegaSync;
    CHECK(0.5 * m * peak * peak <= pot(d0) - pot(s.delta0()) + 1e-12);
    CHECK(sign_changes >= 4);
}
