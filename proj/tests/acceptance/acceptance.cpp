// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on an
// unexpected result.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gridflux/acgrid/devices.hpp"
#include "gridflux/acgrid/library.hpp"
#include "gridflux/app/run.hpp"
#include "gridflux/app/scenario.hpp"
#include "gridflux/hvdc/hvdc.hpp"
#include "gridflux/mna/dae_system.hpp"
#include "gridflux/netlist/elaborate.hpp"
#include "gridflux/solver/solver.hpp"

using namespace gridflux;
using cd = std::complex<double>;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fixture(const std::string& name) { return read_file(std::string(GRIDFLUX_FIXTURES) + "/" + name); }

struct Circuit {
    netlist::NetlistDocument doc;
    netlist::FlatCircuit flat;
    mna::SystemLayout layout;
    mna::DaeSystem sys;

    explicit Circuit(netlist::NetlistDocument d)
        : doc(std::move(d)), flat(netlist::elaborate(doc)), layout(mna::build_layout(flat)), sys(flat, layout) {}

    Eigen::Index at(const std::string& var) const {
        auto i = layout.index_of(var);
        if (!i) throw std::runtime_error("no variable " + var);
        return static_cast<Eigen::Index>(*i);
    }
};

Circuit from_cards(std::vector<netlist::DeviceCard> cards) {
    netlist::NetlistDocument doc;
    doc.title = "acceptance";
    doc.devices = std::move(cards);
    netlist::merge_subckts(doc, acgrid::powergrid_library());
    return Circuit(std::move(doc));
}

solver::SolverOptions tight() {
    solver::SolverOptions o;
    o.abs_tol = 1e-12;
    o.rel_tol = 1e-12;
    o.newton_tol = 1e-12;
    return o;
}

// Source into G1 to node 2, G2 to ground.
Outcome linear_oracle() {
    Outcome r;
    const auto t0 = Clock::now();
    Circuit c(netlist::parse_netlist("* linear\nVsrc 1 0 1V\nR1 1 2 1\nR2 2 0 1\n"));
    solver::SolverOptions opts;
    const auto res = solver::newton_solve(c.sys, Eigen::VectorXd::Zero(3), 0.0, 0.0, {}, opts);
    const double elapsed = seconds_since(t0);

    Eigen::Matrix3d a;
    a << 1, -1, 1, -1, 2, 0, 1, 0, 0;
    const Eigen::Vector3d oracle = a.fullPivLu().solve(Eigen::Vector3d(0, 0, 1));
    r.require(res.iterations == 1, fmt::format("{} iterations", res.iterations));
    const double err = (res.x - oracle).cwiseAbs().maxCoeff();
    r.require(err <= 1e-12, fmt::format("oracle mismatch {:.3g}", err));
    const double exact = (res.x - Eigen::Vector3d(1, 0.5, -0.5)).cwiseAbs().maxCoeff();
    r.require(exact <= 1e-12, fmt::format("expected (1, 0.5, -0.5), error {:.3g}", exact));
    r.require(elapsed < 1e-3, fmt::format("took {:.3g} s", elapsed));
    r.detail = r.ok ? fmt::format("iterations=1 error={:.1g} time={:.2g} ms", err, elapsed * 1e3) : r.detail;
    return r;
}

Outcome bdf1_order() {
    Outcome r;
    Circuit c(netlist::parse_netlist(fixture("rc.cir")));
    const auto iv = c.at("V(2)");
    std::vector<double> max_err;
    double worst_recurrence = 0.0;
    const auto t0 = Clock::now();
    for (double h : {0.1, 0.05, 0.025}) {
        solver::SolverOptions opts;
        opts.step_h = h;
        opts.t_stop = 1.0;
        int n = 0;
        double e = 0.0;
        solver::integrate(c.sys, opts, [&](const solver::SystemState& st) {
            const double v = st.x[iv];
            worst_recurrence = std::max(worst_recurrence, std::abs(v - std::pow(1 + h, -n)));
            e = std::max(e, std::abs(v - std::exp(-st.t)));
            ++n;
        });
        max_err.push_back(e);
    }
    const double elapsed = seconds_since(t0);
    r.require(worst_recurrence <= 1e-9, fmt::format("recurrence error {:.3g}", worst_recurrence));
    for (std::size_t i = 1; i < max_err.size(); ++i) {
        const double ratio = max_err[i - 1] / max_err[i];
        r.require(ratio >= 1.6 && ratio <= 2.4, fmt::format("error ratio {:.3f}", ratio));
    }
    r.require(elapsed < 10e-3, fmt::format("took {:.3g} s", elapsed));
    if (r.ok) {
        r.detail = fmt::format("recurrence={:.1g} ratios={:.3f},{:.3f} time={:.2g} ms", worst_recurrence,
                               max_err[0] / max_err[1], max_err[1] / max_err[2], elapsed * 1e3);
    }
    return r;
}

Outcome cpl_contract() {
    Outcome r;
    using acgrid::BusPair;
    const auto a = BusPair::named("A"), b = BusPair::named("B");
    const cd s_target(0.9, 0.49);
    const auto t0 = Clock::now();
    Circuit c = from_cards({acgrid::slack_instance({a, 1.0, 0.0}), acgrid::branch_instance({a, b, 0.1}),
                            acgrid::cpl_instance({b, 0.9, 0.49, 1000.0})});
    auto opts = tight();
    opts.step_h = 0.1;
    opts.t_stop = 1.0;
    const auto vr = c.at("V(BR)"), vi = c.at("V(BI)");
    const auto ir = c.at("I(Xload_B.VammR)"), ii = c.at("I(Xload_B.VammI)");
    double worst = 0.0;
    int points = 0;
    solver::integrate(c.sys, opts, [&](const solver::SystemState& st) {
        const cd s = cd(st.x[vr], st.x[vi]) * std::conj(cd(st.x[ir], st.x[ii]));
        worst = std::max(worst, std::abs(s - s_target));
        ++points;
    });
    r.require(worst < 1e-6, fmt::format("|VI* - S| = {:.3g}", worst));

    Circuit lim = from_cards({acgrid::slack_instance({b, 1e-6, 0.0}), acgrid::cpl_instance({b, 0.9, 0.49, 1000.0})});
    const auto dc = solver::dc_operating_point(lim.sys, tight());
    const double lr = dc.x[lim.at("I(Xload_B.VammR)")], li = dc.x[lim.at("I(Xload_B.VammI)")];
    r.require(std::abs(lr) <= 1000.0 && std::abs(li) <= 1000.0, "limiter exceeded");
    r.require(std::abs(lr) == 1000.0 && std::abs(li) == 1000.0,
              fmt::format("not clamped: I = ({:.6g}, {:.6g})", lr, li));
    const double elapsed = seconds_since(t0);
    r.require(elapsed < 10e-3, fmt::format("took {:.3g} s", elapsed));
    if (r.ok) {
        r.detail = fmt::format("{} points, worst |VI*-S|={:.1g}, clamped I=({:g},{:g}) time={:.2g} ms", points, worst,
                               lr, li, elapsed * 1e3);
    }
    return r;
}

Outcome converter_algebra() {
    Outcome r;
    hvdc::HvdcParams p;
    const auto e = hvdc::rectifier_algebra(1.0, 1.0, 0.0, 0.0, p);
    const double e_oracle = 3 * std::sqrt(2.0) / std::numbers::pi;
    r.require(std::abs(e.e_rec - 1.35047) <= 1e-5 && std::abs(e.e_rec - e_oracle) <= 1e-12,
              fmt::format("E = {:.8f}", e.e_rec));
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> v(0.8, 1.2), k(0.9, 1.1), beta(0.2, 1.3), i(0.0, 1.5), x(0.05, 0.3);
    double worst = 0.0;
    for (int valid = 0; valid < 1000;) {
        p.x_ci = x(rng);
        const double b = beta(rng);
        const auto inv = hvdc::inverter_algebra(v(rng), k(rng), b, i(rng), p);
        if (inv.clamped) continue;  // outside the commutation range
        worst = std::max(worst, std::abs(inv.gamma + inv.mu - b));
        ++valid;
    }
    r.require(worst <= 1e-9, fmt::format("beta - gamma - mu = {:.3g}", worst));
    // The overlap angle must match both its direct evaluation and the quoted
    // 0.48397 +- 1e-4. Those two disagree by 1.9e-4, so the second check
    // cannot hold for any faithful implementation.
    const auto m = hvdc::rectifier_algebra(1.0, 1.0, 0.21, 1.0, p);
    const double mu_oracle = std::acos(std::cos(0.21) - std::sqrt(2.0) * 1.0 * 0.2 / e_oracle) - 0.21;
    r.require(std::abs(m.mu - mu_oracle) <= 1e-12, fmt::format("mu = {:.6f}, direct evaluation {:.6f}", m.mu, mu_oracle));
    r.require(std::abs(m.mu - 0.48397) <= 1e-4,
              fmt::format("mu = {:.6f} equals its direct evaluation {:.6f}, but the quoted 0.48397 +- 1e-4 is "
                          "{:.2g} away (E={:.6f}, identity={:.1g} pass)",
                          m.mu, mu_oracle, std::abs(m.mu - 0.48397), e.e_rec, worst));
    if (r.ok) r.detail = fmt::format("E={:.6f} mu={:.6f} identity={:.1g}", e.e_rec, m.mu, worst);
    return r;
}

// HVDC link between two stiff 1/0 sources, starting from zero DC current.
Circuit isolated_link() {
    hvdc::HvdcParams p;
    hvdc::HvdcControlParams cp;
    cp.beta_init = 48.0 * std::numbers::pi / 180;
    const auto b1 = acgrid::BusPair::named("Rec");
    const auto b2 = acgrid::BusPair::named("Inv");
    auto cards = acgrid::expand_instance(hvdc::emit_hvdc(p, cp, b1, b2).front());
    for (auto& c : cards) {
        if (c.name == "Xhvdc.Ldc") c.ic = netlist::Expr::number(0.0);
    }
    cards.push_back(acgrid::slack_instance({b1, 1.0, 0.0}));
    cards.push_back(acgrid::slack_instance({b2, 1.0, 0.0}));
    return from_cards(std::move(cards));
}

Outcome dc_link() {
    Outcome r;
    Circuit c = isolated_link();
    solver::SolverOptions opts;  // default tolerances
    opts.step_h = 0.01;
    opts.t_stop = 5.0;
    const auto ii = c.at("I(Xhvdc.Ldc)"), pr = c.at("V(Xhvdc.Pdc_rec)"), pi = c.at("V(Xhvdc.Pdc_inv)");
    double i0 = 0.0, i_end = 0.0, audit = 0.0;
    solver::integrate(c.sys, opts, [&](const solver::SystemState& st) {
        if (st.t == 0.0) i0 = st.x[ii];
        i_end = st.x[ii];
        audit = st.x[pr] - st.x[pi] - 0.05 * i_end * i_end;
    });
    r.require(std::abs(i0) < 1e-12, fmt::format("initial current {:.3g}", i0));
    r.require(std::abs(i_end - 1.0) <= 0.02, fmt::format("i_dc(5 s) = {:.5f}", i_end));
    r.require(std::abs(audit) <= 1e-3, fmt::format("power audit residual {:.3g}", audit));
    if (r.ok) r.detail = fmt::format("i_dc: {:g} -> {:.5f} at 5 s, audit={:.1g}", i0, i_end, audit);
    return r;
}

struct CaseRun {
    double vm1_end = 0.0;
    double beta_end = 0.0;
    double bus2_dev = 0.0;
    std::size_t rows = 0;
    double seconds = 0.0;
};

CaseRun case4bus(bool control) {
    app::ScenarioConfig sc;
    sc.control.extinction_control = control;
    Circuit c(app::build_case4bus(sc));
    solver::SolverOptions opts;
    opts.step_h = sc.step_h;
    opts.t_stop = sc.t_stop;
    const auto r1 = c.at("V(Bus1R)"), i1 = c.at("V(Bus1I)"), r2 = c.at("V(Bus2R)"), i2 = c.at("V(Bus2I)");
    const auto ib = c.at("V(Xhvdc.beta)");
    CaseRun out;
    const auto t0 = Clock::now();
    solver::integrate(c.sys, opts, [&](const solver::SystemState& st) {
        out.vm1_end = std::hypot(st.x[r1], st.x[i1]);
        out.beta_end = st.x[ib];
        out.bus2_dev = std::max({out.bus2_dev, std::abs(st.x[r2] - 1.0), std::abs(st.x[i2])});
        ++out.rows;
    });
    out.seconds = seconds_since(t0);
    return out;
}

Outcome case_study(const CaseRun& off, const CaseRun& on) {
    Outcome r;
    r.require(off.vm1_end < 1.0, fmt::format("(a) control off |V1| = {:.4f}", off.vm1_end));
    r.require(on.vm1_end >= 1.0, fmt::format("(b) control on |V1| = {:.4f}", on.vm1_end));
    r.require(std::abs(on.beta_end - 0.349) <= 0.01, fmt::format("(c) beta = {:.4f}", on.beta_end));
    const double dev = std::max(off.bus2_dev, on.bus2_dev);
    r.require(dev <= 1e-9, fmt::format("(d) bus 2 deviates by {:.3g}", dev));
    if (r.ok) {
        r.detail = fmt::format("|V1| off={:.4f} on={:.4f}, beta={:.4f}, bus2 dev={:.1g}", off.vm1_end, on.vm1_end,
                               on.beta_end, dev);
    }
    return r;
}

Outcome performance(const CaseRun& on) {
    Outcome r;
    r.require(on.rows == 20001, fmt::format("{} rows", on.rows));
    r.require(on.seconds <= 60.0, fmt::format("{:.2f} s", on.seconds));
    if (r.ok) r.detail = fmt::format("{} points in {:.2f} s", on.rows, on.seconds);
    return r;
}

Outcome parser_corpus() {
    Outcome r;
    for (const char* f : {"slack_listing.cir", "cpl_listing.cir", "chvdc2_listing.cir"}) {
        try {
            Circuit c(netlist::parse_netlist(fixture(f)));
            r.require(c.layout.total > 0, std::string(f) + " has no unknowns");
        } catch (const std::exception& e) {
            r.require(false, std::string(f) + ": " + e.what());
        }
    }
    // Xload1 from the text: P=0.9, Q=0.49 and the default CurrLim=1000.
    Circuit b(netlist::parse_netlist(fixture("cpl_listing.cir")));
    const auto* br = b.flat.find_device("Xload1.BloadR");
    const auto* bi = b.flat.find_device("Xload1.BloadI");
    r.require(br && bi, "Xload1 load sources missing");
    if (br && bi) {
        auto at = [&](const netlist::FlatDevice* d, double vr, double vi) {
            netlist::Bindings env;
            env.set_voltage("bus1R", vr).set_voltage("bus1I", vi);
            return netlist::eval_expr(d->expr, env);
        };
        r.require(std::abs(at(br, 1, 0) - 0.9) < 1e-15, "P != 0.9");
        r.require(std::abs(at(bi, 1, 0) + 0.49) < 1e-15, "Q != 0.49");
        r.require(at(br, 1e-6, 0) == 1000.0, "CurrLim != 1000");
    }
    if (r.ok) r.detail = "slack, CPL and CHVDC2 listings stamped; Xload1 -> P=0.9 Q=0.49 CurrLim=1000";
    return r;
}

// Max over entries of |J - FD| / max(1, |J|), central differences with step 1e-6.
double jacobian_error(const mna::DaeSystem& sys, const Eigen::VectorXd& x) {
    const auto j = sys.g_matrix(x, 0.0);
    const double h = 1e-6;
    double worst = 0.0;
    for (Eigen::Index c = 0; c < x.size(); ++c) {
        Eigen::VectorXd xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        const Eigen::VectorXd fd = (sys.f_static(xp, 0.0) - sys.f_static(xm, 0.0)) / (2 * h);
        for (Eigen::Index rr = 0; rr < x.size(); ++rr) {
            worst = std::max(worst, std::abs(j(rr, c) - fd[rr]) / std::max(1.0, std::abs(j(rr, c))));
        }
    }
    return worst;
}

Outcome jacobians() {
    Outcome r;
    using acgrid::BusPair;
    const auto a = BusPair::named("A"), b = BusPair::named("B");
    std::mt19937_64 rng(99);
    std::vector<std::string> report;

    auto sweep = [&](const std::string& type, const Circuit& c, const Eigen::VectorXd& center, double spread) {
        std::uniform_real_distribution<double> u(-spread, spread);
        double worst = 0.0;
        for (int n = 0; n < 10; ++n) {
            Eigen::VectorXd x = center;
            for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += u(rng);
            worst = std::max(worst, jacobian_error(c.sys, x));
        }
        r.require(worst <= 1e-5, fmt::format("{} relative error {:.3g}", type, worst));
        report.push_back(fmt::format("{}={:.1g}", type, worst));
    };
    auto ones = [](const Circuit& c) { return Eigen::VectorXd::Ones(static_cast<Eigen::Index>(c.sys.size())); };

    Circuit slack = from_cards({acgrid::slack_instance({a, 1.0, 0.3})});
    sweep("SLACK", slack, ones(slack), 0.5);
    Circuit cpl = from_cards({acgrid::slack_instance({a, 1.0, 0.0}), acgrid::cpl_instance({a, 0.9, 0.49, 1000.0})});
    sweep("CPL", cpl, ones(cpl), 0.5);
    Circuit br = from_cards({acgrid::slack_instance({a, 1.0, 0.0}), acgrid::branch_instance({a, b, 0.1}),
                             acgrid::slack_instance({b, 1.0, 0.0})});
    sweep("ACBRANCH", br, ones(br), 0.5);
    acgrid::MachineSpec m;
    m.bus = a;
    m.avr = true;
    Circuit mac = from_cards({acgrid::machine_instance(m), acgrid::branch_instance({a, b, 0.1}),
                              acgrid::slack_instance({b, 1.0, 0.0})});
    sweep("MACHINE", mac, ones(mac), 0.5);
    // Converter kinks (angle clamps, acos domain) sit away from this steady state.
    Circuit link = isolated_link();
    solver::SolverOptions opts;
    opts.step_h = 0.01;
    opts.t_stop = 5.0;
    Eigen::VectorXd settled;
    solver::integrate(link.sys, opts, [&](const solver::SystemState& st) { settled = st.x; });
    sweep("CHVDC2", link, settled, 2e-3);

    if (r.ok) {
        r.detail = "max relative error";
        for (const auto& s : report) r.detail += " " + s;
    }
    return r;
}

Outcome determinism() {
    Outcome r;
    std::string csv[2];
    for (int k = 0; k < 2; ++k) {
        app::RunConfig cfg;
        cfg.input = "case4bus";
        cfg.t_stop = 20.0;
        cfg.extinction_control = true;
        std::ostringstream out, err;
        const int code = app::run(cfg, out, err);
        r.require(code == app::kOk, fmt::format("run exited {}: {}", code, err.str()));
        csv[k] = out.str();
    }
    r.require(!csv[0].empty() && csv[0] == csv[1], "CSV output differs between runs");
    if (r.ok) r.detail = fmt::format("two case4bus runs, {} identical bytes", csv[0].size());
    return r;
}

}  // namespace

// Criteria that cannot hold as stated (analysis in the README). They
// still print FAIL, but only an unexpected result changes the exit status.
bool known_unattainable(int id) { return id == 4; }

int main() {
    spdlog::set_level(spdlog::level::warn);
    int failures = 0, unexpected = 0;
    auto report = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.ok ? 0 : 1;
        const bool known = known_unattainable(id);
        if (o.ok == known) ++unexpected;
        std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail
                  << (known && !o.ok ? " [known unattainable as stated]" : "")
                  << (known && o.ok ? " [expected to fail; update the known list]" : "") << std::endl;
    };

    report(1, "linear MNA oracle", linear_oracle);
    report(2, "BDF1 order", bdf1_order);
    report(3, "CPL contract", cpl_contract);
    report(4, "converter algebra", converter_algebra);
    report(5, "DC-link steady state", dc_link);

    CaseRun off, on;
    std::string case_error;
    try {
        off = case4bus(false);
        on = case4bus(true);
    } catch (const std::exception& e) {
        case_error = e.what();
    }
    auto guarded = [&](const std::function<Outcome()>& f) {
        return [&, f] {
            if (!case_error.empty()) throw std::runtime_error("case4bus run failed: " + case_error);
            return f();
        };
    };
    report(6, "case-study trends", guarded([&] { return case_study(off, on); }));
    report(7, "performance envelope", guarded([&] { return performance(on); }));
    report(8, "parser corpus", parser_corpus);
    report(9, "Jacobian correctness", jacobians);
    report(10, "determinism", determinism);

    std::cout << fmt::format("{} of 10 criteria passed, {} failed, {} unexpected", 10 - failures, failures, unexpected)
              << std::endl;
    return unexpected == 0 ? 0 : 1;
}
