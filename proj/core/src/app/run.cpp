#include "gridflux/app/run.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gridflux/acgrid/library.hpp"
#include "gridflux/app/output.hpp"
#include "gridflux/app/scenario.hpp"
#include "gridflux/error.hpp"
#include "gridflux/mna/dae_system.hpp"
#include "gridflux/netlist/elaborate.hpp"
#include "gridflux/solver/solver.hpp"
#include "../netlist/text_util.hpp"

namespace gridflux::app {

using netlist::detail::lower;
using netlist::detail::iequals;

bool glob_match(const std::string& pattern, const std::string& text) {
    // Iterative matcher with single-star backtracking.
    std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || lower(pattern[p]) == lower(text[t]))) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

namespace {

struct Column {
    std::string name;
    std::optional<std::size_t> a;  // unknown, or real-rail unknown for VM()
    std::optional<std::size_t> b;  // imaginary-rail unknown for VM()
    bool magnitude = false;
};

std::vector<Column> candidates(const netlist::FlatCircuit& flat, const mna::SystemLayout& layout) {
    std::vector<Column> out;
    for (std::size_t i = 0; i < layout.total; ++i) out.push_back({layout.var_names[i], i, std::nullopt, false});
    // VM(<bus>) for every top-level pair <bus>R / <bus>I.
    for (std::size_t n = 1; n < flat.node_names.size(); ++n) {
        const std::string& name = flat.node_names[n];
        if (name.size() < 2 || name.find('.') != std::string::npos) continue;
        if (name.back() != 'R' && name.back() != 'r') continue;
        const std::string bus = name.substr(0, name.size() - 1);
        auto im = flat.find_node(bus + "I");
        if (!im) continue;
        out.push_back({"VM(" + bus + ")", layout.node_var(n), layout.node_var(*im), true});
    }
    return out;
}

std::vector<Column> select_columns(const std::vector<std::string>& patterns, const std::vector<Column>& all) {
    std::vector<Column> out;
    for (const auto& pat : patterns) {
        bool any = false;
        for (const auto& c : all) {
            if (!glob_match(pat, c.name)) continue;
            any = true;
            bool dup = false;
            for (const auto& o : out) dup = dup || o.name == c.name;
            if (!dup) out.push_back(c);
        }
        if (!any) throw std::invalid_argument("output pattern '" + pat + "' matches no variable");
    }
    return out;
}

double value_of(const Column& c, const mna::Vector& x) {
    auto get = [&](std::optional<std::size_t> i) { return i ? x[static_cast<Eigen::Index>(*i)] : 0.0; };
    if (!c.magnitude) return get(c.a);
    return std::hypot(get(c.a), get(c.b));
}

std::optional<double> option_value(const netlist::NetlistDocument& doc, std::string_view key) {
    std::optional<double> v;
    for (const auto& d : doc.directives) {
        if (d.kind != netlist::DirectiveKind::Options) continue;
        for (const auto& [k, e] : d.assignments) {
            if (iequals(k, key) && netlist::is_closed(e)) v = netlist::eval_expr(e, {});
        }
    }
    return v;
}

netlist::NetlistDocument load_document(const RunConfig& cfg, std::ostream& err) {
    if (iequals(cfg.input, "case4bus")) {
        ScenarioConfig sc;
        if (!cfg.config.empty()) sc = load_scenario_config(cfg.config, sc);
        if (cfg.extinction_control) sc.control.extinction_control = *cfg.extinction_control;
        if (cfg.appendix_c_scaling) sc.hvdc.appendix_c_scaling = *cfg.appendix_c_scaling;
        return build_case4bus(sc);
    }
    if (cfg.extinction_control || cfg.appendix_c_scaling || !cfg.config.empty()) {
        err << "warning: --extinction-control, scaling flags and --config only apply to case4bus\n";
    }
    std::ifstream in(cfg.input, std::ios::binary);
    if (!in) throw std::invalid_argument("file not found: " + cfg.input);
    std::stringstream ss;
    ss << in.rdbuf();
    auto doc = netlist::parse_netlist(ss.str());
    // The shipped device library is always visible; local definitions win.
    netlist::merge_subckts(doc, acgrid::powergrid_library());
    return doc;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    solver::SolverOptions opts;
    std::vector<Column> columns;
    std::optional<mna::DaeSystem> sys;
    try {
        const auto doc = load_document(cfg, err);
        const auto flat = netlist::elaborate(doc);
        auto layout = mna::build_layout(flat);
        sys.emplace(flat, layout);
        spdlog::info("{} unknowns ({} nodes, {} auxiliary currents), {} devices", layout.total, layout.n_nodes,
                     layout.n_aux, flat.instances.size());

        for (const auto& d : doc.directives) {
            if (d.kind == netlist::DirectiveKind::Tran) {
                opts.step_h = d.tstep;
                opts.t_stop = d.tstop;
            }
        }
        if (auto v = option_value(doc, "RELTOL")) opts.rel_tol = *v;
        if (auto v = option_value(doc, "ABSTOL")) opts.abs_tol = *v;
        if (cfg.t_stop) opts.t_stop = *cfg.t_stop;
        if (cfg.step_h) opts.step_h = *cfg.step_h;
        if (cfg.rel_tol) opts.rel_tol = *cfg.rel_tol;
        if (cfg.abs_tol) opts.abs_tol = *cfg.abs_tol;
        opts.validate();

        std::vector<std::string> patterns = cfg.print_vars;
        if (patterns.empty()) {
            for (const auto& d : doc.directives) {
                if (d.kind != netlist::DirectiveKind::Print) continue;
                for (const auto& w : d.words) {
                    if (!iequals(w, "TRAN")) patterns.push_back(w);
                }
            }
        }
        if (patterns.empty()) {
            for (std::size_t i = 0; i < layout.n_nodes; ++i) {
                if (layout.var_names[i].find('.') == std::string::npos) patterns.push_back(layout.var_names[i]);
            }
        }
        columns = select_columns(patterns, candidates(flat, layout));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    solver::WaveformSet w;
    for (const auto& c : columns) w.add_column(c.name);
    solver::TransientStats stats;
    const auto start = std::chrono::steady_clock::now();
    try {
        stats = solver::integrate(*sys, opts, [&](const solver::SystemState& st) {
            w.times.push_back(st.t);
            for (std::size_t c = 0; c < columns.size(); ++c) w.column(c).push_back(value_of(columns[c], st.x));
        });
    } catch (const Error& e) {
        err << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    try {
        if (cfg.out_csv.empty()) {
            write_csv(w, out);
        } else {
            write_csv(w, cfg.out_csv);
        }
        if (!cfg.out_plot.empty()) {
            std::vector<std::string> names;
            for (const auto& c : columns) names.push_back(c.name);
            emit_plot(w, names, cfg.out_plot);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    std::ostream& report = cfg.out_csv.empty() ? err : out;
    report << fmt::format("transient: {} steps, {} Newton iterations, {:.3f} s wall clock{}\n", stats.steps,
                          stats.newton_iterations, seconds, stats.dc.ramped ? " (operating point needed continuation)" : "");
    return kOk;
}

}  // namespace gridflux::app
