#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gridflux/app/run.hpp"

namespace {

void setup_logging() {
    // Diagnostics go to stderr so stdout stays clean for CSV.
    auto logger = spdlog::stderr_color_mt("gridflux");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("GRIDFLUX_LOG")) {
        const auto lvl = spdlog::level::from_str(env);
        if (lvl == spdlog::level::off && std::string(env) != "off") {
            std::cerr << "warning: ignoring GRIDFLUX_LOG=" << env << " (use error, warn, info or debug)\n";
        } else {
            spdlog::set_level(lvl);
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"gridflux: SPICE-style power-grid transient simulator"};
    app.require_subcommand(1);

    gridflux::app::RunConfig cfg;
    double t_stop = 0, step = 0, reltol = 0, abstol = 0;
    std::string ext;
    bool appc = false, droponly = false;

    auto* run = app.add_subcommand("run", "simulate a netlist file or the built-in case4bus scenario");
    run->add_option("input", cfg.input, "netlist path or 'case4bus'")->required();
    auto* o_tstop = run->add_option("--tstop", t_stop, "simulation length [s]");
    auto* o_step = run->add_option("--step", step, "fixed time step [s]");
    auto* o_rel = run->add_option("--reltol", reltol, "relative residual tolerance");
    auto* o_abs = run->add_option("--abstol", abstol, "absolute residual tolerance");
    run->add_option("--print", cfg.print_vars, "output variable glob (repeatable), e.g. 'V(*)' or 'VM(Bus1)'");
    run->add_option("--out", cfg.out_csv, "CSV output path (default: stdout)");
    run->add_option("--plot", cfg.out_plot, "SVG plot output path");
    auto* o_ext = run->add_option("--extinction-control", ext, "case4bus: extinction-angle control")
                      ->check(CLI::IsMember({"on", "off"}));
    auto* f_appc = run->add_flag("--appendix-c-scaling", appc, "case4bus: bridge count scales the whole DC voltage (default)");
    auto* f_droponly = run->add_flag("--drop-only-scaling", droponly, "case4bus: bridge count scales only the commutation drop");
    f_appc->excludes(f_droponly);
    run->add_option("--config", cfg.config, "case4bus: scenario JSON overriding the built-in values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : gridflux::app::kInputError;
    }

    if (*o_tstop) cfg.t_stop = t_stop;
    if (*o_step) cfg.step_h = step;
    if (*o_rel) cfg.rel_tol = reltol;
    if (*o_abs) cfg.abs_tol = abstol;
    if (*o_ext) cfg.extinction_control = ext == "on";
    if (*f_appc) cfg.appendix_c_scaling = true;
    if (*f_droponly) cfg.appendix_c_scaling = false;

    return gridflux::app::run(cfg, std::cout, std::cerr);
}
