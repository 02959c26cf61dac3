#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gridflux::app {

struct RunConfig {
    std::string input;  // netlist path or "case4bus"
    std::optional<double> t_stop;
    std::optional<double> step_h;
    std::optional<double> rel_tol;
    std::optional<double> abs_tol;
    std::vector<std::string> print_vars;  // glob patterns
    std::string out_csv;                  // empty: CSV on stdout
    std::string out_plot;
    std::optional<bool> extinction_control;
    std::optional<bool> appendix_c_scaling;
    std::string config;  // scenario JSON
};

enum ExitCode { kOk = 0, kSolverFailure = 1, kInputError = 2 };

/// parse -> elaborate -> stamp -> operating point -> transient -> CSV/plot.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Case-insensitive glob with '*' and '?'.
bool glob_match(const std::string& pattern, const std::string& text);

}  // namespace gridflux::app
