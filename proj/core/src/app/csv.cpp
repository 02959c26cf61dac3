#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "gridflux/app/output.hpp"

namespace gridflux::app {

void write_csv(const solver::WaveformSet& w, std::ostream& out) {
    std::string line = "time";
    for (std::size_t c = 0; c < w.column_count(); ++c) line += "," + w.name(c);
    out << line << '\n';
    // fmt formatting ignores the global locale; adding 0.0 folds -0 into 0.
    for (std::size_t r = 0; r < w.rows(); ++r) {
        line = fmt::format("{:.9g}", w.times[r] + 0.0);
        for (std::size_t c = 0; c < w.column_count(); ++c) line += fmt::format(",{:.9g}", w.column(c)[r] + 0.0);
        out << line << '\n';
    }
}

void write_csv(const solver::WaveformSet& w, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(w, out);
    if (!out) throw std::runtime_error("error writing " + path);
}

}  // namespace gridflux::app
