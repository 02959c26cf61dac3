#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "gridflux/app/output.hpp"

namespace gridflux::app {

namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 70, kRight = 180, kTop = 40, kBottom = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Roughly five "nice" tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (raw <= step) break;
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
        out.push_back(std::fabs(t) < step * 1e-9 ? 0.0 : t);
    }
    return out;
}

}  // namespace

std::string render_svg(const solver::WaveformSet& w, const std::vector<std::string>& vars, const std::string& title) {
    if (vars.empty()) throw std::invalid_argument("plot needs at least one variable");
    std::vector<const std::vector<double>*> series;
    for (const auto& v : vars) {
        const auto* col = w.find(v);
        if (!col) throw std::invalid_argument("plot variable not in waveform set: " + v);
        series.push_back(col);
    }
    if (w.rows() == 0) throw std::invalid_argument("plot needs at least one time point");

    double t0 = w.times.front(), t1 = w.times.back();
    if (t1 <= t0) t1 = t0 + 1;
    double y0 = INFINITY, y1 = -INFINITY;
    for (const auto* s : series) {
        for (double v : *s) {
            if (std::isfinite(v)) {
                y0 = std::min(y0, v);
                y1 = std::max(y1, v);
            }
        }
    }
    if (!std::isfinite(y0)) y0 = 0, y1 = 1;
    if (y1 - y0 < 1e-12 * std::max(1.0, std::fabs(y0))) {
        const double pad = std::max(std::fabs(y0) * 0.05, 0.5);
        y0 -= pad;
        y1 += pad;
    } else {
        const double pad = (y1 - y0) * 0.05;
        y0 -= pad;
        y1 += pad;
    }
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * pw; };
    auto py = [&](double v) { return kTop + (y1 - v) / (y1 - y0) * ph; };

    std::string s;
    s += fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        kWidth, kHeight, kWidth, kHeight);
    s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
    if (!title.empty()) {
        s += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                         kLeft + pw / 2, escape(title));
    }
    for (double t : ticks(t0, t1)) {
        s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n", px(t), kTop,
                         kTop + ph);
        s += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:g}</text>\n", px(t), kTop + ph + 16, t);
    }
    for (double v : ticks(y0, y1)) {
        s += fmt::format("<line x1=\"{1}\" y1=\"{0:.2f}\" x2=\"{2}\" y2=\"{0:.2f}\" stroke=\"#dddddd\"/>\n", py(v), kLeft,
                         kLeft + pw);
        s += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:.6g}</text>\n", kLeft - 6, py(v) + 4, v);
    }
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                     kTop, pw, ph);
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">time (s)</text>\n", kLeft + pw / 2,
                     kHeight - 10);
    s += fmt::format("<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">value</text>\n",
                     kTop + ph / 2);

    // Thin very long series so the file stays a reasonable size.
    const std::size_t n = w.rows();
    const std::size_t stride = std::max<std::size_t>(1, n / 4000);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kColors[k % std::size(kColors)];
        std::string pts;
        for (std::size_t r = 0; r < n; r += stride) {
            const double v = (*series[k])[r];
            if (!std::isfinite(v)) continue;
            pts += fmt::format("{:.2f},{:.2f} ", px(w.times[r]), py(v));
        }
        if ((n - 1) % stride != 0) pts += fmt::format("{:.2f},{:.2f} ", px(w.times[n - 1]), py((*series[k])[n - 1]));
        if (!pts.empty()) pts.pop_back();
        s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
        const double ly = kTop + 10 + 18 * static_cast<double>(k);
        s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                         kLeft + pw + 12, ly, kLeft + pw + 32, color);
        s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", kLeft + pw + 38, ly + 4, escape(vars[k]));
    }
    s += "</svg>\n";
    return s;
}

void emit_plot(const solver::WaveformSet& w, const std::vector<std::string>& vars, const std::string& path) {
    const std::string svg = render_svg(w, vars);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << svg;
}

}  // namespace gridflux::app
