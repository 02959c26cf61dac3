#include <benchmark/benchmark.h>

#include <random>

#include "gridflux/app/scenario.hpp"
#include "gridflux/mna/dae_system.hpp"
#include "gridflux/netlist/elaborate.hpp"
#include "gridflux/netlist/expr.hpp"
#include "gridflux/netlist/tape.hpp"
#include "gridflux/solver/solver.hpp"

using namespace gridflux;

namespace {

struct Case4bus {
    netlist::FlatCircuit flat;
    mna::SystemLayout layout;
    mna::DaeSystem sys;

    Case4bus()
        : flat(netlist::elaborate(app::build_case4bus({}))), layout(mna::build_layout(flat)), sys(flat, layout) {}
};

const Case4bus& case4bus() {
    static const Case4bus c;
    return c;
}

void BM_TapeEval(benchmark::State& state) {
    // The CPL real-rail current, the hottest expression shape in the grid models.
    const auto e = netlist::parse_expr(
        "limit((0.9*V(a)+0.49*V(b))/limit(V(a)*V(a)+V(b)*V(b), 1e-12, 1e30), -1000, 1000)");
    const auto tape =
        netlist::Tape::compile(e, [](const netlist::Reference& r) -> std::size_t { return r.name == "a" ? 0 : 1; });
    double slots[2] = {1.0, 0.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(slots);
        benchmark::DoNotOptimize(tape.eval(slots));
    }
}
BENCHMARK(BM_TapeEval);

void BM_ResidualAndJacobian(benchmark::State& state) {
    const auto& c = case4bus();
    const auto dc = solver::dc_operating_point(c.sys, {});
    mna::Vector f;
    mna::Matrix g;
    for (auto _ : state) {
        c.sys.evaluate(dc.x, 0.0, {}, f, &g);
        benchmark::DoNotOptimize(g.data());
    }
    state.counters["unknowns"] = static_cast<double>(c.sys.size());
}
BENCHMARK(BM_ResidualAndJacobian);

void BM_OperatingPoint(benchmark::State& state) {
    const auto& c = case4bus();
    for (auto _ : state) benchmark::DoNotOptimize(solver::dc_operating_point(c.sys, {}).x.data());
}
BENCHMARK(BM_OperatingPoint)->Unit(benchmark::kMillisecond);

void BM_Bdf1Step(benchmark::State& state) {
    const auto& c = case4bus();
    solver::SolverOptions opts;
    solver::SystemState s;
    s.x = solver::dc_operating_point(c.sys, opts).x;
    s.x_prev = s.x;
    for (auto _ : state) {
        auto next = solver::bdf1_step(c.sys, s, 0.01, opts);
        benchmark::DoNotOptimize(next.x.data());
    }
}
BENCHMARK(BM_Bdf1Step)->Unit(benchmark::kMicrosecond);

void BM_Case4busTenSeconds(benchmark::State& state) {
    const auto& c = case4bus();
    solver::SolverOptions opts;
    opts.t_stop = 10.0;
    for (auto _ : state) {
        const auto stats = solver::integrate(c.sys, opts, [](const solver::SystemState&) {});
        benchmark::DoNotOptimize(stats.steps);
    }
}
BENCHMARK(BM_Case4busTenSeconds)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
