#include <benchmark/benchmark.h>

#include "mgrelay/dcb.hpp"
#include "mgrelay/faultsolve.hpp"
#include "mgrelay/oracle.hpp"
#include "mgrelay/report.hpp"
#include "mgrelay/scenario.hpp"
#include "mgrelay/transim.hpp"

using namespace mgrelay;

namespace {

void BM_SequenceRoundTrip(benchmark::State& state) {
    PhaseTriple x{{1.0, 0.2}, {-0.4, 0.9}, {0.3, -1.1}};
    for (auto _ : state) {
        x = sequence_to_phase(phase_to_sequence(x));
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_SequenceRoundTrip);

void BM_FaultCase(benchmark::State& state) {
    const auto c = faultsolve::case_from_number(static_cast<int>(state.range(0)));
    const bool inv = c == faultsolve::Case::LgUpstreamInverter ||
                     c == faultsolve::Case::LlUpstreamInverter;
    const MicrogridModel m = reference_system(inv ? SourceKind::Inverter : SourceKind::Ideal,
                                          {faultsolve::case_fault_kind(c), 3.68});
    for (auto _ : state) benchmark::DoNotOptimize(faultsolve::solve_case(m, c));
}
BENCHMARK(BM_FaultCase)->DenseRange(1, 6);

void BM_OraclePhaseSolve(benchmark::State& state) {
    const MicrogridModel m = reference_system(SourceKind::Inverter, {FaultKind::LineGroundA, 3.68});
    for (auto _ : state) benchmark::DoNotOptimize(oracle::solve_phase_domain(m));
}
BENCHMARK(BM_OraclePhaseSolve);

void BM_OracleWithThevenin(benchmark::State& state) {
    const MicrogridModel m = reference_system(SourceKind::Inverter, {FaultKind::LineGroundA, 3.68});
    for (auto _ : state)
        benchmark::DoNotOptimize(oracle::solve_network(m, RelayLocation::UpstreamOfFault));
}
BENCHMARK(BM_OracleWithThevenin);

void BM_Sweep(benchmark::State& state) {
    scenario::Scenario s = scenario::default_scenario();
    s.set("fault", "sweep_points", std::to_string(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(report::run_sweep(s));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sweep)->Arg(40)->Arg(400);

void BM_DcbSimulate(benchmark::State& state) {
    dcb::DcbScenario s;
    s.channel.latency = dcb::from_ms(4.0);
    s.channel.loss_probability = 0.1;
    s.fault_script = {{dcb::from_ms(10.0), dcb::RelayId::A, true, false},
                      {dcb::from_ms(10.0), dcb::RelayId::B, false, true}};
    for (auto _ : state) benchmark::DoNotOptimize(dcb::simulate(s));
}
BENCHMARK(BM_DcbSimulate);

void BM_Trajectory(benchmark::State& state) {
    const MicrogridModel m = reference_system(SourceKind::Inverter, {FaultKind::LineGroundA, 0.0});
    transim::TrajectoryOptions o;
    o.limiter = state.range(0) == 0 ? transim::LimiterKind::InstantaneousSaturation
                                    : transim::LimiterKind::Latching;
    for (auto _ : state) benchmark::DoNotOptimize(transim::simulate_trajectory(m, o));
}
BENCHMARK(BM_Trajectory)->Arg(0)->Arg(1);

void BM_ScenarioDigest(benchmark::State& state) {
    const scenario::Scenario s = scenario::default_scenario();
    for (auto _ : state) benchmark::DoNotOptimize(scenario::digest(s));
}
BENCHMARK(BM_ScenarioDigest);

} // namespace
BENCHMARK_MAIN();
