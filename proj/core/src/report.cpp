#include "mgrelay/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mgrelay/errors.hpp"
#include "mgrelay/oracle.hpp"
#include "mgrelay/relaying.hpp"

#ifndef MGRELAY_VERSION
#define MGRELAY_VERSION "0.0.0"
#endif

namespace mgrelay::report {

namespace {

using scenario::format_complex;
using scenario::format_number;

std::string preamble(const scenario::Scenario& s) {
    return fmt::format("# mgrelay {}\n# scenario_sha256 {}\n", version(), scenario::digest(s));
}

double relative_error(Phasor z, Phasor ref) { return std::abs(z - ref) / std::abs(ref); }

void put_solution(std::string& out, const FaultSolution& f) {
    const std::array<const char*, 3> ph{"a", "b", "c"};
    for (int p = 0; p < 3; ++p)
        out += fmt::format("relay_v_{} = {}\n", ph[static_cast<std::size_t>(p)],
                           format_complex(f.relay_v[p]));
    for (int p = 0; p < 3; ++p)
        out += fmt::format("relay_i_{} = {}\n", ph[static_cast<std::size_t>(p)],
                           format_complex(f.relay_i[p]));
    out += fmt::format("relay_v0 = {}\nrelay_v1 = {}\nrelay_v2 = {}\n",
                       format_complex(f.relay_seq_v.zero), format_complex(f.relay_seq_v.pos),
                       format_complex(f.relay_seq_v.neg));
    out += fmt::format("relay_i0 = {}\nrelay_i1 = {}\nrelay_i2 = {}\n",
                       format_complex(f.relay_seq_i.zero), format_complex(f.relay_seq_i.pos),
                       format_complex(f.relay_seq_i.neg));
    out += fmt::format("z_measured = {}\n", format_complex(f.z_measured));
}

} // namespace

std::string_view version() { return MGRELAY_VERSION; }

faultsolve::Case scenario_case(const scenario::Scenario& s) {
    return faultsolve::case_for(scenario::fault_spec(s).kind, scenario::relay_location(s),
                                scenario::source_kind(s));
}

CaseResult run_case(const scenario::Scenario& s, std::optional<int> case_number,
                    std::optional<double> rf) {
    CaseResult r;
    r.which = case_number ? faultsolve::case_from_number(*case_number) : scenario_case(s);

    MicrogridModel m = scenario::build_model(s, rf);
    m.fault.kind = faultsolve::case_fault_kind(r.which);
    const RelayLocation loc = faultsolve::case_location(r.which);
    r.rf = m.fault.rf;

    using faultsolve::Case;
    switch (r.which) {
    case Case::LgUpstreamIdeal:
        r.analytical = faultsolve::solve_lg_upstream_ideal(m, scenario::voltage_form(s));
        break;
    case Case::LgUpstreamInverter:
        r.analytical = faultsolve::solve_lg_upstream_inverter(m, scenario::voltage_form(s));
        break;
    default: r.analytical = faultsolve::solve_case(m, r.which); break;
    }
    r.oracle = oracle::solve_network(m, loc);
    r.z_d1 = m.z_d1();
    r.relative_error = relative_error(r.analytical.z_measured, r.oracle.z_measured);

    scenario::Scenario with_location = s;
    with_location.set("relay", "location",
                      loc == RelayLocation::DownstreamOfFault ? "downstream" : "upstream");
    r.k = scenario::k_factor(with_location, m);
    return r;
}

std::string format_case(const scenario::Scenario& s, const CaseResult& r) {
    std::string out = preamble(s);
    const bool lg = faultsolve::case_fault_kind(r.which) == FaultKind::LineGroundA;

    out += "[result]\n";
    out += fmt::format("case = {}\n", faultsolve::case_number(r.which));
    out += fmt::format("name = {}\n", faultsolve::case_name(r.which));
    out += fmt::format("rf_ohm = {}\n", format_number(r.rf));
    out += fmt::format("z_measured = {}\n", format_complex(r.analytical.z_measured));
    out += fmt::format("oracle_z_measured = {}\n", format_complex(r.oracle.z_measured));
    out += fmt::format("relative_error = {}\n", format_number(r.relative_error));
    out += fmt::format("z_d1 = {}\n", format_complex(r.z_d1));
    if (lg) {
        out += fmt::format("k = {}\n", format_complex(r.k));
        out += fmt::format("z_compensated = {}\n",
                           format_complex(relaying::compensated_impedance(r.analytical, r.k)));
        out += fmt::format("oracle_z_compensated = {}\n",
                           format_complex(relaying::compensated_impedance(r.oracle, r.k)));
    }
    out += fmt::format("oracle_residual = {}\n", format_number(r.oracle.residual));

    out += "\n[analytical]\n";
    put_solution(out, r.analytical);
    out += "\n[intermediates]\n";
    for (const auto& [k, v] : r.analytical.intermediates)
        out += fmt::format("{} = {}\n", k, format_complex(v));
    out += "\n[oracle]\n";
    put_solution(out, r.oracle);
    out += "\n[oracle_intermediates]\n";
    for (const auto& [k, v] : r.oracle.intermediates)
        out += fmt::format("{} = {}\n", k, format_complex(v));
    return out;
}

std::vector<SweepRow> run_sweep(const scenario::Scenario& s, std::optional<int> case_number) {
    std::vector<SweepRow> rows;
    for (double rf : scenario::sweep_spec(s).values()) {
        const CaseResult r = run_case(s, case_number, rf);
        rows.push_back({rf, r.analytical.z_measured, r.oracle.z_measured, r.relative_error});
    }
    return rows;
}

std::string format_sweep(const scenario::Scenario& s, const std::vector<SweepRow>& rows) {
    std::string out = preamble(s);
    out += "rf_ohm,Re_Z,Im_Z,mag_Z,oracle_mag_Z,rel_err\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{},{},{}\n", format_number(r.rf), format_number(r.z.real()),
                           format_number(r.z.imag()), format_number(std::abs(r.z)),
                           format_number(std::abs(r.z_oracle)), format_number(r.rel_err));
    return out;
}

DcbRun run_dcb(const scenario::Scenario& s, std::optional<std::uint64_t> seed) {
    DcbRun r;
    r.scenario = scenario::dcb_scenario(s, seed);
    r.events = dcb::simulate(r.scenario);
    return r;
}

std::string format_dcb(const scenario::Scenario& s, const DcbRun& r) {
    std::string out = preamble(s);
    out += dcb::format_trace(r.events);
    for (auto id : {dcb::RelayId::A, dcb::RelayId::B}) {
        const auto o = dcb::outcome(r.events, id);
        out += fmt::format("# summary relay={} tripped={} blocked={}\n", dcb::to_string(id),
                           o.tripped, o.blocked);
    }
    return out;
}

transim::Trajectory run_trajectory(const scenario::Scenario& s) {
    transim::TrajectoryOptions o = scenario::trajectory_options(s);
    const MicrogridModel m = scenario::build_model(s);
    o.k = scenario::k_factor(s, m);
    return transim::simulate_trajectory(m, o);
}

std::string format_trajectory_report(const scenario::Scenario& s, const transim::Trajectory& t) {
    std::string out = preamble(s);
    out += transim::format_trajectory(t);
    if (t.points.empty()) return out;

    const auto& last = t.points.back();
    bool lg_quadrant = true;
    bool ll_quadrant = true;
    for (const auto& p : t.points) {
        if (!p.faulted) continue;
        lg_quadrant = lg_quadrant && p.z_lg.real() > 0.0 && p.z_lg.imag() > 0.0;
        ll_quadrant = ll_quadrant && p.z_ll.real() > 0.0 && p.z_ll.imag() > 0.0;
    }
    out += fmt::format("# summary final_z_lg={} final_z_ll={}\n", format_complex(last.z_lg),
                       format_complex(last.z_ll));
    out += fmt::format("# summary first_quadrant_lg={} first_quadrant_ll={} converged={}\n",
                       lg_quadrant, ll_quadrant, t.converged);
    return out;
}

std::string format_validation(const scenario::Scenario& s) {
    const MicrogridModel m = scenario::build_model(s);
    std::string out = preamble(s);
    out += "[model]\n";
    out += fmt::format("case = {}\n", faultsolve::case_number(scenario_case(s)));
    out += fmt::format("z_1m = {}\n", format_complex(m.line_1m.z1));
    out += fmt::format("z_1m0 = {}\n", format_complex(m.line_1m.z0));
    out += fmt::format("z_m2 = {}\n", format_complex(m.line_m2.z1));
    out += fmt::format("z_m20 = {}\n", format_complex(m.line_m2.z0));
    out += fmt::format("z_load = {}\n", format_complex(m.load.z_load));
    out += fmt::format("v_s1 = {}\n", format_complex(positive_sequence_emf(m.source)));
    out += fmt::format("sweep_points = {}\n", scenario::sweep_spec(s).values().size());
    if (s.has_section("dcb")) scenario::dcb_scenario(s);
    if (s.has_section("transient")) scenario::trajectory_options(s);
    out += "\n";
    out += scenario::emit_scenario(s);
    return out;
}

} // namespace mgrelay::report
