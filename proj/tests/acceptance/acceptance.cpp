// Acceptance run: one PASS/FAIL line per criterion, with the measured
// figure of merit and the wall time. Exit status is 0 unless --strict is
// given and some criterion failed.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "mgrelay/dcb.hpp"
#include "mgrelay/errors.hpp"
#include "mgrelay/faultsolve.hpp"
#include "mgrelay/netmodel.hpp"
#include "mgrelay/oracle.hpp"
#include "mgrelay/phasors.hpp"
#include "mgrelay/relaying.hpp"
#include "mgrelay/report.hpp"
#include "mgrelay/scenario.hpp"
#include "mgrelay/transim.hpp"

using namespace mgrelay;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

double rel(Phasor x, Phasor ref) { return std::abs(x - ref) / std::abs(ref); }

std::vector<double> log_points(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i)
        v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return v;
}

MicrogridModel sys(SourceKind src, FaultKind kind, double rf) { return reference_system(src, {kind, rf}); }

Verdict fortescue() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const PhaseTriple x{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        const PhaseTriple y = sequence_to_phase(phase_to_sequence(x));
        const double scale = std::max({std::abs(x.a), std::abs(x.b), std::abs(x.c)});
        for (int p = 0; p < 3; ++p) worst = std::max(worst, std::abs(y[p] - x[p]) / scale);
    }
    const SequenceTriple bal =
        phase_to_sequence({polar_deg(1, 0), polar_deg(1, -120), polar_deg(1, 120)});
    const SequenceTriple cm = phase_to_sequence({1.0, 1.0, 1.0});
    const double canon = std::max({std::abs(bal.zero), std::abs(bal.pos - 1.0), std::abs(bal.neg),
                                   std::abs(cm.zero - 1.0), std::abs(cm.pos), std::abs(cm.neg)});
    return {worst <= 1e-12 && canon <= 1e-15,
            fmt::format("round-trip max {:.2e}, canonical max {:.2e}", worst, canon)};
}

Verdict oracle_consistency() {
    double worst = 0.0;
    for (double rf : {0.0, 3.68, 100.0}) {
        const MicrogridModel m = sys(SourceKind::Ideal, FaultKind::LineGroundA, rf);
        const TheveninSet t = thevenin_line_ground(m);
        const Phasor predicted = 3.0 * t.v_eq1 / (t.z_eq1 + t.z_eq2 + t.z_eq0 + 3.0 * rf);
        worst = std::max(worst, rel(oracle::solve_phase_domain(m).i_fault.a, predicted));
    }
    return {worst <= 1e-9, fmt::format("max rel {:.2e}", worst)};
}

Verdict analytic_vs_oracle() {
    using faultsolve::Case;
    double worst_z = 0.0;
    double worst_x = 0.0;
    std::string where;
    for (Case c : {Case::LgUpstreamIdeal, Case::LgUpstreamInverter, Case::LlUpstreamIdeal,
                   Case::LlUpstreamInverter}) {
        const bool inv = c == Case::LgUpstreamInverter || c == Case::LlUpstreamInverter;
        for (double rf : log_points(3.68, 1000.0, 20)) {
            const MicrogridModel m = sys(inv ? SourceKind::Inverter : SourceKind::Ideal,
                                         faultsolve::case_fault_kind(c), rf);
            const FaultSolution a = faultsolve::solve_case(m, c);
            const FaultSolution o = oracle::solve_network(m, RelayLocation::UpstreamOfFault);
            const double e = rel(a.z_measured, o.z_measured);
            if (e > worst_z) {
                worst_z = e;
                where = fmt::format("{} rf={:.4g}", faultsolve::case_name(c), rf);
            }
            for (std::string_view k : faultsolve::exact_intermediate_keys(c))
                worst_x = std::max(worst_x, rel(a.at(k), o.at(k)));
        }
    }
    return {worst_z <= 0.02 && worst_x <= 1e-12,
            fmt::format("z max rel {:.4f} ({}), exact intermediates max {:.2e}", worst_z, where,
                        worst_x)};
}

Verdict downstream_identities() {
    double worst = 0.0;
    for (auto src : {SourceKind::Ideal, SourceKind::Inverter})
        for (double rf : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
            for (auto kind : {FaultKind::LineGroundA, FaultKind::LineLineBC}) {
                const MicrogridModel m = sys(src, kind, rf);
                const auto c = faultsolve::case_for(kind, RelayLocation::DownstreamOfFault, src);
                worst = std::max(worst, rel(faultsolve::solve_case(m, c).z_measured,
                                            m.line_m2.z1 + m.load.z_load));
            }
        }
    return {worst <= 1e-9, fmt::format("max rel {:.2e}", worst)};
}

Verdict sweep_shape() {
    std::array<std::vector<Phasor>, 2> curves;
    bool monotone = true;
    const auto rfs = log_points(3.68, 1000.0, 40);
    for (int i = 0; i < 2; ++i) {
        const SourceKind src = i == 0 ? SourceKind::Ideal : SourceKind::Inverter;
        const auto c = faultsolve::case_for(FaultKind::LineGroundA, RelayLocation::UpstreamOfFault, src);
        for (double rf : rfs) {
            const Phasor z = faultsolve::solve_case(sys(src, FaultKind::LineGroundA, rf), c).z_measured;
            if (!curves[i].empty() && !(std::abs(z) > std::abs(curves[i].back()))) monotone = false;
            curves[i].push_back(z);
        }
    }
    double diff = 0.0;
    double oracle_diff = 0.0;
    for (std::size_t k = 0; k < rfs.size(); ++k) {
        diff = std::max(diff, rel(curves[1][k], curves[0][k]));
        const auto oi = oracle::solve_network(sys(SourceKind::Ideal, FaultKind::LineGroundA, rfs[k]),
                                              RelayLocation::UpstreamOfFault);
        const auto ov = oracle::solve_network(sys(SourceKind::Inverter, FaultKind::LineGroundA, rfs[k]),
                                              RelayLocation::UpstreamOfFault);
        oracle_diff = std::max(oracle_diff, rel(ov.z_measured, oi.z_measured));
    }
    return {monotone && diff > 0.01,
            fmt::format("monotone={}, max inverter/ideal difference {:.4f} (oracle {:.2e})", monotone,
                        diff, oracle_diff)};
}

Verdict ll_near_zero() {
    double worst = 0.0;
    for (auto src : {SourceKind::Ideal, SourceKind::Inverter}) {
        const MicrogridModel m = sys(src, FaultKind::LineLineBC, 1e-3);
        const auto c = faultsolve::case_for(FaultKind::LineLineBC, RelayLocation::UpstreamOfFault, src);
        worst = std::max(worst, std::abs(faultsolve::solve_case(m, c).z_measured) /
                                    std::abs(m.load.z_load));
    }
    return {worst < 0.01, fmt::format("max |z|/|Z_L| {:.2e}", worst)};
}

Verdict ll_symmetry() {
    double anti = 0.0;
    for (auto src : {SourceKind::Ideal, SourceKind::Inverter})
        for (double rf : {1e-3, 1.0, 100.0}) {
            const auto n = oracle::solve_phase_domain(sys(src, FaultKind::LineLineBC, rf));
            anti = std::max(anti, std::abs(n.i_fault.b + n.i_fault.c) / std::abs(n.i_fault.b));
        }
    double zero = 0.0;
    for (double rf : {1e-3, 1.0, 100.0}) {
        const auto s = oracle::solve_network(sys(SourceKind::Ideal, FaultKind::LineLineBC, rf),
                                             RelayLocation::UpstreamOfFault);
        zero = std::max(zero, std::abs(s.relay_seq_i.zero) / std::abs(s.relay_seq_i.pos));
    }
    return {anti <= 1e-12 && zero <= 1e-9,
            fmt::format("|I_bf+I_cf|/|I_bf| {:.2e}, |I0|/|I1| {:.2e}", anti, zero)};
}

Verdict dcb_truth_table() {
    using namespace dcb;
    const MicrogridModel m = sys(SourceKind::Ideal, FaultKind::LineGroundA, 0.0);
    DcbScenario internal;
    internal.channel.latency = from_ms(4.0);
    internal.fault_script = couple_from_network(m, {}, from_ms(10.0));
    DcbScenario external = internal;
    external.fault_script =
        couple_from_network(m, {RelayTerminal::MidpointLoadSide, RelayTerminal::LoadBus}, from_ms(10.0));
    DcbScenario dead = internal;
    dead.channel.operational = false;
    DcbScenario late = external;
    late.channel.latency = late.relay_b.coordination_time;

    auto trips = [](const DcbScenario& s) {
        const auto ev = simulate(s);
        return std::pair{outcome(ev, RelayId::A).tripped, outcome(ev, RelayId::B).tripped};
    };
    const auto [ia, ib] = trips(internal);
    const auto [ea, eb] = trips(external);
    const auto [da, db] = trips(dead);
    const auto [la, lb] = trips(late);
    // A sees the external fault behind it and keys the carrier; B is the blocked relay
    DcbScenario lossy = external;
    lossy.channel.loss_probability = 0.5;
    lossy.channel.seed = 42;
    const bool deterministic = format_trace(simulate(lossy)) == format_trace(simulate(lossy));

    const bool pass = ia && ib && !ea && !eb && da && db && lb && !la && deterministic;
    return {pass, fmt::format("internal {}/{}, external {}/{}, dead channel {}/{}, late block B={}, "
                              "deterministic={}",
                              ia, ib, ea, eb, da, db, lb, deterministic)};
}

Verdict trajectories() {
    const MicrogridModel lg = sys(SourceKind::Inverter, FaultKind::LineGroundA, 3.68);
    const transim::Trajectory t = transim::simulate_trajectory(lg);
    bool first_quadrant = true;
    for (const auto& p : t.points)
        if (p.faulted) first_quadrant = first_quadrant && p.z_lg.real() > 0.0 && p.z_lg.imag() > 0.0;
    const double up = rel(t.points.back().z_lg, faultsolve::solve_lg_upstream_inverter(lg).z_measured);

    transim::TrajectoryOptions o;
    o.location = RelayLocation::DownstreamOfFault;
    const MicrogridModel ll = sys(SourceKind::Inverter, FaultKind::LineLineBC, 1.0);
    const MicrogridModel lgd = sys(SourceKind::Inverter, FaultKind::LineGroundA, 3.68);
    const double ll_err = rel(transim::simulate_trajectory(ll, o).points.back().z_ll, ll.z_d1());
    const double lg_err = rel(transim::simulate_trajectory(lgd, o).points.back().z_lg, lgd.z_d1());
    return {t.converged && first_quadrant && up <= 0.05 && ll_err <= 0.01 && lg_err <= 0.01,
            fmt::format("first quadrant={}, upstream final rel {:.4f}, downstream LL {:.2e}, LG {:.2e}",
                        first_quadrant, up, ll_err, lg_err)};
}

Verdict limiter_contract() {
    double worst = 0.0;
    int settled = 0;
    bool converged = true;
    for (auto limiter : {transim::LimiterKind::InstantaneousSaturation, transim::LimiterKind::Latching})
        for (auto kind : {FaultKind::LineGroundA, FaultKind::LineLineBC})
            for (double rf : {0.0, 3.68}) {
                transim::TrajectoryOptions o;
                o.limiter = limiter;
                const auto t = transim::simulate_trajectory(sys(SourceKind::Inverter, kind, rf), o);
                converged = converged && t.converged;
                for (const auto& p : t.points) {
                    if (!p.limited || !p.settled) continue;
                    ++settled;
                    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(p.source_i[k]));
                }
            }
    const MicrogridModel m = sys(SourceKind::Inverter, FaultKind::LineGroundA, 0.0);
    const auto u = transim::calibrate_unbalance(m, {FaultKind::LineGroundA, 0.0});
    const auto u368 = transim::calibrate_unbalance(m, {FaultKind::LineGroundA, 3.68});
    const bool bracket = u.v2_fraction >= 0.3 && u.v2_fraction <= 0.9 && u.v0_fraction >= 0.3 &&
                         u.v0_fraction <= 0.9;
    return {converged && settled > 0 && worst <= 70.0 * (1.0 + 1e-3) && bracket,
            fmt::format("max settled |I| {:.4f} A over {} steps, bolted LG fractions v2={:.3f} "
                        "v0={:.3f} (rf=3.68: v2={:.3f} v0={:.3f})",
                        worst, settled, u.v2_fraction, u.v0_fraction, u368.v2_fraction,
                        u368.v0_fraction)};
}

std::string run_cli(const std::string& args) {
    const std::string cmd = fmt::format("\"{}\" {}", MGRELAY_CLI, args);
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) return {};
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
    return out;
}

Verdict cli_reproducibility() {
    const std::filesystem::path file = std::filesystem::path(MGRELAY_SCENARIO_DIR) / "default.ini";
    const scenario::Scenario s = scenario::load_scenario(file);
    const std::string d1 = scenario::digest(s);
    const std::string d2 = scenario::digest(scenario::default_scenario());
    const std::string d3 = scenario::digest(scenario::parse_scenario(scenario::emit_scenario(s)));

    const std::string emitted = scenario::emit_scenario(s);
    const std::string twice = scenario::emit_scenario(scenario::parse_scenario(emitted));

    const std::string sweep1 = run_cli(fmt::format("sweep \"{}\"", file.string()));
    const std::string sweep2 = run_cli(fmt::format("sweep \"{}\"", file.string()));
    const bool sweep_ok = !sweep1.empty() && sweep1 == sweep2 &&
                          sweep1.find(fmt::format("# scenario_sha256 {}", d1)) != std::string::npos;
    return {d1 == d2 && d1 == d3 && emitted == twice && sweep_ok,
            fmt::format("digest {}, sweep {} bytes identical={}, round-trip idempotent={}",
                        d1.substr(0, 12), sweep1.size(), sweep1 == sweep2, emitted == twice)};
}

struct Criterion {
    int id;
    std::string_view name;
    double budget_s;
    std::function<Verdict()> run;
};

} // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::string_view(argv[1]) == "--strict";
    const std::vector<Criterion> criteria{
        {1, "fortescue round-trip", 1.0, fortescue},
        {2, "oracle series-network consistency", 1.0, oracle_consistency},
        {3, "analytic vs oracle, upstream cases", 5.0, analytic_vs_oracle},
        {4, "downstream identities", 1.0, downstream_identities},
        {5, "sweep shape, inverter vs ideal", 2.0, sweep_shape},
        {6, "upstream LL near-zero impedance", 1.0, ll_near_zero},
        {7, "LL antisymmetry and zero-sequence isolation", 1.0, ll_symmetry},
        {8, "DCB truth table", 1.0, dcb_truth_table},
        {9, "trajectory properties", 5.0, trajectories},
        {10, "limiter contract", 5.0, limiter_contract},
        {11, "CLI reproducibility", 1.0, cli_reproducibility},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, fmt::format("exception: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = v.pass && in_time;
        if (!pass) ++failed;
        fmt::print("{} {:>2} {} | {} | {:.3f} s (< {} s{})\n", pass ? "PASS" : "FAIL", c.id, c.name,
                   v.detail, secs, c.budget_s, in_time ? "" : ", over budget");
    }
    fmt::print("{} of {} criteria pass\n", criteria.size() - static_cast<std::size_t>(failed),
               criteria.size());
    return strict && failed > 0 ? 1 : 0;
}
