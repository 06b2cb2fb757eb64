#include "mgrelay/transim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "mgrelay/errors.hpp"
#include "mgrelay/oracle.hpp"
#include "mgrelay/relaying.hpp"

namespace mgrelay::transim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxIterations = 50;
constexpr double kCapTolerance = 1e-6;
constexpr double kSettleTolerance = 1e-4;

using Scale = std::array<double, 3>;

// Source-current response G: column q is the source current for a unit EMF on phase q.
struct Response {
    std::array<PhaseTriple, 3> columns{};

    PhaseTriple operator()(const PhaseTriple& e) const {
        PhaseTriple i;
        for (int q = 0; q < 3; ++q) i += e[q] * columns[static_cast<std::size_t>(q)];
        return i;
    }
};

Response source_response(const MicrogridModel& m, bool faulted) {
    Response g;
    for (int q = 0; q < 3; ++q) {
        oracle::NetworkOptions o;
        o.apply_fault = faulted;
        PhaseTriple e;
        e[q] = 1.0;
        o.source_emf = e;
        g.columns[static_cast<std::size_t>(q)] = oracle::solve_phase_domain(m, o).i_line_1m;
    }
    return g;
}

PhaseTriple scaled(const PhaseTriple& e, const Scale& s) {
    return {s[0] * e.a, s[1] * e.b, s[2] * e.c};
}

double worst(const PhaseTriple& i) {
    return std::max({std::abs(i.a), std::abs(i.b), std::abs(i.c)});
}

struct LimitResult {
    Scale s{1.0, 1.0, 1.0};
    int iterations = 0;
    bool converged = true;
};

// Per-phase scales that bring every source current to at most i_max.
// Newton on the phases that are over the limit or already scaled.
LimitResult saturate(const Response& g, const PhaseTriple& e, double i_max) {
    LimitResult r;
    Scale& s = r.s;
    for (r.iterations = 0; r.iterations < kMaxIterations; ++r.iterations) {
        const PhaseTriple cur = g(scaled(e, s));
        if (worst(cur) <= i_max * (1.0 + kCapTolerance)) {
            bool slack = false;
            for (int p = 0; p < 3; ++p)
                if (s[static_cast<std::size_t>(p)] < 1.0 &&
                    std::abs(cur[p]) < i_max * (1.0 - kCapTolerance))
                    slack = true;
            if (!slack) return r;
        }

        std::vector<int> active;
        for (int p = 0; p < 3; ++p)
            if (std::abs(cur[p]) > i_max || s[static_cast<std::size_t>(p)] < 1.0)
                active.push_back(p);

        const auto n = static_cast<Eigen::Index>(active.size());
        Eigen::MatrixXd jac(n, n);
        Eigen::VectorXd res(n);
        bool degenerate = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int p = active[static_cast<std::size_t>(i)];
            const double mag = std::abs(cur[p]);
            if (mag == 0.0) degenerate = true;
            res(i) = mag - i_max;
            for (Eigen::Index j = 0; j < n; ++j) {
                const int q = active[static_cast<std::size_t>(j)];
                const Phasor d = g.columns[static_cast<std::size_t>(q)][p] * e[q];
                jac(i, j) = mag > 0.0 ? std::real(std::conj(cur[p]) * d) / mag : 0.0;
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (degenerate || !lu.isInvertible()) {
            for (int p : active) {
                const double mag = std::abs(cur[p]);
                auto& sp = s[static_cast<std::size_t>(p)];
                if (mag > 0.0) sp = std::min(1.0, sp * i_max / mag);
            }
            continue;
        }
        const Eigen::VectorXd step = lu.solve(res);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& sp = s[static_cast<std::size_t>(active[static_cast<std::size_t>(i)])];
            sp = std::clamp(sp - step(i), 1e-9, 1.0);
        }
    }
    const PhaseTriple cur = g(scaled(e, s));
    r.converged = worst(cur) <= i_max * (1.0 + kCapTolerance);
    return r;
}

Phasor safe(auto&& f) {
    try {
        return f();
    } catch (const NumericalError&) {
        return {kNaN, kNaN};
    }
}

} // namespace

void TrajectoryOptions::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("transient: dt must be positive");
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw ValidationError("transient: duration must be positive");
    if (!(fault_time < duration)) throw ValidationError("transient: fault_time must precede the end");
    if (!(tau_lim >= 0.0)) throw ValidationError("transient: tau must be >= 0");
    if (dt > duration) throw ValidationError("transient: dt exceeds duration");
}

Trajectory simulate_trajectory(const MicrogridModel& m, const TrajectoryOptions& opt) {
    m.validate();
    opt.validate();

    const auto* inv = std::get_if<CurrentLimitedInverter>(&m.source);
    const bool limiting = inv != nullptr && opt.limiter != LimiterKind::None &&
                          std::isfinite(inv->i_max_rms);
    const double i_max = inv ? inv->i_max_rms : std::numeric_limits<double>::infinity();

    const Phasor v1 = positive_sequence_emf(m.source);
    const PhaseTriple e_bal = sequence_to_phase({Phasor{}, v1, Phasor{}});
    const PhaseTriple e_unbal = inv ? sequence_to_phase(inv->unbalanced_emf()) : e_bal;

    const Phasor k = opt.k ? *opt.k
                           : (opt.location == RelayLocation::UpstreamOfFault
                                  ? relaying::line_k(m)
                                  : relaying::downstream_path_k(m));

    const bool has_fault = !m.fault.is_open();
    std::optional<Response> g_healthy;
    std::optional<Response> g_faulted;
    if (limiting) {
        g_healthy = source_response(m, false);
        if (has_fault) g_faulted = source_response(m, true);
    }

    const double decay = opt.tau_lim > 0.0 ? std::exp(-opt.dt / opt.tau_lim) : 0.0;
    const auto steps = static_cast<long>(std::floor(opt.duration / opt.dt + 1e-9));

    Trajectory traj;
    traj.points.reserve(static_cast<std::size_t>(steps));
    Scale applied{1.0, 1.0, 1.0};
    bool latched = false;
    double latch_target = 1.0;

    for (long n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * opt.dt;
        const bool faulted = has_fault && t >= opt.fault_time - 1e-12;

        Scale target{1.0, 1.0, 1.0};
        PhaseTriple shape = e_bal;
        if (limiting) {
            const Response& g = faulted ? *g_faulted : *g_healthy;
            if (opt.limiter == LimiterKind::InstantaneousSaturation) {
                const LimitResult lr = saturate(g, e_bal, i_max);
                target = lr.s;
                traj.max_iterations = std::max(traj.max_iterations, lr.iterations);
                traj.converged = traj.converged && lr.converged;
            } else {
                if (!latched && worst(g(e_bal)) > i_max) latched = true;
                if (latched) {
                    latch_target = std::min(latch_target, i_max / worst(g(e_unbal)));
                    target.fill(latch_target);
                    shape = e_unbal;
                }
            }
        }

        double gap = 0.0;
        for (std::size_t p = 0; p < 3; ++p) {
            applied[p] = target[p] + (applied[p] - target[p]) * decay;
            gap = std::max(gap, std::abs(applied[p] - target[p]) / target[p]);
        }

        oracle::NetworkOptions o;
        o.apply_fault = faulted;
        o.source_emf = scaled(shape, applied);
        const oracle::NetworkSolution sol = oracle::solve_phase_domain(m, o);

        TrajectoryPoint pt;
        pt.t = t;
        pt.faulted = faulted;
        pt.relay_v = sol.v_mid;
        pt.relay_i =
            opt.location == RelayLocation::UpstreamOfFault ? sol.i_line_1m : sol.i_line_m2;
        pt.source_i = sol.i_line_1m;
        pt.source_emf = *o.source_emf;
        pt.limited = *std::min_element(target.begin(), target.end()) < 1.0;
        pt.settled = gap <= kSettleTolerance;
        pt.scale = *std::min_element(applied.begin(), applied.end());
        const Phasor i0 = phase_to_sequence(pt.relay_i).zero;
        pt.z_lg = safe([&] { return relaying::measure_zlg(pt.relay_v.a, pt.relay_i.a, i0, k); });
        pt.z_ll = safe([&] {
            return relaying::measure_zll(pt.relay_v.b, pt.relay_v.c, pt.relay_i.b, pt.relay_i.c);
        });
        traj.points.push_back(pt);
    }
    return traj;
}

UnbalanceEstimate calibrate_unbalance(const MicrogridModel& m, const FaultSpec& fault) {
    if (!is_inverter(m.source))
        throw ValidationError("calibrate_unbalance needs a current-limited inverter");
    MicrogridModel faulted = m;
    faulted.fault = fault;

    TrajectoryOptions opt;
    opt.limiter = LimiterKind::InstantaneousSaturation;
    const Trajectory t = simulate_trajectory(faulted, opt);
    if (!t.converged) throw NumericalError("limiter fixed point did not converge");

    const SequenceTriple e = phase_to_sequence(t.points.back().source_emf);
    UnbalanceEstimate u;
    u.v2_fraction = std::abs(e.neg) / std::abs(e.pos);
    u.v0_fraction = std::abs(e.zero) / std::abs(e.pos);
    u.v2_angle = u.v2_fraction > 0.0 ? std::arg(e.neg / e.pos) : 0.0;
    u.v0_angle = u.v0_fraction > 0.0 ? std::arg(e.zero / e.pos) : 0.0;
    return u;
}

std::string format_trajectory(const Trajectory& t) {
    std::string out = "t_s,Re_Zlg_ohm,Im_Zlg_ohm,Re_Zll_ohm,Im_Zll_ohm,I_a_rms_A,limited\n";
    for (const auto& p : t.points) {
        out += fmt::format("{},{},{},{},{},{},{}\n", p.t, p.z_lg.real(), p.z_lg.imag(),
                           p.z_ll.real(), p.z_ll.imag(), std::abs(p.source_i.a),
                           p.limited ? 1 : 0);
    }
    return out;
}

} // namespace mgrelay::transim
