#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgrelay/netmodel.hpp"
#include "mgrelay/phasors.hpp"

namespace mgrelay::transim {

enum class LimiterKind {
    None,
    /// Each phase EMF is clamped every step so its current stays at the limit.
    InstantaneousSaturation,
    /// On first engagement the source switches to the fraction-defined
    /// unbalanced EMF; its scale never increases afterwards.
    Latching,
};

struct TrajectoryOptions {
    double fault_time = 0.05;
    double duration = 0.2;
    double dt = 1e-3;
    double tau_lim = 5e-3;
    LimiterKind limiter = LimiterKind::InstantaneousSaturation;
    RelayLocation location = RelayLocation::UpstreamOfFault;
    /// Ground-element compensation; defaults to the line (upstream) or the
    /// downstream path (downstream).
    std::optional<Phasor> k;

    void validate() const;
};

struct TrajectoryPoint {
    double t = 0.0;
    PhaseTriple relay_v{};
    PhaseTriple relay_i{};
    PhaseTriple source_i{};
    PhaseTriple source_emf{};
    Phasor z_lg{};
    Phasor z_ll{};
    bool faulted = false;
    bool limited = false;
    /// Applied scale is within 1e-4 (relative) of its target.
    bool settled = true;
    /// Smallest per-phase EMF scale applied in this step.
    double scale = 1.0;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    /// False when the limiter fixed point hit its iteration cap; the affected
    /// points keep the last iterate.
    bool converged = true;
    int max_iterations = 0;
};

Trajectory simulate_trajectory(const MicrogridModel& m, const TrajectoryOptions& opt = {});

/// Sequence content of the limited source EMF, relative to its positive sequence.
struct UnbalanceEstimate {
    double v2_fraction = 0.0;
    double v0_fraction = 0.0;
    double v2_angle = 0.0;
    double v0_angle = 0.0;
    bool converged = true;
};

/// Runs an instantaneous-saturation trajectory on `fault` to steady state.
UnbalanceEstimate calibrate_unbalance(const MicrogridModel& m, const FaultSpec& fault);

/// Header `t_s,Re_Zlg_ohm,Im_Zlg_ohm,Re_Zll_ohm,Im_Zll_ohm,I_a_rms_A,limited`.
std::string format_trajectory(const Trajectory& t);

} // namespace mgrelay::transim
