#pragma once

#include <numbers>

#include "mgrelay/faultsolve.hpp"
#include "mgrelay/netmodel.hpp"
#include "mgrelay/phasors.hpp"

namespace mgrelay::relaying {

struct GroundDistanceSettings {
    Phasor k{};
    Phasor reach{};
    /// Rotation of the mho diameter away from `reach` (rad).
    double mho_diameter_angle = 0.0;
};

enum class DirectionalDecision { Forward, Reverse, Indeterminate };

/// Nominal phase voltage and load current of the default system.
inline constexpr double kNominalVoltage = 480.0 / std::numbers::sqrt3;
inline constexpr double kNominalCurrent = 50e3 / (std::numbers::sqrt3 * 480.0);

/// Sensitivity floors below which the directional element will not decide.
struct DirectionalSettings {
    double v2_floor = 0.02 * kNominalVoltage;
    double i2_floor = 0.02 * kNominalCurrent;
};

/// k = 1 − z0/z1.
Phasor k_factor(Phasor z0, Phasor z1);

/// Ground element: v_ag / (i_a + k i0).
Phasor measure_zlg(Phasor v_ag, Phasor i_a, Phasor i0, Phasor k);

/// Phase element: (v_b − v_c) / (i_b − i_c).
Phasor measure_zll(Phasor v_b, Phasor v_c, Phasor i_b, Phasor i_c);

/// Mho circle through the origin; boundary counts as inside.
bool mho_trip(Phasor z, const GroundDistanceSettings& s);

/// Negative-sequence directional element. Forward when arg(−v2/i2) lies
/// within ±90° of line_angle (rad). Exactly ±90° is Indeterminate.
DirectionalDecision directional_neg_seq(Phasor v2, Phasor i2, double line_angle,
                                        const DirectionalSettings& s = {});

std::string_view to_string(DirectionalDecision d);

/// Compensation factor policies.
Phasor line_k(const MicrogridModel& m);
Phasor downstream_path_k(const MicrogridModel& m);

/// Ground element applied to a solution's relay quantities.
Phasor compensated_impedance(const FaultSolution& s, Phasor k);

/// Default settings: reach = Z_d¹, no rotation.
GroundDistanceSettings default_ground_settings(const MicrogridModel& m, Phasor k);

} // namespace mgrelay::relaying
