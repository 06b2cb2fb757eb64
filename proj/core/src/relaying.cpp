#include "mgrelay/relaying.hpp"

#include <cmath>

#include "mgrelay/errors.hpp"

namespace mgrelay::relaying {

Phasor k_factor(Phasor z0, Phasor z1) {
    if (z1 == Phasor{}) throw ValidationError("k factor: positive-sequence impedance is zero");
    return 1.0 - z0 / z1;
}

Phasor measure_zlg(Phasor v_ag, Phasor i_a, Phasor i0, Phasor k) {
    const Phasor loop = i_a + k * i0;
    if (loop == Phasor{} || !is_finite(loop))
        throw NumericalError("ground element: no measurable loop current");
    return v_ag / loop;
}

Phasor measure_zll(Phasor v_b, Phasor v_c, Phasor i_b, Phasor i_c) {
    const Phasor di = i_b - i_c;
    if (di == Phasor{} || !is_finite(di))
        throw NumericalError("phase element: zero current difference");
    return (v_b - v_c) / di;
}

bool mho_trip(Phasor z, const GroundDistanceSettings& s) {
    if (std::abs(s.reach) == 0.0) throw ValidationError("mho reach must be nonzero");
    const Phasor diameter = s.reach * std::polar(1.0, s.mho_diameter_angle);
    const Phasor center = diameter / 2.0;
    const double radius = std::abs(diameter) / 2.0;
    return std::abs(z - center) <= radius * (1.0 + 1e-12);
}

DirectionalDecision directional_neg_seq(Phasor v2, Phasor i2, double line_angle,
                                        const DirectionalSettings& s) {
    if (!is_finite(v2) || !is_finite(i2)) return DirectionalDecision::Indeterminate;
    if (std::abs(v2) < s.v2_floor || std::abs(i2) < s.i2_floor || i2 == Phasor{})
        return DirectionalDecision::Indeterminate;
    const double d = std::remainder(std::arg(-v2 / i2) - line_angle, 2.0 * std::numbers::pi);
    const double quarter = std::numbers::pi / 2.0;
    if (std::abs(d) < quarter) return DirectionalDecision::Forward;
    if (std::abs(d) > quarter) return DirectionalDecision::Reverse;
    return DirectionalDecision::Indeterminate;
}

std::string_view to_string(DirectionalDecision d) {
    switch (d) {
    case DirectionalDecision::Forward: return "forward";
    case DirectionalDecision::Reverse: return "reverse";
    case DirectionalDecision::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

Phasor line_k(const MicrogridModel& m) {
    return k_factor(m.line_1m.z0, m.line_1m.z1);
}

Phasor downstream_path_k(const MicrogridModel& m) {
    return k_factor(m.z_d0(), m.z_d1());
}

Phasor compensated_impedance(const FaultSolution& s, Phasor k) {
    return measure_zlg(s.relay_v.a, s.relay_i.a, s.relay_seq_i.zero, k);
}

GroundDistanceSettings default_ground_settings(const MicrogridModel& m, Phasor k) {
    return {k, m.z_d1(), 0.0};
}

} // namespace mgrelay::relaying
