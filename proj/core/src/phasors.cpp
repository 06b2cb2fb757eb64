#include "mgrelay/phasors.hpp"

#include "mgrelay/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mgrelay {

Phasor polar_deg(double magnitude, double angle_deg) {
    return std::polar(magnitude, angle_deg * std::numbers::pi / 180.0);
}

bool is_finite(Phasor z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

bool is_finite(const PhaseTriple& p) { return is_finite(p.a) && is_finite(p.b) && is_finite(p.c); }

bool is_finite(const SequenceTriple& s) {
    return is_finite(s.zero) && is_finite(s.pos) && is_finite(s.neg);
}

Phasor& PhaseTriple::operator[](int phase) {
    switch (phase) {
    case 0: return a;
    case 1: return b;
    case 2: return c;
    default: throw std::out_of_range("phase index must be 0, 1 or 2");
    }
}

const Phasor& PhaseTriple::operator[](int phase) const {
    return const_cast<PhaseTriple&>(*this)[phase];
}

SequenceTriple phase_to_sequence(const PhaseTriple& p) {
    return {
        (p.a + p.b + p.c) / 3.0,
        (p.a + kAlpha * p.b + kAlpha2 * p.c) / 3.0,
        (p.a + kAlpha2 * p.b + kAlpha * p.c) / 3.0,
    };
}

PhaseTriple sequence_to_phase(const SequenceTriple& s) {
    return {
        s.zero + s.pos + s.neg,
        s.zero + kAlpha2 * s.pos + kAlpha * s.neg,
        s.zero + kAlpha * s.pos + kAlpha2 * s.neg,
    };
}

Phasor parallel(Phasor zx, Phasor zy) {
    const Phasor sum = zx + zy;
    const double scale = std::max(std::abs(zx), std::abs(zy));
    if (std::abs(sum) < 1e-15 * scale || (scale == 0.0)) {
        throw NumericalError("degenerate parallel combination: branches cancel");
    }
    return zx * zy / sum;
}

} // namespace mgrelay
