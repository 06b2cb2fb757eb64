#pragma once

#include <complex>
#include <numbers>

namespace mgrelay {

/// Steady-state 60 Hz phasor in rectangular form: a voltage [V], current [A] or impedance [Ohm].
using Phasor = std::complex<double>;

/// Unit phasor at +120 degrees.
inline constexpr Phasor kAlpha{-0.5, std::numbers::sqrt3 / 2.0};
inline constexpr Phasor kAlpha2{-0.5, -std::numbers::sqrt3 / 2.0};

/// Phasor from magnitude and angle in degrees.
Phasor polar_deg(double magnitude, double angle_deg);

bool is_finite(Phasor z);

struct PhaseTriple {
    Phasor a{};
    Phasor b{};
    Phasor c{};

    PhaseTriple& operator+=(const PhaseTriple& o) { a += o.a; b += o.b; c += o.c; return *this; }
    PhaseTriple& operator-=(const PhaseTriple& o) { a -= o.a; b -= o.b; c -= o.c; return *this; }
    PhaseTriple& operator*=(Phasor s) { a *= s; b *= s; c *= s; return *this; }

    Phasor& operator[](int phase);
    const Phasor& operator[](int phase) const;

    friend PhaseTriple operator+(PhaseTriple x, const PhaseTriple& y) { return x += y; }
    friend PhaseTriple operator-(PhaseTriple x, const PhaseTriple& y) { return x -= y; }
    friend PhaseTriple operator*(Phasor s, PhaseTriple x) { return x *= s; }
    friend PhaseTriple operator*(PhaseTriple x, Phasor s) { return x *= s; }
    friend bool operator==(const PhaseTriple&, const PhaseTriple&) = default;
};

/// Symmetrical components ordered (zero, positive, negative).
struct SequenceTriple {
    Phasor zero{};
    Phasor pos{};
    Phasor neg{};

    SequenceTriple& operator+=(const SequenceTriple& o) { zero += o.zero; pos += o.pos; neg += o.neg; return *this; }
    SequenceTriple& operator-=(const SequenceTriple& o) { zero -= o.zero; pos -= o.pos; neg -= o.neg; return *this; }
    SequenceTriple& operator*=(Phasor s) { zero *= s; pos *= s; neg *= s; return *this; }

    friend SequenceTriple operator+(SequenceTriple x, const SequenceTriple& y) { return x += y; }
    friend SequenceTriple operator-(SequenceTriple x, const SequenceTriple& y) { return x -= y; }
    friend SequenceTriple operator*(Phasor s, SequenceTriple x) { return x *= s; }
    friend bool operator==(const SequenceTriple&, const SequenceTriple&) = default;
};

bool is_finite(const PhaseTriple& p);
bool is_finite(const SequenceTriple& s);

/// Fortescue analysis transform (1/3-scaled):
///   zero = (a + b + c)/3, pos = (a + α b + α² c)/3, neg = (a + α² b + α c)/3
SequenceTriple phase_to_sequence(const PhaseTriple& p);

/// Inverse transform: a = 0 + 1 + 2, b = 0 + α² 1 + α 2, c = 0 + α 1 + α² 2.
PhaseTriple sequence_to_phase(const SequenceTriple& s);

/// Impedance of two branches in parallel, zx·zy/(zx + zy).
/// Throws NumericalError when |zx + zy| < 1e-15·max(|zx|, |zy|).
Phasor parallel(Phasor zx, Phasor zy);

} // namespace mgrelay
