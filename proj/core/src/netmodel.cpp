#include "mgrelay/netmodel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "mgrelay/errors.hpp"

namespace mgrelay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_passive(const SequenceImpedancePair& z, const char* name) {
    if (!is_finite(z.z1) || !is_finite(z.z0))
        throw ValidationError(fmt::format("{}: impedance must be finite", name));
    if (z.z1.real() < 0.0 || z.z0.real() < 0.0)
        throw ValidationError(fmt::format("{}: negative resistance", name));
}

} // namespace

SequenceTriple CurrentLimitedInverter::unbalanced_emf() const {
    return {v0_fraction * std::polar(1.0, v0_angle) * v1, v1,
            v2_fraction * std::polar(1.0, v2_angle) * v1};
}

bool is_inverter(const SourceModel& s) {
    return std::holds_alternative<CurrentLimitedInverter>(s);
}

Phasor positive_sequence_emf(const SourceModel& s) {
    return std::visit([](const auto& src) { return src.v1; }, s);
}

SequenceTriple source_sequence_emf(const SourceModel& s) {
    if (const auto* inv = std::get_if<CurrentLimitedInverter>(&s))
        return inv->unbalanced_emf();
    return {Phasor{}, std::get<IdealSource>(s).v1, Phasor{}};
}

bool FaultSpec::is_open() const { return std::isinf(rf); }

void MicrogridModel::validate() const {
    if (!(frequency > 0.0) || !std::isfinite(frequency))
        throw ValidationError("frequency must be positive");
    check_passive(line_1m, "line_1m");
    check_passive(line_m2, "line_m2");
    if (!is_finite(load.z_load) || !(load.z_load.real() > 0.0))
        throw ValidationError("load impedance must have positive resistance");
    if (load.z_ground) {
        if (!is_finite(*load.z_ground) || load.z_ground->real() < 0.0)
            throw ValidationError("load ground impedance must be finite and passive");
    }
    if (std::isnan(fault.rf) || fault.rf < 0.0)
        throw ValidationError("fault resistance must be >= 0");
    if (!is_finite(positive_sequence_emf(source)))
        throw ValidationError("source voltage must be finite");
    if (const auto* inv = std::get_if<CurrentLimitedInverter>(&source)) {
        auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
        if (!in_unit(inv->v2_fraction) || !in_unit(inv->v0_fraction))
            throw ValidationError("inverter sequence fractions must lie in [0, 1]");
        if (!std::isfinite(inv->v2_angle) || !std::isfinite(inv->v0_angle))
            throw ValidationError("inverter sequence angles must be finite");
        if (!(inv->i_max_rms > 0.0))
            throw ValidationError("inverter current limit must be positive");
    }
}

Phasor MicrogridModel::z_d1() const { return line_m2.z1 + load.z_load; }

Phasor MicrogridModel::z_d0() const {
    if (!load.z_ground)
        throw ValidationError("load neutral is ungrounded: no zero-sequence path downstream");
    return line_m2.z0 + load.z_load + 3.0 * *load.z_ground;
}

bool MicrogridModel::zero_sequence_closed() const {
    return source_grounded || load.z_ground.has_value();
}

TheveninSet thevenin_line_ground(const MicrogridModel& m) {
    const Phasor z1m = m.line_1m.z1;
    const Phasor zd = m.z_d1();
    const SequenceTriple vs = source_sequence_emf(m.source);

    TheveninSet t;
    t.z_eq1 = parallel(z1m, zd);
    t.z_eq2 = t.z_eq1;
    t.v_eq1 = vs.pos * zd / (z1m + zd);
    t.v_eq2 = vs.neg * zd / (z1m + zd);

    const bool load_grounded = m.load.z_ground.has_value();
    if (m.source_grounded && load_grounded) {
        const Phasor zd0 = m.z_d0();
        t.z_eq0 = parallel(m.line_1m.z0, zd0);
        t.v_eq0 = vs.zero * zd0 / (m.line_1m.z0 + zd0);
    } else if (m.source_grounded) {
        t.z_eq0 = m.line_1m.z0;
        t.v_eq0 = vs.zero;
    } else if (load_grounded) {
        t.z_eq0 = m.z_d0();
        t.v_eq0 = Phasor{};
    } else {
        t.z_eq0 = Phasor{kInf, 0.0};
        t.v_eq0 = Phasor{};
    }
    return t;
}

Phasor load_impedance_from_power(double p, double q, double v_ll) {
    if (!(p > 0.0))
        throw ValidationError("load real power must be positive");
    if (!(v_ll > 0.0))
        throw ValidationError("line voltage must be positive");
    return v_ll * v_ll / Phasor{p, -q};
}

Phasor cable_impedance(double r, double l, double f) {
    if (r < 0.0 || l < 0.0 || f < 0.0)
        throw ValidationError("cable data must be non-negative");
    return {r, 2.0 * std::numbers::pi * f * l};
}

Phasor norton_source(Phasor v, Phasor z) {
    if (z == Phasor{})
        throw NumericalError("Norton conversion of a zero impedance");
    return v / z;
}

MicrogridModel build_system(const SystemParameters& p, SourceKind source, FaultSpec fault) {
    if (!(p.split >= 0.0 && p.split <= 1.0))
        throw ValidationError("fault position must lie in [0, 1]");
    if (!(p.zero_sequence_ratio >= 0.0))
        throw ValidationError("zero-sequence ratio must be >= 0");

    const Phasor zc = cable_impedance(p.cable_r, p.cable_l, p.frequency);
    const Phasor v1{p.v_ll / std::numbers::sqrt3, 0.0};

    MicrogridModel m;
    if (source == SourceKind::Ideal) {
        m.source = IdealSource{v1};
    } else {
        m.source = CurrentLimitedInverter{v1, p.v2_fraction, p.v0_fraction,
                                          p.v2_angle, p.v0_angle, p.i_max};
    }
    m.source_grounded = p.source_grounded;
    const Phasor z_up = p.split * zc;
    const Phasor z_dn = (1.0 - p.split) * zc;
    m.line_1m = {z_up, p.zero_sequence_ratio * z_up};
    m.line_m2 = {z_dn, p.zero_sequence_ratio * z_dn};
    m.load.z_load = load_impedance_from_power(p.load_p, p.load_q, p.v_ll);
    if (p.load_ground)
        m.load.z_ground = Phasor{*p.load_ground, 0.0};
    else
        m.load.z_ground.reset();
    m.fault = fault;
    m.frequency = p.frequency;
    m.validate();
    return m;
}

MicrogridModel reference_system(SourceKind source, FaultSpec fault) {
    return build_system(SystemParameters{}, source, fault);
}

} // namespace mgrelay
