#pragma once

#include <optional>
#include <string>
#include <variant>

#include "mgrelay/phasors.hpp"

namespace mgrelay {

/// Series impedance of one line segment. The negative-sequence value aliases z1.
struct SequenceImpedancePair {
    Phasor z1{};
    Phasor z0{};
};

struct IdealSource {
    Phasor v1{};
};

/// Inverter under current limiting, seen as an unbalanced voltage source.
/// Negative/zero-sequence EMF = fraction · v1 rotated by the given angle (rad).
struct CurrentLimitedInverter {
    Phasor v1{};
    double v2_fraction = 0.6;
    double v0_fraction = 0.6;
    double v2_angle = 0.0;
    double v0_angle = 0.0;
    double i_max_rms = 70.0;

    SequenceTriple unbalanced_emf() const;
};

using SourceModel = std::variant<IdealSource, CurrentLimitedInverter>;

bool is_inverter(const SourceModel& s);
Phasor positive_sequence_emf(const SourceModel& s);
/// (0, v1, 0) for an ideal source, the limited unbalanced EMF for an inverter.
SequenceTriple source_sequence_emf(const SourceModel& s);

struct LoadModel {
    Phasor z_load{};
    /// Neutral-to-ground impedance; nullopt leaves the neutral floating.
    std::optional<Phasor> z_ground = Phasor{};
};

enum class FaultKind { LineGroundA, LineLineBC };
enum class FaultLocation { Midpoint };
enum class RelayLocation { UpstreamOfFault, DownstreamOfFault };

/// rf is resistive; +inf means the fault branch is open.
struct FaultSpec {
    FaultKind kind = FaultKind::LineGroundA;
    double rf = 0.0;
    FaultLocation location = FaultLocation::Midpoint;

    bool is_open() const;
};

struct MicrogridModel {
    SourceModel source = IdealSource{};
    bool source_grounded = true;
    SequenceImpedancePair line_1m{};
    SequenceImpedancePair line_m2{};
    LoadModel load{};
    FaultSpec fault{};
    double frequency = 60.0;

    /// Throws ValidationError on a non-physical model.
    void validate() const;

    /// Positive-sequence impedance downstream of the fault point, Z_M2 + Z_L.
    Phasor z_d1() const;
    /// Zero-sequence downstream path, Z_M2⁰ + Z_L + 3 Z_Lg. Requires a grounded load.
    Phasor z_d0() const;
    bool zero_sequence_closed() const;
};

/// Sequence Thevenin equivalents seen at the fault point with the fault open.
/// v_eq2 and v_eq0 are zero for an ideal source.
struct TheveninSet {
    Phasor z_eq1{};
    Phasor z_eq2{};
    Phasor z_eq0{};
    Phasor v_eq1{};
    Phasor v_eq2{};
    Phasor v_eq0{};
};

TheveninSet thevenin_line_ground(const MicrogridModel& m);

/// Controller and hardware data. Carried for round-tripping, never used in computation.
struct InverterControlParams {
    double kpv = 0.35;
    double krv = 400.0;
    double kvh5 = 4.0;
    double kvh7 = 20.0;
    double kvh11 = 11.0;
    double kpi = 0.7;
    double kri = 400.0;
    double kih5 = 30.0;
    double kih7 = 30.0;
    double kih11 = 30.0;

    double p_rated = 50e3;
    double vdc = 1800.0;
    std::string filter_l = "18 uF";
    double filter_c = 250e-9;
    double cable_r = 0.039;
    double cable_l = 70.8e-6;
};

/// Per-phase wye impedance drawing p + jq at line-line voltage v_ll.
Phasor load_impedance_from_power(double p, double q, double v_ll);
Phasor cable_impedance(double r, double l, double f);
Phasor norton_source(Phasor v, Phasor z);

enum class SourceKind { Ideal, Inverter };

struct SystemParameters {
    double frequency = 60.0;
    double v_ll = 480.0;
    double i_max = 70.0;
    double cable_r = 0.039;
    double cable_l = 70.8e-6;
    double load_p = 25e3;
    double load_q = 12.5e3;
    /// Share of the cable between the source bus and the fault point.
    double split = 0.5;
    /// Cable z0/z1.
    double zero_sequence_ratio = 1.0;
    std::optional<double> load_ground = 0.0;
    bool source_grounded = true;
    double v2_fraction = 0.6;
    double v0_fraction = 0.6;
    double v2_angle = 0.0;
    double v0_angle = 0.0;
};

MicrogridModel build_system(const SystemParameters& p, SourceKind source, FaultSpec fault);
/// Default two-bus system, fault at the midpoint.
MicrogridModel reference_system(SourceKind source, FaultSpec fault);

} // namespace mgrelay
