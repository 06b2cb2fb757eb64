#include "mgrelay/faultsolve.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "mgrelay/errors.hpp"

namespace mgrelay {

Phasor FaultSolution::at(std::string_view key) const {
    auto it = intermediates.find(key);
    if (it == intermediates.end())
        throw std::out_of_range(fmt::format("no intermediate named '{}'", key));
    return it->second;
}

bool FaultSolution::has(std::string_view key) const {
    return intermediates.find(key) != intermediates.end();
}

namespace faultsolve {

namespace {

void require(const MicrogridModel& m, FaultKind kind, const char* what) {
    m.validate();
    if (m.fault.kind != kind)
        throw ValidationError(fmt::format("{}: wrong fault kind for this case", what));
    if (m.fault.is_open())
        throw ValidationError(fmt::format("{}: fault resistance must be finite", what));
}

void require_ideal(const MicrogridModel& m, const char* what) {
    if (is_inverter(m.source))
        throw ValidationError(fmt::format("{}: case needs an ideal source", what));
}

void require_inverter(const MicrogridModel& m, const char* what) {
    if (!is_inverter(m.source))
        throw ValidationError(fmt::format("{}: case needs a current-limited inverter", what));
}

void require_grounded(const MicrogridModel& m, const char* what) {
    if (!m.source_grounded || !m.load.z_ground)
        throw ValidationError(
            fmt::format("{}: line-ground analysis needs a grounded source and load", what));
}

void put_thevenin(FaultSolution& s, const TheveninSet& t) {
    s.intermediates["z_eq1"] = t.z_eq1;
    s.intermediates["z_eq2"] = t.z_eq2;
    s.intermediates["z_eq0"] = t.z_eq0;
    s.intermediates["v_eq1"] = t.v_eq1;
    s.intermediates["v_eq2"] = t.v_eq2;
    s.intermediates["v_eq0"] = t.v_eq0;
}

void finish_phase(FaultSolution& s) {
    s.relay_v = sequence_to_phase(s.relay_seq_v);
    s.relay_i = sequence_to_phase(s.relay_seq_i);
}

Phasor ll_ratio(const FaultSolution& s) {
    const Phasor di = s.relay_i.b - s.relay_i.c;
    if (std::abs(di) < 1e-12 * std::abs(s.relay_seq_i.pos) || di == Phasor{})
        throw NumericalError("line-line measurement: phase current difference is near zero");
    return (s.relay_v.b - s.relay_v.c) / di;
}

// Line-ground upstream chain shared by the ideal and inverter cases. With an
// ideal source V_2 = 0 and the inverter-only terms vanish.
FaultSolution lg_upstream(const MicrogridModel& m, RelayVoltageForm form) {
    const TheveninSet th = thevenin_line_ground(m);
    const SequenceTriple vs = source_sequence_emf(m.source);
    const Phasor z1m = m.line_1m.z1;
    const Phasor z1m0 = m.line_1m.z0;
    const Phasor zd = m.z_d1();
    const Phasor zd0 = m.z_d0();
    const double rf = m.fault.rf;

    const Phasor z_2 = th.z_eq2 + th.z_eq0 + 3.0 * rf;
    const Phasor z_1d = parallel(z1m, zd);
    const Phasor z_2d = parallel(z_2, zd);
    const Phasor v_1 = vs.pos;
    const Phasor v_2 = th.v_eq2 + th.v_eq0;

    const Phasor i_1n = norton_source(v_1, z1m);
    const Phasor i_2n = v_2 / z_2;
    const Phasor i_11 = v_1 / (z1m + z_2d);
    const Phasor i_21 = i_1n * z_1d / (z_2 + z_1d);
    const Phasor i_12 = i_2n * z_2d / (z1m + z_2d);
    const Phasor i_22 = v_2 / (z_2 + z_1d);
    // The inverter's own negative/zero-sequence EMF also drives current through the load.
    const Phasor i_2l = vs.neg / (z1m + zd);
    const Phasor i_0l = vs.zero / (z1m0 + zd0);

    FaultSolution s;
    s.kind = FaultKind::LineGroundA;
    s.location = RelayLocation::UpstreamOfFault;
    s.relay_seq_i = {i_21 + i_22 + i_0l, i_11 + i_12, i_21 + i_22 + i_2l};

    const double sigma = form == RelayVoltageForm::MixedSign ? 1.0 : -1.0;
    s.relay_seq_v = {vs.zero + sigma * z1m0 * s.relay_seq_i.zero,
                     vs.pos - z1m * s.relay_seq_i.pos,
                     vs.neg + sigma * z1m * s.relay_seq_i.neg};
    finish_phase(s);
    s.z_measured = s.relay_v.a / s.relay_i.a;

    auto& x = s.intermediates;
    put_thevenin(s, th);
    x["z_d"] = zd;
    x["z_d0"] = zd0;
    x["z_1"] = z1m;
    x["z_2"] = z_2;
    x["z_20"] = z_2;
    x["z_1d"] = z_1d;
    x["z_2d"] = z_2d;
    x["z_20d"] = z_2d;
    x["v_1"] = v_1;
    x["v_2"] = v_2;
    x["i_sn"] = i_1n;
    x["i_1n"] = i_1n;
    x["i_2n"] = i_2n;
    x["i_11"] = i_11;
    x["i_21"] = i_21;
    x["i_12"] = i_12;
    x["i_22"] = i_22;
    x["i_2l"] = i_2l;
    x["i_0l"] = i_0l;
    return s;
}

// Line-line upstream chain. Negative-sequence terms i_21, i_22 are fault-path
// currents; the relay sees them reversed, plus the inverter's through-load term.
FaultSolution ll_upstream(const MicrogridModel& m) {
    const TheveninSet th = thevenin_line_ground(m);
    const SequenceTriple vs = source_sequence_emf(m.source);
    const Phasor z1m = m.line_1m.z1;
    const Phasor zd = m.z_d1();
    const double rf = m.fault.rf;

    const Phasor z_2 = th.z_eq2 + rf;
    const Phasor z_1d = parallel(z1m, zd);
    const Phasor z_2d = parallel(z_2, zd);
    const Phasor v_1 = vs.pos;
    const Phasor v_2 = th.v_eq2;

    const Phasor i_1n = norton_source(v_1, z1m);
    const Phasor i_2n = v_2 / z_2;
    const Phasor i_11 = v_1 / (z1m + z_2d);
    const Phasor i_12 = -i_2n;
    const Phasor i_21 = i_1n * z_1d / (z_1d + z_2);
    const Phasor i_22 = -v_2 / (z_2 + z_1d);
    const Phasor i_2l = vs.neg / (z1m + zd);

    Phasor i_0l{};
    if (m.source_grounded && m.load.z_ground)
        i_0l = vs.zero / (m.line_1m.z0 + m.z_d0());

    FaultSolution s;
    s.kind = FaultKind::LineLineBC;
    s.location = RelayLocation::UpstreamOfFault;
    s.relay_seq_i = {i_0l, i_11 + i_12, -(i_21 + i_22) + i_2l};
    s.relay_seq_v = {vs.zero - m.line_1m.z0 * s.relay_seq_i.zero,
                     vs.pos - z1m * s.relay_seq_i.pos,
                     vs.neg - z1m * s.relay_seq_i.neg};
    finish_phase(s);
    s.z_measured = ll_ratio(s);

    auto& x = s.intermediates;
    put_thevenin(s, th);
    x["z_d"] = zd;
    x["z_1"] = z1m;
    x["z_2"] = z_2;
    x["z_1d"] = z_1d;
    x["z_2d"] = z_2d;
    x["v_1"] = v_1;
    x["v_2"] = v_2;
    x["i_sn"] = i_1n;
    x["i_1n"] = i_1n;
    x["i_2n"] = i_2n;
    x["i_11"] = i_11;
    x["i_12"] = i_12;
    x["i_21"] = i_21;
    x["i_22"] = i_22;
    x["i_2l"] = i_2l;
    x["i_0l"] = i_0l;
    return s;
}

} // namespace

FaultSolution solve_lg_upstream_ideal(const MicrogridModel& m, RelayVoltageForm form) {
    constexpr const char* what = "lg-upstream-ideal";
    require(m, FaultKind::LineGroundA, what);
    require_ideal(m, what);
    require_grounded(m, what);
    return lg_upstream(m, form);
}

FaultSolution solve_lg_upstream_inverter(const MicrogridModel& m, RelayVoltageForm form) {
    constexpr const char* what = "lg-upstream-inverter";
    require(m, FaultKind::LineGroundA, what);
    require_inverter(m, what);
    require_grounded(m, what);
    return lg_upstream(m, form);
}

FaultSolution solve_lg_downstream(const MicrogridModel& m) {
    constexpr const char* what = "lg-downstream";
    require(m, FaultKind::LineGroundA, what);
    require_grounded(m, what);

    const TheveninSet th = thevenin_line_ground(m);
    const Phasor zd1 = m.z_d1();
    const Phasor zd0 = m.z_d0();
    const double rf = m.fault.rf;

    const Phasor i_f = (th.v_eq1 + th.v_eq2 + th.v_eq0) /
                       (th.z_eq1 + th.z_eq2 + th.z_eq0 + 3.0 * rf);
    const SequenceTriple vm{th.v_eq0 - th.z_eq0 * i_f, th.v_eq1 - th.z_eq1 * i_f,
                            th.v_eq2 - th.z_eq2 * i_f};

    FaultSolution s;
    s.kind = FaultKind::LineGroundA;
    s.location = RelayLocation::DownstreamOfFault;
    s.relay_seq_i = {vm.zero / zd0, vm.pos / zd1, vm.neg / zd1};
    s.relay_seq_v = {zd0 * s.relay_seq_i.zero, zd1 * s.relay_seq_i.pos,
                     zd1 * s.relay_seq_i.neg};
    finish_phase(s);

    const Phasor k = 1.0 - zd0 / zd1;
    const Phasor loop = s.relay_i.a + k * s.relay_seq_i.zero;
    if (loop == Phasor{})
        throw NumericalError("lg-downstream: compensated loop current is zero");
    s.z_measured = s.relay_v.a / loop;

    auto& x = s.intermediates;
    put_thevenin(s, th);
    x["z_d"] = zd1;
    x["z_d1"] = zd1;
    x["z_d0"] = zd0;
    x["k"] = k;
    x["i_f"] = i_f;
    x["z_uncompensated"] = s.relay_v.a / s.relay_i.a;
    return s;
}

FaultSolution solve_ll_upstream_ideal(const MicrogridModel& m) {
    constexpr const char* what = "ll-upstream-ideal";
    require(m, FaultKind::LineLineBC, what);
    require_ideal(m, what);
    return ll_upstream(m);
}

FaultSolution solve_ll_upstream_inverter(const MicrogridModel& m) {
    constexpr const char* what = "ll-upstream-inverter";
    require(m, FaultKind::LineLineBC, what);
    require_inverter(m, what);
    return ll_upstream(m);
}

FaultSolution solve_ll_downstream(const MicrogridModel& m) {
    constexpr const char* what = "ll-downstream";
    require(m, FaultKind::LineLineBC, what);
    if (!(m.fault.rf > 0.0))
        throw ValidationError("ll-downstream: fault resistance must be > 0");

    const TheveninSet th = thevenin_line_ground(m);
    const Phasor zd1 = m.z_d1();
    const double rf = m.fault.rf;

    const Phasor i_f1 = (th.v_eq1 - th.v_eq2) / (th.z_eq1 + th.z_eq2 + rf);
    const Phasor vm1 = th.v_eq1 - th.z_eq1 * i_f1;
    const Phasor vm2 = th.v_eq2 + th.z_eq2 * i_f1;

    FaultSolution s;
    s.kind = FaultKind::LineLineBC;
    s.location = RelayLocation::DownstreamOfFault;
    Phasor i0{};
    Phasor v0 = th.v_eq0;
    if (m.load.z_ground) {
        const Phasor zd0 = m.z_d0();
        i0 = th.v_eq0 / zd0;
        v0 = zd0 * i0;
        s.intermediates["z_d0"] = zd0;
    }
    s.relay_seq_i = {i0, vm1 / zd1, vm2 / zd1};
    s.relay_seq_v = {v0, zd1 * s.relay_seq_i.pos, zd1 * s.relay_seq_i.neg};
    finish_phase(s);
    s.z_measured = ll_ratio(s);

    auto& x = s.intermediates;
    put_thevenin(s, th);
    x["z_d"] = zd1;
    x["z_d1"] = zd1;
    x["i_f1"] = i_f1;
    return s;
}

FaultSolution solve_case(const MicrogridModel& m, Case c) {
    switch (c) {
    case Case::LgUpstreamIdeal: return solve_lg_upstream_ideal(m);
    case Case::LgUpstreamInverter: return solve_lg_upstream_inverter(m);
    case Case::LgDownstream: return solve_lg_downstream(m);
    case Case::LlUpstreamIdeal: return solve_ll_upstream_ideal(m);
    case Case::LlUpstreamInverter: return solve_ll_upstream_inverter(m);
    case Case::LlDownstream: return solve_ll_downstream(m);
    }
    throw ValidationError("unknown case");
}

Case case_from_number(int n) {
    if (n < 1 || n > 6)
        throw ValidationError(fmt::format("case number must be 1..6, got {}", n));
    return static_cast<Case>(n);
}

Case case_for(FaultKind kind, RelayLocation location, SourceKind source) {
    const bool lg = kind == FaultKind::LineGroundA;
    if (location == RelayLocation::DownstreamOfFault)
        return lg ? Case::LgDownstream : Case::LlDownstream;
    if (source == SourceKind::Ideal)
        return lg ? Case::LgUpstreamIdeal : Case::LlUpstreamIdeal;
    return lg ? Case::LgUpstreamInverter : Case::LlUpstreamInverter;
}

int case_number(Case c) { return static_cast<int>(c); }

std::string_view case_name(Case c) {
    switch (c) {
    case Case::LgUpstreamIdeal: return "lg-upstream-ideal";
    case Case::LgUpstreamInverter: return "lg-upstream-inverter";
    case Case::LgDownstream: return "lg-downstream";
    case Case::LlUpstreamIdeal: return "ll-upstream-ideal";
    case Case::LlUpstreamInverter: return "ll-upstream-inverter";
    case Case::LlDownstream: return "ll-downstream";
    }
    return "unknown";
}

FaultKind case_fault_kind(Case c) {
    return case_number(c) <= 3 ? FaultKind::LineGroundA : FaultKind::LineLineBC;
}

RelayLocation case_location(Case c) {
    return (c == Case::LgDownstream || c == Case::LlDownstream)
               ? RelayLocation::DownstreamOfFault
               : RelayLocation::UpstreamOfFault;
}

std::span<const std::string_view> exact_intermediate_keys(Case c) {
    static constexpr std::array<std::string_view, 10> lg_up{
        "z_d", "z_1d", "z_20", "z_20d", "z_2", "z_2d", "z_eq1", "z_eq2", "z_eq0", "v_eq1"};
    static constexpr std::array<std::string_view, 14> lg_inv{
        "z_d",   "z_1d",  "z_20",  "z_20d", "z_2",   "z_2d",  "v_2",
        "z_eq1", "z_eq2", "z_eq0", "v_eq1", "v_eq2", "v_eq0", "z_d0"};
    static constexpr std::array<std::string_view, 8> lg_down{
        "z_d1", "z_d0", "z_eq1", "z_eq2", "z_eq0", "v_eq1", "v_eq2", "v_eq0"};
    static constexpr std::array<std::string_view, 7> ll_up{
        "z_d", "z_1d", "z_2", "z_2d", "z_eq1", "z_eq2", "v_eq1"};
    static constexpr std::array<std::string_view, 9> ll_inv{
        "z_d", "z_1d", "z_2", "z_2d", "v_2", "z_eq1", "z_eq2", "v_eq1", "v_eq2"};
    static constexpr std::array<std::string_view, 5> ll_down{
        "z_d1", "z_eq1", "z_eq2", "v_eq1", "v_eq2"};
    switch (c) {
    case Case::LgUpstreamIdeal: return lg_up;
    case Case::LgUpstreamInverter: return lg_inv;
    case Case::LgDownstream: return lg_down;
    case Case::LlUpstreamIdeal: return ll_up;
    case Case::LlUpstreamInverter: return ll_inv;
    case Case::LlDownstream: return ll_down;
    }
    return {};
}

} // namespace faultsolve
} // namespace mgrelay
