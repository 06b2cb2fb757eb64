#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>

#include "mgrelay/netmodel.hpp"
#include "mgrelay/phasors.hpp"

namespace mgrelay {

/// Relay-point quantities of one fault study.
///
/// Both relays sit at the fault point M. The upstream relay reads the current
/// arriving from the source segment, the downstream relay the current leaving
/// into the load segment.
struct FaultSolution {
    FaultKind kind = FaultKind::LineGroundA;
    RelayLocation location = RelayLocation::UpstreamOfFault;

    PhaseTriple relay_v{};
    PhaseTriple relay_i{};
    SequenceTriple relay_seq_v{};
    SequenceTriple relay_seq_i{};
    Phasor z_measured{};
    std::map<std::string, Phasor, std::less<>> intermediates;
    /// Relative Kirchhoff residual of the underlying solve; 0 for closed-form results.
    double residual = 0.0;

    /// Named intermediate; throws std::out_of_range when the case does not define it.
    Phasor at(std::string_view key) const;
    bool has(std::string_view key) const;
};

namespace faultsolve {

/// Sign applied to the negative/zero-sequence drops in the upstream line-ground
/// relay voltage. MixedSign uses V¹ − Z I¹ + Z I² + Z⁰ I⁰.
enum class RelayVoltageForm { MixedSign, AllMinus };

/// The six studied cases, numbered 1..6.
enum class Case {
    LgUpstreamIdeal = 1,
    LgUpstreamInverter,
    LgDownstream,
    LlUpstreamIdeal,
    LlUpstreamInverter,
    LlDownstream,
};

FaultSolution solve_lg_upstream_ideal(const MicrogridModel& m,
                                      RelayVoltageForm form = RelayVoltageForm::MixedSign);
FaultSolution solve_lg_upstream_inverter(const MicrogridModel& m,
                                         RelayVoltageForm form = RelayVoltageForm::MixedSign);
/// z_measured uses zero-sequence compensation with k = 1 − Z_d⁰/Z_d¹.
FaultSolution solve_lg_downstream(const MicrogridModel& m);
FaultSolution solve_ll_upstream_ideal(const MicrogridModel& m);
FaultSolution solve_ll_upstream_inverter(const MicrogridModel& m);
/// Requires rf > 0.
FaultSolution solve_ll_downstream(const MicrogridModel& m);

FaultSolution solve_case(const MicrogridModel& m, Case c);

Case case_from_number(int n);
Case case_for(FaultKind kind, RelayLocation location, SourceKind source);
int case_number(Case c);
std::string_view case_name(Case c);
FaultKind case_fault_kind(Case c);
RelayLocation case_location(Case c);

/// Intermediates computed without approximation, comparable to the oracle's values.
std::span<const std::string_view> exact_intermediate_keys(Case c);

} // namespace faultsolve
} // namespace mgrelay
