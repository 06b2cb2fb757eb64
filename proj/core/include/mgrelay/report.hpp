#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mgrelay/dcb.hpp"
#include "mgrelay/faultsolve.hpp"
#include "mgrelay/scenario.hpp"
#include "mgrelay/transim.hpp"

namespace mgrelay::report {

std::string_view version();

/// Case implied by the scenario's fault kind, relay location and source.
faultsolve::Case scenario_case(const scenario::Scenario& s);

struct CaseResult {
    faultsolve::Case which{};
    double rf = 0.0;
    Phasor k{};
    Phasor z_d1{};
    FaultSolution analytical;
    FaultSolution oracle;
    double relative_error = 0.0;
};

/// The case's fault kind and relay location override the scenario's; the
/// source model must match or ValidationError is thrown.
CaseResult run_case(const scenario::Scenario& s, std::optional<int> case_number = std::nullopt,
                    std::optional<double> rf = std::nullopt);
std::string format_case(const scenario::Scenario& s, const CaseResult& r);

struct SweepRow {
    double rf = 0.0;
    Phasor z{};
    Phasor z_oracle{};
    double rel_err = 0.0;
};

std::vector<SweepRow> run_sweep(const scenario::Scenario& s,
                                std::optional<int> case_number = std::nullopt);
/// Header `rf_ohm,Re_Z,Im_Z,mag_Z,oracle_mag_Z,rel_err`.
std::string format_sweep(const scenario::Scenario& s, const std::vector<SweepRow>& rows);

struct DcbRun {
    dcb::DcbScenario scenario;
    std::vector<dcb::DcbEvent> events;
};

DcbRun run_dcb(const scenario::Scenario& s, std::optional<std::uint64_t> seed = std::nullopt);
std::string format_dcb(const scenario::Scenario& s, const DcbRun& r);

transim::Trajectory run_trajectory(const scenario::Scenario& s);
std::string format_trajectory_report(const scenario::Scenario& s, const transim::Trajectory& t);

/// Field-level check of a scenario plus a summary of the model it builds.
std::string format_validation(const scenario::Scenario& s);

} // namespace mgrelay::report
