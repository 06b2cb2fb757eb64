#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mgrelay/dcb.hpp"
#include "mgrelay/faultsolve.hpp"
#include "mgrelay/netmodel.hpp"
#include "mgrelay/transim.hpp"

namespace mgrelay::scenario {

/// Parsed scenario: every known field of every present section, defaults
/// filled in, values kept in their canonical text form ("39 mOhm", "lg", "0.6").
///
/// Sections: system, controller, fault, relay (always present) and
/// dcb, transient (present only when written in the file).
class Scenario {
public:
    bool has_section(std::string_view section) const;
    const std::string& text(std::string_view section, std::string_view key) const;

    /// Value converted to SI units (Ohm, H, F, Hz, V, W, var, A, s, rad).
    double si(std::string_view section, std::string_view key) const;
    double number(std::string_view section, std::string_view key) const;
    long integer(std::string_view section, std::string_view key) const;
    bool flag(std::string_view section, std::string_view key) const;

    /// Replace one value; it is validated like parsed input.
    void set(std::string_view section, std::string_view key, std::string_view value);
    /// Adds an optional section with all defaults.
    void add_section(std::string_view section);

    friend Scenario parse_scenario(std::string_view text, std::string_view origin);
    friend bool operator==(const Scenario&, const Scenario&) = default;

private:
    std::map<std::string, std::map<std::string, std::string>, std::less<>> values_;
};

/// Parses INI text. Unknown sections or keys, bad units and out-of-range
/// values throw ValidationError naming `section.key`.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical text: schema order, one `key = value` per line, LF endings.
std::string emit_scenario(const Scenario& s);
/// Lower-case hex SHA-256 of the canonical text.
std::string digest(const Scenario& s);

/// Default system with the dcb and transient sections included.
Scenario default_scenario();

/// Documentation table: section, key, default, description.
struct FieldDoc {
    std::string_view section;
    std::string_view key;
    std::string_view default_value;
    std::string_view description;
};
std::vector<FieldDoc> field_docs();

// Typed views.
SystemParameters system_parameters(const Scenario& s);
SourceKind source_kind(const Scenario& s);
InverterControlParams control_params(const Scenario& s);
FaultSpec fault_spec(const Scenario& s);
RelayLocation relay_location(const Scenario& s);
faultsolve::RelayVoltageForm voltage_form(const Scenario& s);
MicrogridModel build_model(const Scenario& s, std::optional<double> rf = std::nullopt);
/// k for the ground element per the relay section's k_policy.
Phasor k_factor(const Scenario& s, const MicrogridModel& m);

struct SweepSpec {
    double min = 3.68;
    double max = 1000.0;
    long points = 40;
    bool log_spacing = true;

    std::vector<double> values() const;
};
SweepSpec sweep_spec(const Scenario& s);

/// Throws ValidationError when the dcb section is missing.
dcb::DcbScenario dcb_scenario(const Scenario& s, std::optional<std::uint64_t> seed = std::nullopt);
transim::TrajectoryOptions trajectory_options(const Scenario& s);

/// "1.5-2j" style complex literal; also accepts a bare real.
Phasor parse_complex(std::string_view text);
std::string format_complex(Phasor z);
std::string format_number(double x);

} // namespace mgrelay::scenario
