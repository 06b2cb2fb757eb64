#include "mgrelay/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "mgrelay/errors.hpp"
#include "mgrelay/relaying.hpp"

namespace mgrelay::scenario {

namespace {

struct Unit {
    std::string_view name;
    double scale;
};

struct Dimension {
    std::string_view name;
    std::vector<Unit> units;
};

const std::vector<Dimension>& dimensions() {
    static const std::vector<Dimension> d{
        {"resistance", {{"Ohm", 1.0}, {"mOhm", 1e-3}, {"kOhm", 1e3}}},
        {"inductance", {{"H", 1.0}, {"mH", 1e-3}, {"uH", 1e-6}}},
        {"capacitance", {{"F", 1.0}, {"uF", 1e-6}, {"nF", 1e-9}}},
        {"frequency", {{"Hz", 1.0}}},
        {"voltage", {{"V", 1.0}, {"kV", 1e3}}},
        {"power", {{"W", 1.0}, {"kW", 1e3}, {"MW", 1e6}}},
        {"reactive-power", {{"var", 1.0}, {"kvar", 1e3}, {"Mvar", 1e6}}},
        // Load reactive power is also accepted in kW, as hardware data sheets often list it.
        {"reactive-power-legacy", {{"var", 1.0}, {"kvar", 1e3}, {"Mvar", 1e6}, {"kW", 1e3}}},
        {"current", {{"A", 1.0}, {"kA", 1e3}}},
        {"time", {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}}},
        {"angle", {{"deg", std::numbers::pi / 180.0}, {"rad", 1.0}}},
    };
    return d;
}

const Dimension& dimension(std::string_view name) {
    for (const auto& d : dimensions())
        if (d.name == name) return d;
    throw std::logic_error("unknown dimension");
}

enum class Kind { Quantity, Number, Integer, Bool, Choice, Verbatim, KPolicy, Script };

struct Field {
    std::string_view section;
    std::string_view key;
    Kind kind;
    /// Dimension for quantities, '|'-separated options for choices.
    std::string_view detail;
    std::string_view def;
    std::string_view doc;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool allow_inf = false;
    bool allow_none = false;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<Field>& schema() {
    static const std::vector<Field> f{
        {"system", "frequency", Kind::Quantity, "frequency", "60 Hz", "grid frequency", 0.0},
        {"system", "line_voltage", Kind::Quantity, "voltage", "480 V", "line-line voltage", 0.0},
        {"system", "inverter_rated_power", Kind::Quantity, "power", "50 kW", "inverter rating (metadata)"},
        {"system", "dc_bus_voltage", Kind::Quantity, "voltage", "1800 V", "DC bus voltage (metadata)"},
        {"system", "filter_inductance", Kind::Verbatim, "", "18 uF", "output filter inductance, kept as written (metadata)"},
        {"system", "filter_capacitance", Kind::Quantity, "capacitance", "250 nF", "output filter capacitance (metadata)"},
        {"system", "max_output_current", Kind::Quantity, "current", "70 A", "inverter rms current limit", 0.0, kInf, true},
        {"system", "cable_resistance", Kind::Quantity, "resistance", "39 mOhm", "cable series resistance", 0.0},
        {"system", "cable_inductance", Kind::Quantity, "inductance", "70.8 uH", "cable series inductance", 0.0},
        {"system", "load_real_power", Kind::Quantity, "power", "25 kW", "wye load real power", 0.0},
        {"system", "load_reactive_power", Kind::Quantity, "reactive-power-legacy", "12.5 kvar", "wye load reactive power"},
        {"system", "source", Kind::Choice, "inverter|ideal", "inverter", "source model"},
        {"system", "v2_fraction", Kind::Number, "", "0.6", "inverter negative-sequence EMF / positive", 0.0, 1.0},
        {"system", "v0_fraction", Kind::Number, "", "0.6", "inverter zero-sequence EMF / positive", 0.0, 1.0},
        {"system", "v2_angle", Kind::Quantity, "angle", "0 deg", "negative-sequence EMF angle relative to positive"},
        {"system", "v0_angle", Kind::Quantity, "angle", "0 deg", "zero-sequence EMF angle relative to positive"},
        {"system", "source_grounded", Kind::Bool, "", "true", "source neutral solidly grounded"},
        {"system", "fault_position", Kind::Number, "", "0.5", "share of the cable between source bus and fault point", 0.0, 1.0},
        {"system", "zero_sequence_ratio", Kind::Number, "", "1", "cable z0/z1", 0.0},
        {"system", "load_ground", Kind::Quantity, "resistance", "0 Ohm", "load neutral to ground; none leaves it floating", 0.0, kInf, false, true},

        {"controller", "kpv", Kind::Number, "", "0.35", "voltage loop proportional gain (metadata)"},
        {"controller", "krv", Kind::Number, "", "400", "voltage loop resonant gain (metadata)"},
        {"controller", "kvh5", Kind::Number, "", "4", "voltage loop 5th harmonic gain (metadata)"},
        {"controller", "kvh7", Kind::Number, "", "20", "voltage loop 7th harmonic gain (metadata)"},
        {"controller", "kvh11", Kind::Number, "", "11", "voltage loop 11th harmonic gain (metadata)"},
        {"controller", "kpi", Kind::Number, "", "0.7", "current loop proportional gain (metadata)"},
        {"controller", "kri", Kind::Number, "", "400", "current loop resonant gain (metadata)"},
        {"controller", "kih5", Kind::Number, "", "30", "current loop 5th harmonic gain (metadata)"},
        {"controller", "kih7", Kind::Number, "", "30", "current loop 7th harmonic gain (metadata)"},
        {"controller", "kih11", Kind::Number, "", "30", "current loop 11th harmonic gain (metadata)"},

        {"fault", "kind", Kind::Choice, "lg|ll", "lg", "lg = phase a to ground, ll = phase b to c"},
        {"fault", "rf", Kind::Quantity, "resistance", "3.68 Ohm", "fault resistance; inf opens the fault", 0.0, kInf, true},
        {"fault", "sweep_min", Kind::Quantity, "resistance", "3.68 Ohm", "first sweep point", 0.0},
        {"fault", "sweep_max", Kind::Quantity, "resistance", "1 kOhm", "last sweep point", 0.0},
        {"fault", "sweep_points", Kind::Integer, "", "40", "number of sweep points", 1.0, 100000.0},
        {"fault", "sweep_spacing", Kind::Choice, "log|linear", "log", "sweep point spacing"},

        {"relay", "location", Kind::Choice, "upstream|downstream", "upstream", "relay side of the fault point"},
        {"relay", "k_policy", Kind::KPolicy, "", "auto", "auto, line, downstream-path or a complex literal"},
        {"relay", "voltage_form", Kind::Choice, "mixed-sign|all-minus", "mixed-sign", "sign of the I2/I0 drops in the upstream line-ground relay voltage"},

        {"dcb", "latency", Kind::Quantity, "time", "4 ms", "blocking channel latency", 0.0},
        {"dcb", "loss_probability", Kind::Number, "", "0", "per-transition loss probability", 0.0, 1.0},
        {"dcb", "seed", Kind::Integer, "", "1", "channel RNG seed", 0.0},
        {"dcb", "channel", Kind::Choice, "operational|failed", "operational", "channel state"},
        {"dcb", "coordination_time", Kind::Quantity, "time", "16.7 ms", "trip delay of both relays", 0.0},
        {"dcb", "duration", Kind::Quantity, "time", "100 ms", "simulated time", 0.0},
        {"dcb", "step", Kind::Quantity, "time", "0.1 ms", "fixed step", 0.0},
        {"dcb", "inception", Kind::Quantity, "time", "10 ms", "fault inception for the auto script", 0.0},
        {"dcb", "relay_a", Kind::Choice, "source-bus|midpoint-source-side|midpoint-load-side|load-bus", "midpoint-source-side", "terminal of relay A"},
        {"dcb", "relay_b", Kind::Choice, "source-bus|midpoint-source-side|midpoint-load-side|load-bus", "load-bus", "terminal of relay B"},
        {"dcb", "script", Kind::Script, "", "auto", "auto, or entries ms:relay:fwd|rev|none separated by ';'"},

        {"transient", "dt", Kind::Quantity, "time", "1 ms", "step", 0.0},
        {"transient", "duration", Kind::Quantity, "time", "200 ms", "simulated time", 0.0},
        {"transient", "fault_time", Kind::Quantity, "time", "50 ms", "fault inception", 0.0},
        {"transient", "tau", Kind::Quantity, "time", "5 ms", "limiter smoothing time constant", 0.0},
        {"transient", "limiter", Kind::Choice, "instantaneous|latching|none", "instantaneous", "current limiter model"},
    };
    return f;
}

constexpr std::array<std::string_view, 6> kSections{"system", "controller", "fault", "relay", "dcb",
                                                    "transient"};
constexpr std::array<std::string_view, 2> kOptionalSections{"dcb", "transient"};

bool is_optional_section(std::string_view s) {
    return std::find(kOptionalSections.begin(), kOptionalSections.end(), s) !=
           kOptionalSections.end();
}

const Field* find_field(std::string_view section, std::string_view key) {
    for (const auto& f : schema())
        if (f.section == section && f.key == key) return &f;
    return nullptr;
}

const Field& field(std::string_view section, std::string_view key) {
    if (const Field* f = find_field(section, key)) return *f;
    throw ValidationError(fmt::format("{}.{}: unknown key", section, key));
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

void check_range(const Field& f, double v) {
    if (std::isnan(v)) throw ValidationError(fmt::format("{}.{}: not a number", f.section, f.key));
    if (std::isinf(v) && !f.allow_inf)
        throw ValidationError(fmt::format("{}.{}: must be finite", f.section, f.key));
    if (v < f.lo || v > f.hi)
        throw ValidationError(fmt::format("{}.{}: {} outside [{}, {}]", f.section, f.key,
                                          format_number(v), format_number(f.lo),
                                          format_number(f.hi)));
}

struct ScriptItem {
    double ms;
    dcb::RelayId relay;
    bool fwd;
    bool rev;
};

std::vector<ScriptItem> parse_script(std::string_view text) {
    std::vector<ScriptItem> items;
    for (auto entry : split(text, ';')) {
        entry = trim(entry);
        if (entry.empty()) continue;
        const auto parts = split(entry, ':');
        if (parts.size() != 3)
            throw ValidationError(fmt::format("dcb.script: entry '{}' is not ms:relay:pickup", entry));
        const auto ms = to_double(parts[0]);
        if (!ms || !(*ms >= 0.0) || std::isinf(*ms))
            throw ValidationError(fmt::format("dcb.script: bad time in '{}'", entry));
        const auto relay = trim(parts[1]);
        if (relay != "A" && relay != "B")
            throw ValidationError(fmt::format("dcb.script: relay must be A or B in '{}'", entry));
        const auto pick = trim(parts[2]);
        if (pick != "fwd" && pick != "rev" && pick != "none")
            throw ValidationError(fmt::format("dcb.script: pickup must be fwd, rev or none in '{}'", entry));
        items.push_back({*ms, relay == "A" ? dcb::RelayId::A : dcb::RelayId::B, pick == "fwd",
                         pick == "rev"});
    }
    return items;
}

// Validates one raw value and returns its canonical text.
std::string canonical(const Field& f, std::string_view raw) {
    const std::string_view v = trim(raw);
    const auto where = [&] { return fmt::format("{}.{}", f.section, f.key); };
    switch (f.kind) {
    case Kind::Verbatim:
        if (v.empty()) throw ValidationError(where() + ": empty value");
        return std::string(v);
    case Kind::Number: {
        const auto x = to_double(v);
        if (!x) throw ValidationError(fmt::format("{}: '{}' is not a number", where(), v));
        check_range(f, *x);
        return format_number(*x);
    }
    case Kind::Integer: {
        long long x = 0;
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc{} || p != v.data() + v.size())
            throw ValidationError(fmt::format("{}: '{}' is not an integer", where(), v));
        check_range(f, static_cast<double>(x));
        return std::to_string(x);
    }
    case Kind::Bool:
        if (v == "true" || v == "yes" || v == "on" || v == "1") return "true";
        if (v == "false" || v == "no" || v == "off" || v == "0") return "false";
        throw ValidationError(fmt::format("{}: '{}' is not a boolean", where(), v));
    case Kind::Choice: {
        for (auto opt : split(f.detail, '|'))
            if (opt == v) return std::string(v);
        throw ValidationError(fmt::format("{}: '{}' is not one of {}", where(), v, f.detail));
    }
    case Kind::KPolicy:
        if (v == "auto" || v == "line" || v == "downstream-path") return std::string(v);
        try {
            return format_complex(parse_complex(v));
        } catch (const ValidationError&) {
            throw ValidationError(fmt::format(
                "{}: '{}' is not auto, line, downstream-path or a complex number", where(), v));
        }
    case Kind::Script:
        if (v == "auto") return "auto";
        parse_script(v);
        return std::string(v);
    case Kind::Quantity: {
        if (f.allow_none && v == "none") return "none";
        const auto space = v.find_last_of(" \t");
        const Dimension& dim = dimension(f.detail);
        std::string units;
        for (const auto& u : dim.units) units += (units.empty() ? "" : ", ") + std::string(u.name);
        if (space == std::string_view::npos)
            throw ValidationError(fmt::format("{}: '{}' needs a unit ({})", where(), v, units));
        const auto num = to_double(v.substr(0, space));
        const auto unit = trim(v.substr(space + 1));
        if (!num) throw ValidationError(fmt::format("{}: '{}' is not a number", where(), v.substr(0, space)));
        const auto it = std::find_if(dim.units.begin(), dim.units.end(),
                                     [&](const Unit& u) { return u.name == unit; });
        if (it == dim.units.end())
            throw ValidationError(fmt::format("{}: unit '{}' is not a {} unit (expected one of {})",
                                              where(), unit, dim.name, units));
        check_range(f, *num * it->scale);
        return fmt::format("{} {}", format_number(*num), unit);
    }
    }
    throw std::logic_error("unhandled field kind");
}

double quantity_si(const Field& f, const std::string& canon) {
    const auto space = canon.find(' ');
    const double num = *to_double(std::string_view(canon).substr(0, space));
    const auto unit = std::string_view(canon).substr(space + 1);
    for (const auto& u : dimension(f.detail).units)
        if (u.name == unit) return num * u.scale;
    throw std::logic_error("canonical quantity with unknown unit");
}

std::map<std::string, std::string> section_defaults(std::string_view section) {
    std::map<std::string, std::string> out;
    for (const auto& f : schema())
        if (f.section == section) out.emplace(f.key, canonical(f, f.def));
    return out;
}

} // namespace

// ---- Scenario ------------------------------------------------------------

bool Scenario::has_section(std::string_view section) const {
    return values_.find(section) != values_.end();
}

const std::string& Scenario::text(std::string_view section, std::string_view key) const {
    field(section, key);
    const auto s = values_.find(section);
    if (s == values_.end())
        throw ValidationError(fmt::format("section [{}] is missing", section));
    return s->second.at(std::string(key));
}

double Scenario::si(std::string_view section, std::string_view key) const {
    const Field& f = field(section, key);
    if (f.kind != Kind::Quantity) throw std::logic_error("not a quantity field");
    const std::string& t = text(section, key);
    if (t == "none") throw ValidationError(fmt::format("{}.{}: value is none", section, key));
    return quantity_si(f, t);
}

double Scenario::number(std::string_view section, std::string_view key) const {
    return *to_double(text(section, key));
}

long Scenario::integer(std::string_view section, std::string_view key) const {
    return std::stol(text(section, key));
}

bool Scenario::flag(std::string_view section, std::string_view key) const {
    return text(section, key) == "true";
}

void Scenario::set(std::string_view section, std::string_view key, std::string_view value) {
    const Field& f = field(section, key);
    if (!has_section(section)) add_section(section);
    values_[std::string(section)][std::string(key)] = canonical(f, value);
}

void Scenario::add_section(std::string_view section) {
    if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
        throw ValidationError(fmt::format("unknown section [{}]", section));
    if (!has_section(section)) values_.emplace(std::string(section), section_defaults(section));
}

Scenario parse_scenario(std::string_view text, std::string_view origin) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(fmt::format("{}:{}: {}", origin, e.line(), e.message()));
    }

    Scenario s;
    for (auto sec : kSections)
        if (!is_optional_section(sec)) s.add_section(sec);

    // The INI reader drops empty sections; a bare [dcb] still enables its defaults.
    for (auto line : split(text, '\n')) {
        line = trim(line);
        if (line.empty() || line.front() != '[') continue;
        const auto end = line.find(']');
        if (end == std::string_view::npos) continue;
        const auto name = trim(line.substr(1, end - 1));
        if (std::find(kSections.begin(), kSections.end(), name) == kSections.end())
            throw ValidationError(fmt::format("{}: unknown section [{}]", origin, name));
        s.add_section(name);
    }

    for (const auto& [name, node] : tree) {
        const bool known =
            std::find(kSections.begin(), kSections.end(), name) != kSections.end();
        if (!known) {
            if (node.empty() && !node.data().empty())
                throw ValidationError(fmt::format("{}: key '{}' outside any section", origin, name));
            throw ValidationError(fmt::format("{}: unknown section [{}]", origin, name));
        }
        s.add_section(name);
        for (const auto& [key, value] : node) {
            if (!find_field(name, key))
                throw ValidationError(fmt::format("{}: {}.{}: unknown key", origin, name, key));
            try {
                s.set(name, key, value.data());
            } catch (const ValidationError& e) {
                throw ValidationError(fmt::format("{}: {}", origin, e.what()));
            }
        }
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(fmt::format("cannot open scenario '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.string());
}

std::string emit_scenario(const Scenario& s) {
    std::string out;
    for (auto sec : kSections) {
        if (!s.has_section(sec)) continue;
        if (!out.empty()) out += '\n';
        out += fmt::format("[{}]\n", sec);
        for (const auto& f : schema())
            if (f.section == sec) out += fmt::format("{} = {}\n", f.key, s.text(sec, f.key));
    }
    return out;
}

std::string digest(const Scenario& s) {
    const std::string text = emit_scenario(s);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

Scenario default_scenario() {
    Scenario s = parse_scenario("", "<default>");
    s.add_section("dcb");
    s.add_section("transient");
    return s;
}

std::vector<FieldDoc> field_docs() {
    std::vector<FieldDoc> out;
    for (const auto& f : schema()) out.push_back({f.section, f.key, f.def, f.doc});
    return out;
}

// ---- typed views -------------------------------------------------------------

SystemParameters system_parameters(const Scenario& s) {
    SystemParameters p;
    p.frequency = s.si("system", "frequency");
    p.v_ll = s.si("system", "line_voltage");
    p.i_max = s.si("system", "max_output_current");
    p.cable_r = s.si("system", "cable_resistance");
    p.cable_l = s.si("system", "cable_inductance");
    p.load_p = s.si("system", "load_real_power");
    p.load_q = s.si("system", "load_reactive_power");
    p.split = s.number("system", "fault_position");
    p.zero_sequence_ratio = s.number("system", "zero_sequence_ratio");
    if (s.text("system", "load_ground") == "none")
        p.load_ground.reset();
    else
        p.load_ground = s.si("system", "load_ground");
    p.source_grounded = s.flag("system", "source_grounded");
    p.v2_fraction = s.number("system", "v2_fraction");
    p.v0_fraction = s.number("system", "v0_fraction");
    p.v2_angle = s.si("system", "v2_angle");
    p.v0_angle = s.si("system", "v0_angle");
    return p;
}

SourceKind source_kind(const Scenario& s) {
    return s.text("system", "source") == "ideal" ? SourceKind::Ideal : SourceKind::Inverter;
}

InverterControlParams control_params(const Scenario& s) {
    InverterControlParams c;
    c.kpv = s.number("controller", "kpv");
    c.krv = s.number("controller", "krv");
    c.kvh5 = s.number("controller", "kvh5");
    c.kvh7 = s.number("controller", "kvh7");
    c.kvh11 = s.number("controller", "kvh11");
    c.kpi = s.number("controller", "kpi");
    c.kri = s.number("controller", "kri");
    c.kih5 = s.number("controller", "kih5");
    c.kih7 = s.number("controller", "kih7");
    c.kih11 = s.number("controller", "kih11");
    c.p_rated = s.si("system", "inverter_rated_power");
    c.vdc = s.si("system", "dc_bus_voltage");
    c.filter_l = s.text("system", "filter_inductance");
    c.filter_c = s.si("system", "filter_capacitance");
    c.cable_r = s.si("system", "cable_resistance");
    c.cable_l = s.si("system", "cable_inductance");
    return c;
}

FaultSpec fault_spec(const Scenario& s) {
    FaultSpec f;
    f.kind = s.text("fault", "kind") == "ll" ? FaultKind::LineLineBC : FaultKind::LineGroundA;
    f.rf = s.si("fault", "rf");
    return f;
}

RelayLocation relay_location(const Scenario& s) {
    return s.text("relay", "location") == "downstream" ? RelayLocation::DownstreamOfFault
                                                        : RelayLocation::UpstreamOfFault;
}

faultsolve::RelayVoltageForm voltage_form(const Scenario& s) {
    return s.text("relay", "voltage_form") == "all-minus" ? faultsolve::RelayVoltageForm::AllMinus
                                                          : faultsolve::RelayVoltageForm::MixedSign;
}

MicrogridModel build_model(const Scenario& s, std::optional<double> rf) {
    FaultSpec f = fault_spec(s);
    if (rf) f.rf = *rf;
    return build_system(system_parameters(s), source_kind(s), f);
}

Phasor k_factor(const Scenario& s, const MicrogridModel& m) {
    const std::string& policy = s.text("relay", "k_policy");
    if (policy == "line") return relaying::line_k(m);
    if (policy == "downstream-path") return relaying::downstream_path_k(m);
    if (policy == "auto")
        return relay_location(s) == RelayLocation::DownstreamOfFault
                   ? relaying::downstream_path_k(m)
                   : relaying::line_k(m);
    return parse_complex(policy);
}

std::vector<double> SweepSpec::values() const {
    if (!(min > 0.0) && log_spacing)
        throw ValidationError("fault.sweep_min must be > 0 for log spacing");
    if (min > max) throw ValidationError("fault.sweep_min exceeds fault.sweep_max");
    if (points < 1) throw ValidationError("fault.sweep_points must be >= 1");
    if (points == 1 || min == max) return {min};
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(points);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(n - 1);
        v.push_back(log_spacing ? min * std::pow(max / min, u) : min + (max - min) * u);
    }
    v.front() = min;
    v.back() = max;
    return v;
}

SweepSpec sweep_spec(const Scenario& s) {
    SweepSpec w;
    w.min = s.si("fault", "sweep_min");
    w.max = s.si("fault", "sweep_max");
    w.points = s.integer("fault", "sweep_points");
    w.log_spacing = s.text("fault", "sweep_spacing") == "log";
    w.values();
    return w;
}

dcb::DcbScenario dcb_scenario(const Scenario& s, std::optional<std::uint64_t> seed) {
    if (!s.has_section("dcb")) throw ValidationError("scenario has no [dcb] section");
    auto ms = [&](std::string_view key) { return dcb::from_ms(s.si("dcb", key) * 1e3); };

    dcb::DcbScenario d;
    d.channel.latency = ms("latency");
    d.channel.loss_probability = s.number("dcb", "loss_probability");
    d.channel.seed = seed ? *seed : std::stoull(s.text("dcb", "seed"));
    d.channel.operational = s.text("dcb", "channel") == "operational";
    d.relay_a.coordination_time = ms("coordination_time");
    d.relay_b.coordination_time = d.relay_a.coordination_time;
    d.duration = ms("duration");
    d.step = ms("step");

    const std::string& script = s.text("dcb", "script");
    if (script == "auto") {
        auto terminal = [&](std::string_view key) {
            const std::string& t = s.text("dcb", key);
            if (t == "source-bus") return dcb::RelayTerminal::SourceBus;
            if (t == "midpoint-source-side") return dcb::RelayTerminal::MidpointSourceSide;
            if (t == "midpoint-load-side") return dcb::RelayTerminal::MidpointLoadSide;
            return dcb::RelayTerminal::LoadBus;
        };
        d.fault_script = dcb::couple_from_network(build_model(s), {terminal("relay_a"), terminal("relay_b")},
                                                  ms("inception"));
    } else {
        for (const auto& item : parse_script(script))
            d.fault_script.push_back({dcb::from_ms(item.ms), item.relay, item.fwd, item.rev});
    }
    d.validate();
    return d;
}

transim::TrajectoryOptions trajectory_options(const Scenario& s) {
    if (!s.has_section("transient")) throw ValidationError("scenario has no [transient] section");
    transim::TrajectoryOptions o;
    o.dt = s.si("transient", "dt");
    o.duration = s.si("transient", "duration");
    o.fault_time = s.si("transient", "fault_time");
    o.tau_lim = s.si("transient", "tau");
    const std::string& lim = s.text("transient", "limiter");
    o.limiter = lim == "latching" ? transim::LimiterKind::Latching
                : lim == "none"   ? transim::LimiterKind::None
                                  : transim::LimiterKind::InstantaneousSaturation;
    o.location = relay_location(s);
    o.validate();
    return o;
}

// ---- formatting -------------------------------------------------------------

std::string format_number(double x) {
    if (x == 0.0) return "0";
    return fmt::format("{}", x);
}

std::string format_complex(Phasor z) {
    const double re = z.real() == 0.0 ? 0.0 : z.real();
    const double im = z.imag() == 0.0 ? 0.0 : z.imag();
    const std::string im_text = format_number(std::abs(im));
    return fmt::format("{}{}{}j", format_number(re), std::signbit(im) ? "-" : "+", im_text);
}

Phasor parse_complex(std::string_view text) {
    std::string_view v = trim(text);
    if (v.empty()) throw ValidationError("empty complex literal");
    if (v.back() != 'j') {
        if (const auto x = to_double(v)) return {*x, 0.0};
        throw ValidationError(fmt::format("'{}' is not a complex literal", v));
    }
    v.remove_suffix(1);
    // Split at the last sign that is not part of an exponent.
    for (std::size_t i = v.size(); i-- > 1;) {
        if ((v[i] == '+' || v[i] == '-') && v[i - 1] != 'e' && v[i - 1] != 'E') {
            const auto re = to_double(v.substr(0, i));
            const auto im = to_double(v.substr(i));
            if (re && im) return {*re, *im};
            break;
        }
    }
    if (const auto im = to_double(v)) return {0.0, *im};
    throw ValidationError(fmt::format("'{}j' is not a complex literal", v));
}

} // namespace mgrelay::scenario
