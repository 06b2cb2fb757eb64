#include <filesystem>

#include "mgrelay/errors.hpp"
#include "mgrelay/report.hpp"
#include "mgrelay/scenario.hpp"
#include "support.hpp"

using namespace mgrelay;
using namespace mgrelay::scenario;
using test::near_rel;

namespace {

const std::filesystem::path kScenarios{MGRELAY_SCENARIO_DIR};

std::string error_of(std::string_view text) {
    try {
        parse_scenario(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Scenario, EmptyTextGivesDefaults) {
    const Scenario s = parse_scenario("");
    EXPECT_EQ(s.text("fault", "kind"), "lg");
    EXPECT_DOUBLE_EQ(s.si("system", "cable_resistance"), 0.039);
    EXPECT_NEAR(s.si("system", "cable_inductance"), 70.8e-6, 1e-18);
    EXPECT_DOUBLE_EQ(s.si("fault", "sweep_max"), 1000.0);
    EXPECT_FALSE(s.has_section("dcb"));
    EXPECT_TRUE(s.has_section("relay"));
}

TEST(Scenario, DefaultFileMatchesBuiltInDefaults) {
    EXPECT_EQ(load_scenario(kScenarios / "default.ini"), default_scenario());
}

TEST(Scenario, EmitParseRoundTrip) {
    for (const char* name : {"default.ini", "dcb-internal.ini", "dcb-external.ini",
                             "ll-downstream-trajectory.ini", "lg-ideal-sweep.ini"}) {
        const Scenario s = load_scenario(kScenarios / name);
        const std::string once = emit_scenario(s);
        const Scenario back = parse_scenario(once);
        EXPECT_EQ(back, s) << name;
        EXPECT_EQ(emit_scenario(back), once) << name;
        EXPECT_EQ(digest(back), digest(s)) << name;
    }
}

TEST(Scenario, DigestIsHexSha256) {
    const std::string d = digest(default_scenario());
    EXPECT_EQ(d.size(), 64u);
    EXPECT_EQ(d.find_first_not_of("0123456789abcdef"), std::string::npos);
    Scenario other = default_scenario();
    other.set("fault", "rf", "4 Ohm");
    EXPECT_NE(digest(other), d);
}

TEST(Scenario, UnitsAndPrefixes) {
    const Scenario s = parse_scenario("[system]\ncable_resistance = 0.039 Ohm\n"
                                      "load_reactive_power = 12.5 kW\n");
    EXPECT_DOUBLE_EQ(s.si("system", "cable_resistance"), 0.039);
    EXPECT_DOUBLE_EQ(s.si("system", "load_reactive_power"), 12.5e3);
    EXPECT_EQ(s.text("system", "cable_resistance"), "0.039 Ohm");
    const Scenario k = parse_scenario("[fault]\nrf = 1 kOhm\n");
    EXPECT_DOUBLE_EQ(k.si("fault", "rf"), 1000.0);
}

TEST(Scenario, OpenFaultAllowed) {
    const Scenario s = parse_scenario("[fault]\nrf = inf Ohm\n");
    EXPECT_TRUE(fault_spec(s).is_open());
}

TEST(Scenario, EmptySectionIsKept) {
    const Scenario s = parse_scenario("[dcb]\n");
    EXPECT_TRUE(s.has_section("dcb"));
    EXPECT_EQ(s.text("dcb", "script"), "auto");
}

TEST(Scenario, ErrorsNameTheField) {
    EXPECT_NE(error_of("[fault]\nresistance = 3 Ohm\n").find("fault.resistance"), std::string::npos);
    EXPECT_NE(error_of("[fault]\nrf = 3 V\n").find("fault.rf"), std::string::npos);
    EXPECT_NE(error_of("[fault]\nrf = 3\n").find("fault.rf"), std::string::npos);
    EXPECT_NE(error_of("[fault]\nkind = abc\n").find("fault.kind"), std::string::npos);
    EXPECT_NE(error_of("[system]\nv2_fraction = 2\n").find("system.v2_fraction"), std::string::npos);
    EXPECT_NE(error_of("[nowhere]\n").find("nowhere"), std::string::npos);
    EXPECT_NE(error_of("[system]\nsource_grounded = maybe\n").find("system.source_grounded"),
              std::string::npos);
    EXPECT_FALSE(error_of("rf = 3 Ohm\n").empty());
}

TEST(Scenario, SetValidates) {
    Scenario s = default_scenario();
    EXPECT_THROW(s.set("fault", "rf", "-1 Ohm"), ValidationError);
    EXPECT_THROW(s.set("fault", "bogus", "1"), ValidationError);
    s.set("fault", "kind", "ll");
    EXPECT_EQ(fault_spec(s).kind, FaultKind::LineLineBC);
}

TEST(Scenario, BuildModelMatchesReferenceSystem) {
    const MicrogridModel a = build_model(default_scenario());
    const MicrogridModel b = reference_system(SourceKind::Inverter, {FaultKind::LineGroundA, 3.68});
    EXPECT_TRUE(near_rel(a.line_1m.z1, b.line_1m.z1, 1e-12));
    EXPECT_TRUE(near_rel(a.load.z_load, b.load.z_load, 1e-12));
    EXPECT_DOUBLE_EQ(a.fault.rf, 3.68);
    EXPECT_TRUE(is_inverter(a.source));
}

TEST(Scenario, UngroundedLoad) {
    const Scenario s = parse_scenario("[system]\nload_ground = none\n");
    EXPECT_FALSE(build_model(s).load.z_ground.has_value());
}

TEST(Scenario, SweepValues) {
    SweepSpec sp;
    const auto v = sp.values();
    ASSERT_EQ(v.size(), 40u);
    EXPECT_DOUBLE_EQ(v.front(), 3.68);
    EXPECT_NEAR(v.back(), 1000.0, 1e-9);
    sp.log_spacing = false;
    sp.points = 3;
    EXPECT_NEAR(sp.values()[1], (3.68 + 1000.0) / 2.0, 1e-9);
    sp.min = sp.max = 5.0;
    sp.points = 1;
    EXPECT_EQ(sp.values(), std::vector<double>{5.0});
}

TEST(Scenario, ExplicitDcbScript) {
    Scenario s = parse_scenario("[dcb]\nscript = 10:A:fwd;10:B:rev;30:B:none\n");
    const dcb::DcbScenario d = dcb_scenario(s);
    ASSERT_EQ(d.fault_script.size(), 3u);
    EXPECT_EQ(d.fault_script[1], (dcb::ScriptEntry{dcb::from_ms(10.0), dcb::RelayId::B, false, true}));
    EXPECT_THROW(s.set("dcb", "script", "10:C:fwd"), ValidationError);
    EXPECT_THROW(dcb_scenario(parse_scenario("")), ValidationError);
}

TEST(Scenario, ComplexLiterals) {
    EXPECT_EQ(parse_complex("1.5-2j"), (Phasor{1.5, -2.0}));
    EXPECT_EQ(parse_complex("3"), (Phasor{3.0, 0.0}));
    EXPECT_EQ(parse_complex("-0.5+0.25j"), (Phasor{-0.5, 0.25}));
    EXPECT_EQ(parse_complex(format_complex({0.1, -7.25})), (Phasor{0.1, -7.25}));
    EXPECT_THROW(parse_complex("abc"), ValidationError);
    EXPECT_EQ(format_number(0.0), "0");
}

TEST(Scenario, FieldDocsCoverEveryKey) {
    const Scenario s = default_scenario();
    for (const auto& f : field_docs()) {
        EXPECT_NO_THROW((void)s.text(f.section, f.key)) << f.section << "." << f.key;
        EXPECT_FALSE(f.description.empty());
    }
}

TEST(Report, DefaultCaseWithinBudget) {
    const report::CaseResult r = report::run_case(default_scenario(), 2);
    EXPECT_LE(r.relative_error, 0.02);
    const std::string doc = report::format_case(default_scenario(), r);
    EXPECT_EQ(doc.rfind("# mgrelay ", 0), 0u);
    EXPECT_NE(doc.find("relative_error = "), std::string::npos);
}

TEST(Report, DownstreamCaseReadsZd1) {
    for (double rf : {0.5, 3.68, 400.0}) {
        const report::CaseResult r = report::run_case(default_scenario(), 3, rf);
        EXPECT_TRUE(near_rel(r.analytical.z_measured, r.z_d1, 1e-9));
    }
}

TEST(Report, MismatchedSourceIsRejected) {
    EXPECT_THROW(report::run_case(default_scenario(), 1), ValidationError);
    EXPECT_THROW(report::run_case(default_scenario(), 4), ValidationError);
}

TEST(Report, SweepsAreMonotone) {
    for (const char* src : {"ideal", "inverter"}) {
        Scenario s = default_scenario();
        s.set("system", "source", src);
        const auto rows = report::run_sweep(s);
        ASSERT_EQ(rows.size(), 40u);
        for (std::size_t i = 1; i < rows.size(); ++i)
            EXPECT_GT(std::abs(rows[i].z), std::abs(rows[i - 1].z)) << src;
    }
}

TEST(Report, SinglePointSweepEqualsCase) {
    Scenario s = default_scenario();
    s.set("fault", "sweep_min", "10 Ohm");
    s.set("fault", "sweep_max", "10 Ohm");
    s.set("fault", "sweep_points", "1");
    const auto rows = report::run_sweep(s);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].z, report::run_case(s, std::nullopt, 10.0).analytical.z_measured);
}

TEST(Report, SweepIsReproducible) {
    const Scenario s = default_scenario();
    EXPECT_EQ(report::format_sweep(s, report::run_sweep(s)),
              report::format_sweep(s, report::run_sweep(s)));
}

TEST(Report, DcbScenarioFiles) {
    const Scenario internal = load_scenario(kScenarios / "dcb-internal.ini");
    const report::DcbRun in = report::run_dcb(internal);
    EXPECT_TRUE(dcb::outcome(in.events, dcb::RelayId::A).tripped);
    EXPECT_TRUE(dcb::outcome(in.events, dcb::RelayId::B).tripped);

    const report::DcbRun ex = report::run_dcb(load_scenario(kScenarios / "dcb-external.ini"));
    EXPECT_FALSE(dcb::outcome(ex.events, dcb::RelayId::A).tripped);
    EXPECT_FALSE(dcb::outcome(ex.events, dcb::RelayId::B).tripped);

    Scenario dead = internal;
    dead.set("dcb", "channel", "failed");
    const report::DcbRun d = report::run_dcb(dead);
    EXPECT_TRUE(dcb::outcome(d.events, dcb::RelayId::A).tripped);
    EXPECT_TRUE(dcb::outcome(d.events, dcb::RelayId::B).tripped);
}

TEST(Report, TrajectoryScenarioFile) {
    const Scenario s = load_scenario(kScenarios / "ll-downstream-trajectory.ini");
    const transim::Trajectory t = report::run_trajectory(s);
    const MicrogridModel m = build_model(s);
    EXPECT_TRUE(near_rel(t.points.back().z_ll, m.z_d1(), 0.01));
    const std::string doc = report::format_trajectory_report(s, t);
    EXPECT_NE(doc.find("# summary final_z_lg="), std::string::npos);
}

TEST(Report, ValidationSummary) {
    const std::string v = report::format_validation(default_scenario());
    EXPECT_NE(v.find("case = 2"), std::string::npos);
    EXPECT_NE(v.find(emit_scenario(default_scenario())), std::string::npos);
}
