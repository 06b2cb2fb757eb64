#include "mgrelay/errors.hpp"
#include "mgrelay/faultsolve.hpp"
#include "mgrelay/oracle.hpp"
#include "mgrelay/relaying.hpp"
#include "support.hpp"

using namespace mgrelay;
using namespace mgrelay::relaying;
using test::near_abs;
using test::near_rel;

TEST(Relaying, KFactor) {
    const Phasor z{0.02, 0.013};
    EXPECT_TRUE(near_abs(k_factor(z, z), 0.0, 1e-15));
    EXPECT_TRUE(near_abs(k_factor(3.0 * z, z), -2.0, 1e-15));
    EXPECT_TRUE(near_abs(k_factor(0.0, z), 1.0, 0.0));
    EXPECT_THROW(k_factor(z, 0.0), ValidationError);
}

TEST(Relaying, MeasureZlgTrivial) {
    EXPECT_TRUE(near_abs(measure_zlg(1.0, 1.0, 0.0, {5.0, -2.0}), 1.0, 0.0));
    EXPECT_THROW(measure_zlg(1.0, 0.0, 0.0, 0.0), NumericalError);
}

TEST(Relaying, MeasureZllRejectsZeroCurrent) {
    EXPECT_THROW(measure_zll(1.0, 0.0, 2.0, 2.0), NumericalError);
}

TEST(Relaying, HealthyLoadFlowReadsLoadThroughLine) {
    FaultSpec open;
    open.rf = std::numeric_limits<double>::infinity();
    const MicrogridModel m = reference_system(SourceKind::Ideal, open);
    const FaultSolution s = oracle::solve_network(m, RelayLocation::UpstreamOfFault);
    const Phasor z = measure_zll(s.relay_v.b, s.relay_v.c, s.relay_i.b, s.relay_i.c);
    EXPECT_TRUE(near_rel(z, m.z_d1(), 1e-9));
}

TEST(Relaying, DownstreamCompensatedIsLoadPath) {
    const MicrogridModel m = reference_system(SourceKind::Ideal, {FaultKind::LineGroundA, 3.68});
    const FaultSolution s = faultsolve::solve_lg_downstream(m);
    EXPECT_TRUE(near_rel(compensated_impedance(s, downstream_path_k(m)), m.z_d1(), 1e-9));
}

TEST(Relaying, OracleUpstreamCompensatedMatchesAnalytic) {
    const MicrogridModel m = reference_system(SourceKind::Ideal, {FaultKind::LineGroundA, 3.68});
    const Phasor k = line_k(m);
    const Phasor zo = compensated_impedance(oracle::solve_network(m, RelayLocation::UpstreamOfFault), k);
    const Phasor za = compensated_impedance(faultsolve::solve_lg_upstream_ideal(m), k);
    EXPECT_TRUE(near_rel(za, zo, 0.02));
}

TEST(Relaying, OracleLlDownstreamAndUpstream) {
    MicrogridModel m = reference_system(SourceKind::Ideal, {FaultKind::LineLineBC, 1.0});
    FaultSolution s = oracle::solve_network(m, RelayLocation::DownstreamOfFault);
    EXPECT_TRUE(near_rel(measure_zll(s.relay_v.b, s.relay_v.c, s.relay_i.b, s.relay_i.c),
                         m.z_d1(), 1e-9));
    m.fault.rf = 1e-3;
    s = oracle::solve_network(m, RelayLocation::UpstreamOfFault);
    EXPECT_LT(std::abs(measure_zll(s.relay_v.b, s.relay_v.c, s.relay_i.b, s.relay_i.c)),
              0.01 * std::abs(m.load.z_load));
}

TEST(Relaying, MhoCharacteristic) {
    GroundDistanceSettings s;
    s.reach = {0.5, 2.0};
    EXPECT_TRUE(mho_trip(s.reach / 2.0, s));
    EXPECT_FALSE(mho_trip(2.0 * s.reach, s));
    EXPECT_TRUE(mho_trip(0.0, s));
    EXPECT_TRUE(mho_trip(s.reach, s));
    EXPECT_FALSE(mho_trip(-s.reach / 2.0, s));
}

TEST(Relaying, DirectionalIndeterminateWithoutPolarizingQuantity) {
    EXPECT_EQ(directional_neg_seq(10.0, 0.0, 0.6), DirectionalDecision::Indeterminate);
    EXPECT_EQ(directional_neg_seq(0.0, 10.0, 0.6), DirectionalDecision::Indeterminate);
}

TEST(Relaying, DirectionalOnUpstreamLgFault) {
    const MicrogridModel m = reference_system(SourceKind::Ideal, {FaultKind::LineGroundA, 0.0});
    const FaultSolution s = oracle::solve_network(m, RelayLocation::UpstreamOfFault);
    const double angle = std::arg(m.line_1m.z1 + m.line_m2.z1);
    const Phasor v2 = s.relay_seq_v.neg;
    const Phasor i2 = s.relay_seq_i.neg;
    EXPECT_EQ(directional_neg_seq(v2, i2, angle), DirectionalDecision::Forward);
    EXPECT_EQ(directional_neg_seq(v2, -i2, angle), DirectionalDecision::Reverse);
}

TEST(Relaying, DirectionalAntisymmetry) {
    for (int deg = -180; deg < 180; deg += 7) {
        const Phasor i2 = polar_deg(20.0, deg);
        const auto d = directional_neg_seq(10.0, i2, 0.5);
        const auto r = directional_neg_seq(10.0, -i2, 0.5);
        if (d == DirectionalDecision::Indeterminate) {
            EXPECT_EQ(r, DirectionalDecision::Indeterminate);
        } else {
            EXPECT_NE(d, r);
            EXPECT_NE(r, DirectionalDecision::Indeterminate);
        }
    }
}

TEST(Relaying, NamesAreStable) {
    EXPECT_EQ(to_string(DirectionalDecision::Forward), "forward");
    EXPECT_EQ(to_string(DirectionalDecision::Reverse), "reverse");
    EXPECT_EQ(to_string(DirectionalDecision::Indeterminate), "indeterminate");
}

TEST(Relaying, DefaultGroundSettingsReachLoadPath) {
    const MicrogridModel m = reference_system(SourceKind::Ideal, {});
    const GroundDistanceSettings s = default_ground_settings(m, 0.0);
    EXPECT_TRUE(near_rel(s.reach, m.z_d1(), 1e-12));
}
