#include "mgrelay/oracle.hpp"

#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "mgrelay/errors.hpp"

namespace mgrelay::oracle {

namespace {

constexpr int kGround = -1;
constexpr std::array<const char*, 3> kPhase{"a", "b", "c"};
using Triplet3 = std::array<int, 3>;

PhaseImpedanceMatrix fortescue() {
    PhaseImpedanceMatrix a;
    const std::array<Phasor, 9> v{1.0, 1.0, 1.0, 1.0, kAlpha2, kAlpha, 1.0, kAlpha, kAlpha2};
    a.m = v;
    return a;
}

PhaseImpedanceMatrix multiply(const PhaseImpedanceMatrix& x, const PhaseImpedanceMatrix& y) {
    PhaseImpedanceMatrix r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r(i, j) += x(i, k) * y(k, j);
    return r;
}

bool is_zero(const PhaseImpedanceMatrix& z) {
    for (const auto& e : z.m)
        if (e != Phasor{}) return false;
    return true;
}

// Accumulates MNA stamps; unknown i < node count is a node voltage, the rest
// are currents through ideal voltage sources.
class Stamper {
public:
    int node(const std::string& name) {
        names_.push_back(name);
        return static_cast<int>(names_.size()) - 1;
    }

    void admittance(int p, int q, Phasor y) {
        add(p, p, y);
        add(q, q, y);
        add(p, q, -y);
        add(q, p, -y);
    }

    void block(const Triplet3& p, const Triplet3& q, const PhaseImpedanceMatrix& y) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const auto pi = static_cast<std::size_t>(i);
                const auto pj = static_cast<std::size_t>(j);
                add(p[pi], p[pj], y(i, j));
                add(q[pi], q[pj], y(i, j));
                add(p[pi], q[pj], -y(i, j));
                add(q[pi], p[pj], -y(i, j));
            }
    }

    // V_to − V_from = e; the returned source current flows from → to.
    std::size_t source(int from, int to, Phasor e, const std::string& name) {
        sources_.push_back({from, to, e, name});
        return sources_.size() - 1;
    }

    void inject(int p, Phasor i) {
        if (p != kGround) injections_[p] += i;
    }

    NodalSystem finish() const {
        NodalSystem s;
        s.node_count = names_.size();
        const std::size_t n = names_.size() + sources_.size();
        s.unknowns = names_;
        for (const auto& src : sources_) s.unknowns.push_back("i:" + src.name);
        s.matrix.assign(n * n, Phasor{});
        s.rhs.assign(n, Phasor{});
        auto at = [&](std::size_t r, std::size_t c) -> Phasor& { return s.matrix[r * n + c]; };
        for (const auto& [rc, y] : entries_)
            at(static_cast<std::size_t>(rc.first), static_cast<std::size_t>(rc.second)) += y;
        for (const auto& [p, i] : injections_) s.rhs[static_cast<std::size_t>(p)] += i;
        for (std::size_t k = 0; k < sources_.size(); ++k) {
            const auto& src = sources_[k];
            const std::size_t col = names_.size() + k;
            if (src.from != kGround) {
                at(static_cast<std::size_t>(src.from), col) += 1.0;
                at(col, static_cast<std::size_t>(src.from)) -= 1.0;
            }
            if (src.to != kGround) {
                at(static_cast<std::size_t>(src.to), col) -= 1.0;
                at(col, static_cast<std::size_t>(src.to)) += 1.0;
            }
            s.rhs[col] = src.e;
        }
        return s;
    }

private:
    struct Source {
        int from;
        int to;
        Phasor e;
        std::string name;
    };

    void add(int r, int c, Phasor y) {
        if (r == kGround || c == kGround) return;
        entries_.emplace_back(std::pair{r, c}, y);
    }

    std::vector<std::string> names_;
    std::vector<std::pair<std::pair<int, int>, Phasor>> entries_;
    std::map<int, Phasor> injections_;
    std::vector<Source> sources_;
};

// Where each piece of the assembled network lives in the unknown vector.
struct Layout {
    Triplet3 bus1{kGround, kGround, kGround};
    Triplet3 mid{};
    Triplet3 bus2{};
    int load_neutral = kGround;
    int source_neutral = kGround;
    bool upstream = false;
    PhaseImpedanceMatrix y1m{};
    PhaseImpedanceMatrix y_m2{};
    std::optional<std::array<std::size_t, 3>> link_1m;
    std::optional<std::array<std::size_t, 3>> link_m2;
};

Triplet3 phase_nodes(Stamper& st, const std::string& prefix) {
    return {st.node(prefix + ".a"), st.node(prefix + ".b"), st.node(prefix + ".c")};
}

void stamp_segment(Stamper& st, const Triplet3& from, const Triplet3& to,
                   const SequenceImpedancePair& z, const std::string& name,
                   PhaseImpedanceMatrix& y_out,
                   std::optional<std::array<std::size_t, 3>>& link_out) {
    const PhaseImpedanceMatrix zp = sequence_to_phase_matrix(z);
    if (is_zero(zp)) {
        std::array<std::size_t, 3> link{};
        for (std::size_t p = 0; p < 3; ++p)
            link[p] = st.source(from[p], to[p], Phasor{}, name + "." + kPhase[p]);
        link_out = link;
        return;
    }
    y_out = invert(zp);
    st.block(from, to, y_out);
}

std::pair<NodalSystem, Layout> assemble(const MicrogridModel& m, const NetworkOptions& opt) {
    Stamper st;
    Layout lay;
    lay.upstream = opt.include_upstream;

    if (opt.include_upstream) {
        lay.bus1 = phase_nodes(st, "bus1");
        if (!m.source_grounded) lay.source_neutral = st.node("source.n");
    }
    lay.mid = phase_nodes(st, "mid");
    lay.bus2 = phase_nodes(st, "bus2");
    lay.load_neutral = st.node("load.n");

    if (opt.include_upstream) {
        const PhaseTriple emf =
            opt.source_emf ? *opt.source_emf : sequence_to_phase(source_sequence_emf(m.source));
        for (std::size_t p = 0; p < 3; ++p)
            st.source(lay.source_neutral, lay.bus1[p], emf[static_cast<int>(p)],
                      std::string("emf.") + kPhase[p]);
        stamp_segment(st, lay.bus1, lay.mid, m.line_1m, "line_1m", lay.y1m, lay.link_1m);
    }
    stamp_segment(st, lay.mid, lay.bus2, m.line_m2, "line_m2", lay.y_m2, lay.link_m2);

    const Phasor yl = 1.0 / m.load.z_load;
    for (std::size_t p = 0; p < 3; ++p) st.admittance(lay.bus2[p], lay.load_neutral, yl);
    if (m.load.z_ground) {
        if (*m.load.z_ground == Phasor{})
            st.source(kGround, lay.load_neutral, Phasor{}, "load.ground");
        else
            st.admittance(lay.load_neutral, kGround, 1.0 / *m.load.z_ground);
    }

    if (opt.apply_fault && !m.fault.is_open()) {
        const double rf = m.fault.rf;
        if (m.fault.kind == FaultKind::LineGroundA) {
            if (rf == 0.0)
                st.source(kGround, lay.mid[0], Phasor{}, "fault");
            else
                st.admittance(lay.mid[0], kGround, 1.0 / rf);
        } else {
            if (rf == 0.0)
                st.source(lay.mid[2], lay.mid[1], Phasor{}, "fault");
            else
                st.admittance(lay.mid[1], lay.mid[2], 1.0 / rf);
        }
    }

    for (std::size_t p = 0; p < 3; ++p) st.inject(lay.mid[p], opt.injection[static_cast<int>(p)]);
    return {st.finish(), lay};
}

std::vector<Phasor> solve_dense(const NodalSystem& sys, double& residual) {
    const auto n = static_cast<Eigen::Index>(sys.size());
    Eigen::MatrixXcd a(n, n);
    Eigen::VectorXcd b(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        b(r) = sys.rhs[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < n; ++c)
            a(r, c) = sys(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14))
        throw NumericalError(fmt::format("singular nodal matrix (rcond {:.3g})", rcond));
    Eigen::VectorXcd x = lu.solve(b);
    x += lu.solve(b - a * x);
    if (!x.allFinite()) throw NumericalError("nodal solve produced non-finite values");

    const double bn = b.norm();
    const double rn = (a * x - b).norm();
    residual = bn > 0.0 ? rn / bn : rn;
    if (residual > 1e-9)
        throw NumericalError(fmt::format("nodal residual {:.3g} exceeds 1e-9", residual));
    return {x.data(), x.data() + n};
}

PhaseTriple gather(const std::vector<Phasor>& x, const Triplet3& nodes) {
    PhaseTriple t;
    for (int p = 0; p < 3; ++p) {
        const int k = nodes[static_cast<std::size_t>(p)];
        t[p] = k == kGround ? Phasor{} : x[static_cast<std::size_t>(k)];
    }
    return t;
}

PhaseTriple segment_current(const std::vector<Phasor>& x, const NodalSystem& sys,
                            const Triplet3& from, const Triplet3& to,
                            const PhaseImpedanceMatrix& y,
                            const std::optional<std::array<std::size_t, 3>>& link) {
    if (link) {
        PhaseTriple t;
        for (std::size_t p = 0; p < 3; ++p)
            t[static_cast<int>(p)] = x[sys.node_count + (*link)[p]];
        return t;
    }
    return y * (gather(x, from) - gather(x, to));
}

} // namespace

PhaseTriple PhaseImpedanceMatrix::operator*(const PhaseTriple& x) const {
    PhaseTriple r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i] += (*this)(i, j) * x[j];
    return r;
}

PhaseImpedanceMatrix sequence_to_phase_matrix(const SequenceImpedancePair& z) {
    PhaseImpedanceMatrix r;
    const Phasor d = (z.z0 + 2.0 * z.z1) / 3.0;
    const Phasor o = (z.z0 - z.z1) / 3.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = i == j ? d : o;
    return r;
}

SequenceImpedancePair phase_matrix_to_sequence(const PhaseImpedanceMatrix& z) {
    PhaseImpedanceMatrix a = fortescue();
    PhaseImpedanceMatrix a_inv = a;
    for (auto& e : a_inv.m) e = std::conj(e) / 3.0;
    const PhaseImpedanceMatrix s = multiply(a_inv, multiply(z, a));
    return {s(1, 1), s(0, 0)};
}

PhaseImpedanceMatrix invert(const PhaseImpedanceMatrix& z) {
    Eigen::Matrix3cd m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = z(i, j);
    Eigen::PartialPivLU<Eigen::Matrix3cd> lu(m);
    if (!(lu.rcond() > 1e-14)) throw NumericalError("singular 3x3 phase matrix");
    const Eigen::Matrix3cd inv = lu.inverse();
    PhaseImpedanceMatrix r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = inv(i, j);
    return r;
}

std::size_t NodalSystem::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < unknowns.size(); ++i)
        if (unknowns[i] == name) return i;
    return size();
}

NodalSystem build_nodal_system(const MicrogridModel& m, const NetworkOptions& opt) {
    m.validate();
    return assemble(m, opt).first;
}

NetworkSolution solve_phase_domain(const MicrogridModel& m, const NetworkOptions& opt) {
    m.validate();
    const auto [sys, lay] = assemble(m, opt);
    NetworkSolution s;
    const std::vector<Phasor> x = solve_dense(sys, s.residual);

    s.v_mid = gather(x, lay.mid);
    s.v_load_bus = gather(x, lay.bus2);
    s.v_load_neutral = x[static_cast<std::size_t>(lay.load_neutral)];
    if (lay.upstream) {
        s.v_source_bus = gather(x, lay.bus1);
        if (lay.source_neutral != kGround)
            s.v_source_neutral = x[static_cast<std::size_t>(lay.source_neutral)];
        s.i_line_1m = segment_current(x, sys, lay.bus1, lay.mid, lay.y1m, lay.link_1m);
    }
    s.i_line_m2 = segment_current(x, sys, lay.mid, lay.bus2, lay.y_m2, lay.link_m2);
    s.i_fault = s.i_line_1m - s.i_line_m2 + opt.injection;
    return s;
}

TheveninExtraction extract_thevenin(const MicrogridModel& m) {
    // Positive and negative sequence carry no neutral current, so they are
    // extracted on a solidly grounded copy; this keeps floating networks solvable.
    MicrogridModel grounded = m;
    grounded.source_grounded = true;
    grounded.load.z_ground = Phasor{};

    auto driving_point = [](const MicrogridModel& net, const SequenceTriple& unit,
                            bool upstream) {
        NetworkOptions o;
        o.apply_fault = false;
        o.include_upstream = upstream;
        o.source_emf = PhaseTriple{};
        o.injection = sequence_to_phase(unit);
        return phase_to_sequence(solve_phase_domain(net, o).v_mid);
    };
    const SequenceTriple zero_unit{1.0, 0.0, 0.0};
    const SequenceTriple pos_unit{0.0, 1.0, 0.0};
    const SequenceTriple neg_unit{0.0, 0.0, 1.0};

    NetworkOptions open;
    open.apply_fault = false;

    TheveninExtraction t;
    const SequenceTriple v_pos = phase_to_sequence(solve_phase_domain(grounded, open).v_mid);
    t.v_eq = {Phasor{}, v_pos.pos, v_pos.neg};
    t.z_eq.pos = driving_point(grounded, pos_unit, true).pos;
    t.z_eq.neg = driving_point(grounded, neg_unit, true).neg;
    t.z_d1 = driving_point(grounded, pos_unit, false).pos;

    if (m.zero_sequence_closed()) {
        t.v_eq.zero = phase_to_sequence(solve_phase_domain(m, open).v_mid).zero;
        t.z_eq.zero = driving_point(m, zero_unit, true).zero;
    } else {
        t.z_eq.zero = Phasor{std::numeric_limits<double>::infinity(), 0.0};
    }
    if (m.load.z_ground) t.z_d0 = driving_point(m, zero_unit, false).zero;
    return t;
}

FaultSolution solve_network(const MicrogridModel& m, RelayLocation location) {
    const NetworkSolution n = solve_phase_domain(m);

    FaultSolution s;
    s.kind = m.fault.kind;
    s.location = location;
    s.residual = n.residual;
    s.relay_v = n.v_mid;
    s.relay_i = location == RelayLocation::UpstreamOfFault ? n.i_line_1m : n.i_line_m2;
    s.relay_seq_v = phase_to_sequence(s.relay_v);
    s.relay_seq_i = phase_to_sequence(s.relay_i);

    auto& x = s.intermediates;
    x["i_f_a"] = n.i_fault.a;
    x["i_f_b"] = n.i_fault.b;
    x["i_f_c"] = n.i_fault.c;

    const std::optional<TheveninExtraction> th = extract_thevenin(m);
    {
        x["z_eq1"] = th->z_eq.pos;
        x["z_eq2"] = th->z_eq.neg;
        x["z_eq0"] = th->z_eq.zero;
        x["v_eq1"] = th->v_eq.pos;
        x["v_eq2"] = th->v_eq.neg;
        x["v_eq0"] = th->v_eq.zero;
        x["z_d"] = th->z_d1;
        x["z_d1"] = th->z_d1;
        x["z_1d"] = th->z_eq.pos;
        if (th->z_d0) x["z_d0"] = *th->z_d0;
        if (!m.fault.is_open()) {
            const double rf = m.fault.rf;
            if (m.fault.kind == FaultKind::LineGroundA && m.zero_sequence_closed()) {
                const Phasor z2 = th->z_eq.neg + th->z_eq.zero + 3.0 * rf;
                x["z_2"] = z2;
                x["z_20"] = z2;
                x["z_2d"] = parallel(z2, th->z_d1);
                x["z_20d"] = x["z_2d"];
                x["v_2"] = th->v_eq.neg + th->v_eq.zero;
            } else if (m.fault.kind == FaultKind::LineLineBC) {
                const Phasor z2 = th->z_eq.neg + rf;
                x["z_2"] = z2;
                x["z_2d"] = parallel(z2, th->z_d1);
                x["v_2"] = th->v_eq.neg;
            }
        }
    }

    if (m.fault.kind == FaultKind::LineLineBC) {
        const Phasor di = s.relay_i.b - s.relay_i.c;
        if (std::abs(di) < 1e-12 * std::abs(s.relay_seq_i.pos) || di == Phasor{})
            throw NumericalError("line-line measurement: phase current difference is near zero");
        s.z_measured = (s.relay_v.b - s.relay_v.c) / di;
    } else if (location == RelayLocation::DownstreamOfFault && th && th->z_d0) {
        const Phasor k = 1.0 - *th->z_d0 / th->z_d1;
        x["k"] = k;
        s.z_measured = s.relay_v.a / (s.relay_i.a + k * s.relay_seq_i.zero);
    } else {
        s.z_measured = s.relay_v.a / s.relay_i.a;
    }
    return s;
}

} // namespace mgrelay::oracle
