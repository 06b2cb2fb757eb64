#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mgrelay/faultsolve.hpp"
#include "mgrelay/netmodel.hpp"
#include "mgrelay/phasors.hpp"

namespace mgrelay::oracle {

/// 3×3 phase-domain impedance (or admittance) matrix, row-major.
struct PhaseImpedanceMatrix {
    std::array<Phasor, 9> m{};

    Phasor& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }
    Phasor operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
    PhaseTriple operator*(const PhaseTriple& x) const;
};

/// Diagonal (z0 + 2 z1)/3, off-diagonal (z0 − z1)/3.
PhaseImpedanceMatrix sequence_to_phase_matrix(const SequenceImpedancePair& z);
/// Inverse of sequence_to_phase_matrix: diagonalises with the Fortescue matrix.
SequenceImpedancePair phase_matrix_to_sequence(const PhaseImpedanceMatrix& z);
PhaseImpedanceMatrix invert(const PhaseImpedanceMatrix& z);

/// Which parts of the network to assemble and how to drive it.
struct NetworkOptions {
    bool apply_fault = true;
    /// false keeps only segment M2 and the load (downstream subnetwork).
    bool include_upstream = true;
    /// Phase EMF behind the source; defaults to the model's sequence EMF.
    std::optional<PhaseTriple> source_emf;
    /// Current injected into the midpoint nodes from ground.
    PhaseTriple injection{};
};

/// Modified nodal system. Unknowns are node voltages followed by the currents
/// of zero-impedance branches (ideal EMFs, bolted connections).
struct NodalSystem {
    std::vector<std::string> unknowns;
    std::vector<Phasor> matrix; // row-major, n × n
    std::vector<Phasor> rhs;
    std::size_t node_count = 0;

    std::size_t size() const { return rhs.size(); }
    Phasor operator()(std::size_t r, std::size_t c) const { return matrix[r * size() + c]; }
    /// Index of a named unknown, or size() when absent.
    std::size_t index_of(const std::string& name) const;
};

NodalSystem build_nodal_system(const MicrogridModel& m, const NetworkOptions& opt = {});

/// Node voltages and branch currents of one phase-domain solve.
struct NetworkSolution {
    PhaseTriple v_source_bus{};
    PhaseTriple v_mid{};
    PhaseTriple v_load_bus{};
    Phasor v_load_neutral{};
    Phasor v_source_neutral{};
    /// Source bus → M.
    PhaseTriple i_line_1m{};
    /// M → load bus.
    PhaseTriple i_line_m2{};
    /// Out of M into the fault branch (i_line_1m − i_line_m2 + injection).
    PhaseTriple i_fault{};
    double residual = 0.0;
};

/// Dense LU with partial pivoting. Throws NumericalError on a singular system
/// or a relative residual above 1e-9.
NetworkSolution solve_phase_domain(const MicrogridModel& m, const NetworkOptions& opt = {});

/// Sequence quantities at the fault point recovered by phase-domain injection.
struct TheveninExtraction {
    SequenceTriple v_eq{};
    SequenceTriple z_eq{};
    Phasor z_d1{};
    std::optional<Phasor> z_d0;
};

TheveninExtraction extract_thevenin(const MicrogridModel& m);

/// Full three-phase solve of the faulted network, reported like faultsolve.
/// Intermediates carry the fault-branch currents i_f_a/b/c and the extracted
/// Thevenin and composite impedances under the analytic key names.
FaultSolution solve_network(const MicrogridModel& m, RelayLocation location);

} // namespace mgrelay::oracle
