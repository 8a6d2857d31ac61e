#pragma once

#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "phaselab/linalg.hpp"

namespace phaselab {

/// Piece of the drive with a fixed Hamiltonian.
struct ConstantSegment {
    double duration;
    Matrix hamiltonian;
};

/// Piece of the drive with a time-dependent Hamiltonian, given as a table of
/// Hermitian matrices keyed by absolute midpoint time. The table must cover
/// every step midpoint of the grid the segment is propagated on.
struct SampledSegment {
    double duration;
    std::vector<std::pair<double, Matrix>> samples;  // sorted by time
};

using Segment = std::variant<ConstantSegment, SampledSegment>;

/// Instantaneous unitary kick, applied at a grid node.
struct Pulse {
    double time;
    Matrix unitary;
};

struct HamiltonianSpec {
    int dim = 0;
    std::vector<Segment> segments;
    std::vector<Pulse> pulses;

    double total_duration() const;
};

struct TimeGrid {
    std::vector<double> nodes;  // strictly increasing, t_0 = 0, t_N = tau

    int steps() const { return static_cast<int>(nodes.size()) - 1; }
    double duration() const { return nodes.empty() ? 0.0 : nodes.back(); }
};

/// Discretized time-ordered propagator: one unitary per node, one Hermitian
/// generator per step (the midpoint Hamiltonian the step was built from).
struct PropagatorPath {
    TimeGrid grid;
    std::vector<Matrix> unitaries;            // size steps()+1, U_0 = I
    std::vector<Matrix> generator_midpoints;  // size steps()

    int dim() const { return unitaries.empty() ? 0 : static_cast<int>(unitaries.front().rows()); }
    int steps() const { return grid.steps(); }
    const Matrix& endpoint() const { return unitaries.back(); }
};

struct CyclicityReport {
    double state_residual;       // ||U_N rho0 U_N^dag - rho0||_F
    double commutator_residual;  // ||[U_N, rho0]||_F
    bool cyclic;
};

struct GlobalCyclicityReport {
    double endpoint_distance;  // Frobenius distance of U_N from a scalar unitary
    bool endpoint_global;
    std::vector<double> unwound_level_phases;  // accumulated arg<psi_k|U(t)|psi_k> at tau
    bool unwound_global;  // all unwound level phases agree within tol
};

/// Subdivides every segment uniformly with at least ceil(duration *
/// steps_per_unit_time) steps (minimum 8), then inserts pulse times as nodes.
TimeGrid build_grid(const HamiltonianSpec& spec, int steps_per_unit_time);

/// Ordered product of midpoint exponentials; pulses enter as zero-duration
/// factors at their node (U_j includes a pulse at t_j; a pulse at t=0 is
/// folded into the first step so U_0 stays the identity).
PropagatorPath propagate(const HamiltonianSpec& spec, const TimeGrid& grid);

CyclicityReport check_cyclic(const PropagatorPath& path, const DensityOperator& rho0,
                             double tol = 1e-8);

/// Requires check_cyclic to pass at `tol`, else throws NotCyclicError.
GlobalCyclicityReport check_global_cyclic(const PropagatorPath& path, const DensityOperator& rho0,
                                          double tol = 1e-8);

HamiltonianSpec insert_pulse(const HamiltonianSpec& spec, double time, const Matrix& pulse);

/// Fills every SampledSegment table with h(t) evaluated at the grid's step
/// midpoints. Convenience for building sampled specs against a known grid.
void fill_samples(HamiltonianSpec& spec, const TimeGrid& grid,
                  const std::function<Matrix(double)>& h);

/// Propagator at the step midpoint: exp(-i H_mid dt/2) U_j.
Matrix midpoint_unitary(const PropagatorPath& path, int step);

} // namespace phaselab
