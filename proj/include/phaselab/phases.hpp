#pragma once

#include <vector>

#include "phaselab/evolution.hpp"
#include "phaselab/linalg.hpp"

namespace phaselab {

struct TotalPhaseResult {
    double phi;                       // unwound value at tau
    std::vector<Complex> trace;       // c_j = Tr[rho0 U_j]
    std::vector<double> phi_running;  // unwound arg of c, phi(0) = 0
};

struct DynamicalPhaseResult {
    double phi_d;
    std::vector<double> running;  // cumulative, one entry per node
};

struct OneFormResult {
    std::vector<double> betas;  // one per step
    double max_imag_residue;    // largest imaginary leakage of the step expression
};

struct PhaseReport {
    double phi_total;
    double phi_total_principal;
    double phi_dyn;
    double phi_geo;          // phi_total - phi_dyn
    double phi_geo_oneform;  // loop integral of beta
    double route_discrepancy;
    double oneform_imag_residue;
    CyclicityReport cyclicity;
    // Running series, one entry per node.
    std::vector<double> t;
    std::vector<Complex> trace;
    std::vector<double> phi_running;
    std::vector<double> phi_dyn_running;
    std::vector<double> beta_cumulative;
};

enum class BranchMode { Anchored, Independent };

struct PerLevelPhases {
    std::vector<double> weights;      // w_k, descending
    std::vector<double> level_total;  // phi^k
    std::vector<double> level_dyn;    // phi_d^k
    std::vector<double> level_geo;    // phi^k - phi_d^k
    BranchMode branch_mode;
    double weighted_geo;
    double weighted_dyn;
    bool endpoint_global_warning;  // anchored reading assumes a global cyclic evolution
    bool degenerate_warning;       // rho0 spectrum has near-degenerate weights
};

/// Unwound argument of Tr[rho0 U(t)] along the path.
TotalPhaseResult total_phase(const PropagatorPath& path, const DensityOperator& rho0,
                             double min_mag = kUnwindMinMag);

/// Energy-expectation form -sum_j Tr[rho(t_mid) H(t_mid)] dt; pulses
/// contribute nothing (zero-duration steps).
DynamicalPhaseResult dynamical_phase(const PropagatorPath& path, const DensityOperator& rho0);

/// Stepwise one-form beta_j = dphi_j - Im Tr[rho0 U_j^dag U_{j+1}], with the
/// kinetic term Richardson-refined through the step midpoint so the loop
/// integral converges at fourth order.
OneFormResult one_form(const PropagatorPath& path, const DensityOperator& rho0,
                       double min_mag = kUnwindMinMag);

double integrate_one_form(std::span<const double> betas);

PhaseReport geometric_phase(const PropagatorPath& path, const DensityOperator& rho0,
                            double tol_cyclic = 1e-8, bool allow_noncyclic = false,
                            double min_mag = kUnwindMinMag);

/// Weighted per-eigenlevel decomposition. Anchored mode pins every level's
/// total phase to the unwound trace phase; independent mode unwinds each
/// level overlap separately, exposing the relative-winding ambiguity.
PerLevelPhases per_level_phases(const PropagatorPath& path, const DensityOperator& rho0,
                                BranchMode mode, double min_mag = kUnwindMinMag);

} // namespace phaselab
