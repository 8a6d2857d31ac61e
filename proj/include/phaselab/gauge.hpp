#pragma once

#include <vector>

#include "phaselab/evolution.hpp"
#include "phaselab/linalg.hpp"
#include "phaselab/phases.hpp"

namespace phaselab {

enum class GaugeKind { GlobalU1, DiagonalNonAbelian };
enum class ProfileShape { Linear, Smooth };

/// Per-eigenlevel phase twist V(t) = sum_k e^{-i alpha_k(t)} |psi_k><psi_k|,
/// sampled on a path grid with alpha_k(0) = 0.
struct GaugeTransform {
    SpectralDecomposition basis;                      // rho(0) eigenbasis
    std::vector<std::vector<double>> alpha_profiles;  // [level][node]
    std::vector<std::vector<double>> alpha_rates;     // [level][step], exact derivative at midpoints
    std::vector<double> windings;                     // nu_k = alpha_k(tau) / 2pi
    GaugeKind kind;

    int levels() const { return static_cast<int>(alpha_profiles.size()); }
    Matrix value_at_node(int j) const;  // V(t_j)
};

struct GaugeClassification {
    GaugeKind kind;
    bool uniform_windings;      // n_k constant across k
    double max_profile_spread;  // max over nodes and level pairs of |alpha_k - alpha_l|
};

struct GaugeShiftReport {
    double phi_geo_before;
    double phi_geo_after;
    double observed_shift;      // unwound difference, windings included
    double observed_shift_mod;  // representative in [0, 2pi)
    double predicted_shift;     // 2pi sum_k w_k n_k
    double congruence_residual; // circle distance between observed and predicted
    bool endpoint_global_after;
    bool unwound_global_after;
};

/// Per-level defect against the parallel-transport condition.
struct PtDefect {
    std::vector<std::vector<double>> level_rates;  // [level][step] eta_k
    std::vector<double> level_integrals;           // integral of eta_k dt
    std::vector<Complex> trace_rates;              // Tr[rho0 U^dag dU/dt] per step
    double max_integral;
};

GaugeTransform build_diagonal_gauge(const SpectralDecomposition& basis, const TimeGrid& grid,
                                    const std::vector<int>& windings, ProfileShape profile);

/// U'(t) = U(t) V(t). Generator midpoints are rebuilt so the dynamical-phase
/// energy form stays consistent: H' = H + U (sum_k alpha_dot_k P_k) U^dag.
PropagatorPath apply_gauge(const PropagatorPath& path, const GaugeTransform& gauge);

GaugeClassification classify_gauge(const GaugeTransform& gauge, double tol = 1e-9);

GaugeShiftReport gauge_shift_report(const PropagatorPath& path, const DensityOperator& rho0,
                                    const GaugeTransform& gauge);

PtDefect pt_defect(const PropagatorPath& path, const DensityOperator& rho0);

/// Diagonal rephasing that cancels the per-level defect: U_j D_j with
/// D = sum_k e^{i theta_k} P_k and each step increment of theta_k chosen as
/// -arg<psi_k|U_j^dag U_{j+1}|psi_k>, so the lifted overlaps are real-positive
/// stepwise. Refuses degenerate rho0 spectra.
PropagatorPath parallel_transport_lift(const PropagatorPath& path, const DensityOperator& rho0);

} // namespace phaselab
