#include "phaselab/phases.hpp"

#include <cmath>

#include <fmt/format.h>

namespace phaselab {

namespace {

void require_dims(const PropagatorPath& path, const DensityOperator& rho0) {
    if (path.dim() != rho0.dim())
        throw DimensionMismatchError("path and density operator dimensions differ");
}

// Midpoint energy expectation of the step, with rho0 replaced by `weight_op`.
double step_energy(const PropagatorPath& path, const Matrix& weight_op, int step) {
    const Matrix u_mid = midpoint_unitary(path, step);
    return (u_mid * weight_op * u_mid.adjoint() * path.generator_midpoints[step])
        .trace()
        .real();
}

} // namespace

TotalPhaseResult total_phase(const PropagatorPath& path, const DensityOperator& rho0,
                             double min_mag) {
    require_dims(path, rho0);
    TotalPhaseResult out;
    out.trace.reserve(path.unitaries.size());
    for (const Matrix& u : path.unitaries)
        out.trace.push_back((rho0.matrix * u).trace());
    out.phi_running = unwind_phase(out.trace, min_mag);
    out.phi = out.phi_running.back();
    return out;
}

DynamicalPhaseResult dynamical_phase(const PropagatorPath& path, const DensityOperator& rho0) {
    require_dims(path, rho0);
    if (path.generator_midpoints.size() != static_cast<std::size_t>(path.steps()))
        throw MissingGeneratorsError("path carries no generator midpoints");

    DynamicalPhaseResult out;
    out.running.reserve(path.unitaries.size());
    out.running.push_back(0.0);
    double acc = 0.0;
    for (int j = 0; j < path.steps(); ++j) {
        const double dt = path.grid.nodes[j + 1] - path.grid.nodes[j];
        acc -= step_energy(path, rho0.matrix, j) * dt;
        out.running.push_back(acc);
    }
    out.phi_d = acc;
    return out;
}

OneFormResult one_form(const PropagatorPath& path, const DensityOperator& rho0, double min_mag) {
    const TotalPhaseResult tp = total_phase(path, rho0, min_mag);
    OneFormResult out;
    out.betas.reserve(path.steps());
    out.max_imag_residue = 0.0;
    for (int j = 0; j < path.steps(); ++j) {
        const Matrix& u0 = path.unitaries[j];
        const Matrix& u1 = path.unitaries[j + 1];
        const Matrix um = midpoint_unitary(path, j);
        const Complex full = (rho0.matrix * u0.adjoint() * u1).trace();
        const Complex halves = (rho0.matrix * u0.adjoint() * um).trace() +
                               (rho0.matrix * um.adjoint() * u1).trace();
        // Richardson pairing of the full step with its two half steps kills
        // the O(dt^3) branch error of the raw finite difference.
        const double kinetic = (4.0 * halves.imag() - full.imag()) / 3.0;
        const double dphi = tp.phi_running[j + 1] - tp.phi_running[j];
        out.betas.push_back(dphi - kinetic);
        // Real part of Tr[rho0 U^dag dU] should vanish for unitary steps.
        const double residue = std::abs(full.real() - 1.0);
        out.max_imag_residue = std::max(out.max_imag_residue, residue);
    }
    return out;
}

double integrate_one_form(std::span<const double> betas) {
    double sum = 0.0;
    for (double b : betas) sum += b;
    return sum;
}

PhaseReport geometric_phase(const PropagatorPath& path, const DensityOperator& rho0,
                            double tol_cyclic, bool allow_noncyclic, double min_mag) {
    const CyclicityReport cyc = check_cyclic(path, rho0, tol_cyclic);
    if (!cyc.cyclic && !allow_noncyclic)
        throw NotCyclicError(fmt::format(
            "evolution not cyclic within {:.1e}: state residual {:.3e}, commutator residual {:.3e}",
            tol_cyclic, cyc.state_residual, cyc.commutator_residual));

    const TotalPhaseResult tp = total_phase(path, rho0, min_mag);
    const DynamicalPhaseResult dp = dynamical_phase(path, rho0);
    const OneFormResult of = one_form(path, rho0, min_mag);

    PhaseReport rep;
    rep.phi_total = tp.phi;
    rep.phi_total_principal = principal_angle(tp.phi);
    rep.phi_dyn = dp.phi_d;
    rep.phi_geo = tp.phi - dp.phi_d;
    rep.phi_geo_oneform = integrate_one_form(of.betas);
    rep.route_discrepancy = std::abs(rep.phi_geo_oneform - rep.phi_geo);
    rep.oneform_imag_residue = of.max_imag_residue;
    rep.cyclicity = cyc;
    rep.t = path.grid.nodes;
    rep.trace = tp.trace;
    rep.phi_running = tp.phi_running;
    rep.phi_dyn_running = dp.running;
    rep.beta_cumulative.reserve(path.unitaries.size());
    rep.beta_cumulative.push_back(0.0);
    double acc = 0.0;
    for (double b : of.betas) rep.beta_cumulative.push_back(acc += b);
    return rep;
}

PerLevelPhases per_level_phases(const PropagatorPath& path, const DensityOperator& rho0,
                                BranchMode mode, double min_mag) {
    require_dims(path, rho0);
    const int d = rho0.dim();
    PerLevelPhases out;
    out.branch_mode = mode;
    out.degenerate_warning = rho0.spectrum.degenerate;

    bool endpoint_global = false;
    try {
        endpoint_global = check_global_cyclic(path, rho0).endpoint_global;
    } catch (const Error&) {
        // not cyclic or unwinding failed; the anchored reading is suspect either way
    }
    out.endpoint_global_warning = !endpoint_global;

    double anchored_total = 0.0;
    if (mode == BranchMode::Anchored)
        anchored_total = total_phase(path, rho0, min_mag).phi;

    const std::size_t nodes = path.unitaries.size();
    std::vector<Complex> overlaps(nodes);
    for (int k = 0; k < d; ++k) {
        const CVector psi = rho0.spectrum.level(k);
        out.weights.push_back(rho0.spectrum.eigenvalues(k));

        double level_total;
        if (mode == BranchMode::Anchored) {
            level_total = anchored_total;
        } else {
            for (std::size_t j = 0; j < nodes; ++j)
                overlaps[j] = (psi.adjoint() * path.unitaries[j] * psi).value();
            level_total = unwind_phase(overlaps, min_mag).back();
        }

        const Matrix projector = psi * psi.adjoint();
        double level_dyn = 0.0;
        for (int j = 0; j < path.steps(); ++j) {
            const double dt = path.grid.nodes[j + 1] - path.grid.nodes[j];
            level_dyn -= step_energy(path, projector, j) * dt;
        }

        out.level_total.push_back(level_total);
        out.level_dyn.push_back(level_dyn);
        out.level_geo.push_back(level_total - level_dyn);
    }

    out.weighted_geo = 0.0;
    out.weighted_dyn = 0.0;
    for (int k = 0; k < d; ++k) {
        out.weighted_geo += out.weights[k] * out.level_geo[k];
        out.weighted_dyn += out.weights[k] * out.level_dyn[k];
    }
    return out;
}

} // namespace phaselab
