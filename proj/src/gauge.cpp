#include "phaselab/gauge.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace phaselab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Quintic ramp: s(0)=0, s(1)=1, flat at both ends.
double smoothstep(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }
double smoothstep_rate(double x) {
    const double y = x * (1.0 - x);
    return 30.0 * y * y;
}

Matrix diagonal_in_basis(const SpectralDecomposition& basis, const Eigen::VectorXcd& phases) {
    return basis.eigenvectors * phases.asDiagonal() * basis.eigenvectors.adjoint();
}

void require_grid_match(const PropagatorPath& path, const GaugeTransform& gauge) {
    if (gauge.basis.dim() != path.dim())
        throw GridMismatchError("gauge basis dimension does not match path");
    for (const auto& profile : gauge.alpha_profiles)
        if (profile.size() != path.unitaries.size())
            throw GridMismatchError("gauge profiles are not sampled on the path grid");
    for (const auto& rates : gauge.alpha_rates)
        if (rates.size() != static_cast<std::size_t>(path.steps()))
            throw GridMismatchError("gauge rates are not sampled on the path steps");
}

} // namespace

Matrix GaugeTransform::value_at_node(int j) const {
    Eigen::VectorXcd phases(levels());
    for (int k = 0; k < levels(); ++k)
        phases(k) = std::exp(Complex(0.0, -alpha_profiles[k][j]));
    return diagonal_in_basis(basis, phases);
}

GaugeTransform build_diagonal_gauge(const SpectralDecomposition& basis, const TimeGrid& grid,
                                    const std::vector<int>& windings, ProfileShape profile) {
    if (static_cast<int>(windings.size()) != basis.dim())
        throw CountMismatchError(fmt::format("{} windings for {} levels", windings.size(), basis.dim()));
    const double tau = grid.duration();
    if (!(tau > 0.0) || grid.steps() < 1) throw DomainError("gauge grid is empty");

    GaugeTransform out;
    out.basis = basis;
    out.kind = GaugeKind::GlobalU1;
    for (std::size_t k = 0; k < windings.size(); ++k) {
        if (windings[k] != windings[0]) out.kind = GaugeKind::DiagonalNonAbelian;
        const double total = kTwoPi * windings[k];
        std::vector<double> profile_k, rates_k;
        profile_k.reserve(grid.nodes.size());
        rates_k.reserve(grid.steps());
        for (double t : grid.nodes) {
            const double x = t / tau;
            profile_k.push_back(total * (profile == ProfileShape::Linear ? x : smoothstep(x)));
        }
        for (int j = 0; j < grid.steps(); ++j) {
            const double x = 0.5 * (grid.nodes[j] + grid.nodes[j + 1]) / tau;
            rates_k.push_back(total / tau *
                              (profile == ProfileShape::Linear ? 1.0 : smoothstep_rate(x)));
        }
        out.alpha_profiles.push_back(std::move(profile_k));
        out.alpha_rates.push_back(std::move(rates_k));
        out.windings.push_back(static_cast<double>(windings[k]));
    }
    return out;
}

PropagatorPath apply_gauge(const PropagatorPath& path, const GaugeTransform& gauge) {
    require_grid_match(path, gauge);
    const int d = path.dim();

    PropagatorPath out;
    out.grid = path.grid;
    out.unitaries.reserve(path.unitaries.size());
    out.generator_midpoints.reserve(path.steps());

    for (std::size_t j = 0; j < path.unitaries.size(); ++j)
        out.unitaries.push_back(path.unitaries[j] * gauge.value_at_node(static_cast<int>(j)));

    for (int j = 0; j < path.steps(); ++j) {
        Eigen::VectorXcd rates(d);
        for (int k = 0; k < d; ++k) rates(k) = gauge.alpha_rates[k][j];
        const Matrix u_mid = midpoint_unitary(path, j);
        out.generator_midpoints.push_back(
            path.generator_midpoints[j] +
            u_mid * diagonal_in_basis(gauge.basis, rates) * u_mid.adjoint());
    }
    return out;
}

GaugeClassification classify_gauge(const GaugeTransform& gauge, double tol) {
    GaugeClassification out;
    out.max_profile_spread = 0.0;
    const int levels = gauge.levels();
    const std::size_t nodes = levels > 0 ? gauge.alpha_profiles[0].size() : 0;
    for (std::size_t j = 0; j < nodes; ++j)
        for (int k = 0; k < levels; ++k)
            for (int l = k + 1; l < levels; ++l)
                out.max_profile_spread = std::max(
                    out.max_profile_spread,
                    std::abs(gauge.alpha_profiles[k][j] - gauge.alpha_profiles[l][j]));
    out.kind = out.max_profile_spread <= tol ? GaugeKind::GlobalU1 : GaugeKind::DiagonalNonAbelian;
    out.uniform_windings = true;
    for (double nu : gauge.windings)
        if (std::abs(nu - gauge.windings[0]) > 1e-10) out.uniform_windings = false;
    return out;
}

GaugeShiftReport gauge_shift_report(const PropagatorPath& path, const DensityOperator& rho0,
                                    const GaugeTransform& gauge) {
    if (gauge.basis.dim() != rho0.dim())
        throw DimensionMismatchError("gauge basis and density operator dimensions differ");

    const PhaseReport before = geometric_phase(path, rho0);
    const PropagatorPath gauged = apply_gauge(path, gauge);
    const PhaseReport after = geometric_phase(gauged, rho0);
    const GlobalCyclicityReport global_after = check_global_cyclic(gauged, rho0);

    GaugeShiftReport rep;
    rep.phi_geo_before = before.phi_geo;
    rep.phi_geo_after = after.phi_geo;
    rep.observed_shift = after.phi_geo - before.phi_geo;
    rep.observed_shift_mod = rep.observed_shift - kTwoPi * std::floor(rep.observed_shift / kTwoPi);
    rep.predicted_shift = 0.0;
    for (int k = 0; k < rho0.dim(); ++k)
        rep.predicted_shift += kTwoPi * rho0.spectrum.eigenvalues(k) * gauge.windings[k];
    rep.congruence_residual = circle_distance(rep.observed_shift, rep.predicted_shift);
    rep.endpoint_global_after = global_after.endpoint_global;
    rep.unwound_global_after = global_after.unwound_global;
    return rep;
}

PtDefect pt_defect(const PropagatorPath& path, const DensityOperator& rho0) {
    if (path.dim() != rho0.dim())
        throw DimensionMismatchError("path and density operator dimensions differ");
    const int d = rho0.dim();
    PtDefect out;
    out.level_rates.assign(d, {});
    out.level_integrals.assign(d, 0.0);
    out.trace_rates.reserve(path.steps());
    out.max_integral = 0.0;

    for (int j = 0; j < path.steps(); ++j) {
        const double dt = path.grid.nodes[j + 1] - path.grid.nodes[j];
        const Matrix hop = path.unitaries[j].adjoint() * path.unitaries[j + 1];
        for (int k = 0; k < d; ++k) {
            const CVector psi = rho0.spectrum.level(k);
            const Complex overlap = (psi.adjoint() * hop * psi).value();
            out.level_rates[k].push_back(overlap.imag() / dt);
            out.level_integrals[k] += overlap.imag();
        }
        out.trace_rates.push_back(((rho0.matrix * hop).trace() - rho0.matrix.trace()) / dt);
    }
    for (double integral : out.level_integrals)
        out.max_integral = std::max(out.max_integral, std::abs(integral));
    return out;
}

PropagatorPath parallel_transport_lift(const PropagatorPath& path, const DensityOperator& rho0) {
    if (path.dim() != rho0.dim())
        throw DimensionMismatchError("path and density operator dimensions differ");
    if (rho0.spectrum.degenerate)
        throw DegenerateSpectrumError(
            "rho(0) spectrum is degenerate; the per-level transport condition is basis-dependent");

    const int d = rho0.dim();
    const int n = path.steps();

    // Per-step phase of each level overlap, then the cancelling rephasing.
    std::vector<double> theta(d, 0.0);
    std::vector<std::vector<double>> theta_nodes(d, std::vector<double>{0.0});
    std::vector<std::vector<double>> rates(d);
    for (int j = 0; j < n; ++j) {
        const double dt = path.grid.nodes[j + 1] - path.grid.nodes[j];
        const Matrix hop = path.unitaries[j].adjoint() * path.unitaries[j + 1];
        for (int k = 0; k < d; ++k) {
            const CVector psi = rho0.spectrum.level(k);
            const Complex overlap = (psi.adjoint() * hop * psi).value();
            if (std::abs(overlap) <= kUnwindMinMag)
                throw NearZeroCrossingError(
                    fmt::format("level {} overlap vanishes across step {}; lift ill-defined", k, j));
            const double increment = -std::arg(overlap);
            theta[k] += increment;
            theta_nodes[k].push_back(theta[k]);
            rates[k].push_back(increment / dt);
        }
    }

    PropagatorPath out;
    out.grid = path.grid;
    out.unitaries.reserve(path.unitaries.size());
    out.generator_midpoints.reserve(n);
    for (std::size_t j = 0; j < path.unitaries.size(); ++j) {
        Eigen::VectorXcd phases(d);
        for (int k = 0; k < d; ++k) phases(k) = std::exp(Complex(0.0, theta_nodes[k][j]));
        out.unitaries.push_back(path.unitaries[j] * diagonal_in_basis(rho0.spectrum, phases));
    }
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXcd rate(d);
        for (int k = 0; k < d; ++k) rate(k) = rates[k][j];
        const Matrix u_mid = midpoint_unitary(path, j);
        out.generator_midpoints.push_back(
            path.generator_midpoints[j] -
            u_mid * diagonal_in_basis(rho0.spectrum, rate) * u_mid.adjoint());
    }
    return out;
}

} // namespace phaselab
