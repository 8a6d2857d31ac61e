#include "phaselab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

namespace phaselab {

namespace {

double segment_duration(const Segment& seg) {
    return std::visit([](const auto& s) { return s.duration; }, seg);
}

struct SegmentIndex {
    std::vector<double> boundaries;  // size segments+1, starts at 0

    int owner(double t) const {
        auto it = std::upper_bound(boundaries.begin() + 1, boundaries.end() - 1, t);
        return static_cast<int>(it - boundaries.begin()) - 1;
    }
};

SegmentIndex index_segments(const HamiltonianSpec& spec) {
    SegmentIndex idx;
    idx.boundaries.push_back(0.0);
    for (const Segment& seg : spec.segments)
        idx.boundaries.push_back(idx.boundaries.back() + segment_duration(seg));
    return idx;
}

const Matrix* lookup_sample(const SampledSegment& seg, double t, double tol) {
    auto it = std::lower_bound(seg.samples.begin(), seg.samples.end(), t,
                               [](const auto& entry, double time) { return entry.first < time; });
    for (auto cand : {it, it == seg.samples.begin() ? it : std::prev(it)})
        if (cand != seg.samples.end() && std::abs(cand->first - t) <= tol) return &cand->second;
    return nullptr;
}

void validate_spec(const HamiltonianSpec& spec) {
    if (spec.segments.empty()) throw EmptySpecError("hamiltonian spec has no segments");
    if (spec.dim < 1 || spec.dim > 32)
        throw DomainError(fmt::format("dimension {} outside supported range [1,32]", spec.dim));
    for (const Segment& seg : spec.segments)
        if (!(segment_duration(seg) > 0.0))
            throw DomainError("segment duration must be positive");
    const double tau = spec.total_duration();
    for (const Pulse& p : spec.pulses) {
        if (p.time < 0.0 || p.time > tau)
            throw OutOfRangeError(fmt::format("pulse time {:.6g} outside [0, {:.6g}]", p.time, tau));
        if (p.unitary.rows() != spec.dim || !is_unitary(p.unitary, 1e-10))
            throw NonUnitaryPulseError("pulse matrix is not unitary within 1e-10");
    }
}

} // namespace

double HamiltonianSpec::total_duration() const {
    double tau = 0.0;
    for (const Segment& seg : segments) tau += segment_duration(seg);
    return tau;
}

TimeGrid build_grid(const HamiltonianSpec& spec, int steps_per_unit_time) {
    validate_spec(spec);
    if (steps_per_unit_time < 1) throw DomainError("steps_per_unit_time must be positive");

    TimeGrid grid;
    grid.nodes.push_back(0.0);
    double start = 0.0;
    for (const Segment& seg : spec.segments) {
        const double dur = segment_duration(seg);
        const int n = std::max(8, static_cast<int>(std::ceil(dur * steps_per_unit_time)));
        for (int k = 1; k <= n; ++k) grid.nodes.push_back(start + dur * k / n);
        start += dur;
    }
    const double tau = start;
    const double tol = 1e-12 * std::max(1.0, tau);
    for (const Pulse& p : spec.pulses) {
        auto it = std::lower_bound(grid.nodes.begin(), grid.nodes.end(), p.time);
        const bool hit = (it != grid.nodes.end() && std::abs(*it - p.time) <= tol) ||
                         (it != grid.nodes.begin() && std::abs(*std::prev(it) - p.time) <= tol);
        if (!hit) grid.nodes.insert(it, p.time);
    }
    return grid;
}

PropagatorPath propagate(const HamiltonianSpec& spec, const TimeGrid& grid) {
    validate_spec(spec);
    if (grid.steps() < 1) throw DomainError("grid has no steps");
    const double tau = spec.total_duration();
    const double node_tol = 1e-9 * std::max(1.0, tau);
    const SegmentIndex idx = index_segments(spec);

    // Pulses keyed by the node they fire at.
    std::map<int, std::vector<const Matrix*>> pulses_at;
    for (const Pulse& p : spec.pulses) {
        auto it = std::lower_bound(grid.nodes.begin(), grid.nodes.end(), p.time - node_tol);
        if (it == grid.nodes.end() || std::abs(*it - p.time) > node_tol)
            throw GridMismatchError(fmt::format("pulse time {:.6g} is not a grid node", p.time));
        pulses_at[static_cast<int>(it - grid.nodes.begin())].push_back(&p.unitary);
    }

    const int n = grid.steps();
    const int d = spec.dim;
    PropagatorPath path;
    path.grid = grid;
    path.unitaries.reserve(n + 1);
    path.generator_midpoints.reserve(n);

    Matrix running = Matrix::Identity(d, d);
    path.unitaries.push_back(running);
    if (auto it = pulses_at.find(0); it != pulses_at.end())
        for (const Matrix* p : it->second) running = *p * running;

    // Cache the step factor: constant segments reuse the exact exponential.
    Matrix cached_factor;
    const Matrix* cached_h = nullptr;
    double cached_dt = 0.0;

    for (int j = 0; j < n; ++j) {
        const double dt = grid.nodes[j + 1] - grid.nodes[j];
        const double mid = 0.5 * (grid.nodes[j] + grid.nodes[j + 1]);
        const Segment& seg = spec.segments[idx.owner(mid)];

        const Matrix* h_mid = nullptr;
        if (const auto* cs = std::get_if<ConstantSegment>(&seg)) {
            h_mid = &cs->hamiltonian;
        } else {
            const auto& ss = std::get<SampledSegment>(seg);
            h_mid = lookup_sample(ss, mid, node_tol);
            if (!h_mid)
                throw MissingSampleError(fmt::format("no Hamiltonian sample at midpoint t={:.9g}", mid));
        }
        if (h_mid->rows() != d)
            throw DimensionMismatchError("Hamiltonian sample dimension does not match spec");

        if (cached_h != h_mid || cached_dt != dt) {
            cached_factor = exp_hermitian_generator(*h_mid, dt);
            cached_h = h_mid;
            cached_dt = dt;
        }
        running = cached_factor * running;
        if (auto it = pulses_at.find(j + 1); it != pulses_at.end())
            for (const Matrix* p : it->second) running = *p * running;

        path.generator_midpoints.push_back(*h_mid);
        path.unitaries.push_back(running);
    }
    return path;
}

CyclicityReport check_cyclic(const PropagatorPath& path, const DensityOperator& rho0, double tol) {
    if (path.dim() != rho0.dim())
        throw DimensionMismatchError("path and density operator dimensions differ");
    const Matrix& u = path.endpoint();
    CyclicityReport rep;
    rep.state_residual = (u * rho0.matrix * u.adjoint() - rho0.matrix).norm();
    rep.commutator_residual = (u * rho0.matrix - rho0.matrix * u).norm();
    rep.cyclic = rep.state_residual <= tol && rep.commutator_residual <= tol;
    return rep;
}

GlobalCyclicityReport check_global_cyclic(const PropagatorPath& path, const DensityOperator& rho0,
                                          double tol) {
    const CyclicityReport cyc = check_cyclic(path, rho0, tol);
    if (!cyc.cyclic)
        throw NotCyclicError(fmt::format("evolution not cyclic: state residual {:.3e}, commutator residual {:.3e}",
                                         cyc.state_residual, cyc.commutator_residual));

    const int d = rho0.dim();
    GlobalCyclicityReport rep;
    const ScalarUnitaryDistance sd = scalar_unitary_distance(path.endpoint());
    if (sd.zero_trace) {
        rep.endpoint_distance = sd.dist;
        rep.endpoint_global = false;
    } else {
        // Frobenius distance to the nearest scalar e^{i theta} I, computed
        // directly: the closed form sqrt(2d - 2|Tr U|) loses half the digits
        // to cancellation near zero.
        rep.endpoint_distance =
            (path.endpoint() - std::exp(Complex(0.0, sd.theta)) * Matrix::Identity(d, d)).norm();
        rep.endpoint_global = rep.endpoint_distance <= tol;
    }
    const std::size_t nodes = path.unitaries.size();
    std::vector<Complex> overlaps(nodes);
    for (int k = 0; k < d; ++k) {
        const CVector psi = rho0.spectrum.level(k);
        for (std::size_t j = 0; j < nodes; ++j)
            overlaps[j] = (psi.adjoint() * path.unitaries[j] * psi).value();
        rep.unwound_level_phases.push_back(unwind_phase(overlaps).back());
    }
    double spread = 0.0;
    for (double a : rep.unwound_level_phases)
        for (double b : rep.unwound_level_phases) spread = std::max(spread, std::abs(a - b));
    rep.unwound_global = spread <= tol;
    return rep;
}

HamiltonianSpec insert_pulse(const HamiltonianSpec& spec, double time, const Matrix& pulse) {
    const double tau = spec.total_duration();
    if (!(time >= 0.0 && time <= tau))
        throw OutOfRangeError(fmt::format("pulse time {:.6g} outside [0, {:.6g}]", time, tau));
    if (pulse.rows() != spec.dim || pulse.cols() != spec.dim || !is_unitary(pulse, 1e-10))
        throw NonUnitaryPulseError("pulse matrix is not unitary within 1e-10");

    HamiltonianSpec out = spec;
    out.pulses.push_back({time, pulse});
    std::stable_sort(out.pulses.begin(), out.pulses.end(),
                     [](const Pulse& a, const Pulse& b) { return a.time < b.time; });
    return out;
}

void fill_samples(HamiltonianSpec& spec, const TimeGrid& grid,
                  const std::function<Matrix(double)>& h) {
    const SegmentIndex idx = index_segments(spec);
    for (Segment& seg : spec.segments)
        if (auto* ss = std::get_if<SampledSegment>(&seg)) ss->samples.clear();
    for (int j = 0; j < grid.steps(); ++j) {
        const double mid = 0.5 * (grid.nodes[j] + grid.nodes[j + 1]);
        Segment& seg = spec.segments[idx.owner(mid)];
        if (auto* ss = std::get_if<SampledSegment>(&seg)) ss->samples.emplace_back(mid, h(mid));
    }
}

Matrix midpoint_unitary(const PropagatorPath& path, int step) {
    if (step < 0 || step >= path.steps()) throw OutOfRangeError("step index outside path");
    if (path.generator_midpoints.empty())
        throw MissingGeneratorsError("path carries no generator midpoints");
    const double dt = path.grid.nodes[step + 1] - path.grid.nodes[step];
    return exp_hermitian_generator(path.generator_midpoints[step], 0.5 * dt) * path.unitaries[step];
}

} // namespace phaselab
