#include <doctest.h>

#include <random>

#include "test_helpers.hpp"

using namespace phaselab;
using namespace testutil;

namespace {

DensityOperator mixed_reference() { return bloch_state(0.5, 0.0); }  // diag(0.75, 0.25)

PropagatorPath zero_field_path() {
    HamiltonianSpec spec;
    spec.dim = 2;
    spec.segments.push_back(ConstantSegment{1.0, Matrix(Matrix::Zero(2, 2))});
    return propagate(spec, build_grid(spec, 64));
}

} // namespace

TEST_CASE("total_phase on the reference precession unwinds to -pi") {
    const PropagatorPath path = precession_path(1.0, 2.0 * kPi, 4096);
    const TotalPhaseResult tp = total_phase(path, mixed_reference());
    CHECK(tp.phi == doctest::Approx(-kPi).epsilon(1e-10));
    CHECK(principal_angle(tp.phi) == doctest::Approx(kPi).epsilon(1e-10));
    CHECK(tp.phi_running.front() == 0.0);
}

TEST_CASE("total_phase is zero without a drive and fails on a vanishing trace") {
    const TotalPhaseResult tp = total_phase(zero_field_path(), mixed_reference());
    CHECK(tp.phi == 0.0);
    for (double phi : tp.phi_running) CHECK(phi == 0.0);

    // rho0 = I/2 under sigma_z/2: Tr[rho0 U(t)] = cos(t/2) crosses zero at
    // t = pi. The crossing falls between grid nodes, so the branch tracker
    // sees a pi jump rather than a sub-threshold magnitude.
    const DensityOperator maximally_mixed = validate_density(0.5 * identity(2));
    const PropagatorPath path = precession_path(1.0, 2.0 * kPi, 4096);
    CHECK_THROWS_AS(total_phase(path, maximally_mixed), JumpTooLargeError);

    // Landing a node exactly on the zero reports the vanishing magnitude.
    std::vector<Complex> dead{Complex(1, 0), Complex(0, 0)};
    CHECK_THROWS_AS(unwind_phase(dead), NearZeroCrossingError);
}

TEST_CASE("dynamical_phase matches constant-energy oracles") {
    const PropagatorPath path = precession_path(1.0, 2.0 * kPi, 4096);
    // <H> = (1/2)(0.75 - 0.25) = 1/4, phi_d = -tau/4 = -pi/2.
    CHECK(dynamical_phase(path, mixed_reference()).phi_d ==
          doctest::Approx(-kPi / 2.0).epsilon(1e-9));

    CHECK(dynamical_phase(zero_field_path(), mixed_reference()).phi_d == 0.0);

    const DensityOperator up = bloch_state(1.0, 0.0);  // |+z>
    CHECK(dynamical_phase(path, up).phi_d == doctest::Approx(-kPi).epsilon(1e-9));
}

TEST_CASE("geometric_phase reproduces the mixed and pure oracles") {
    const PropagatorPath path = precession_path(1.0, 2.0 * kPi, 4096);
    const PhaseReport mixed = geometric_phase(path, mixed_reference());
    CHECK(mixed.phi_geo == doctest::Approx(-kPi / 2.0).epsilon(1e-9));
    CHECK(mixed.cyclicity.cyclic);

    // Pure state on the theta = pi/3 cone: Aharonov-Anandan phase -pi(1-cos theta).
    const PhaseReport cone = geometric_phase(path, bloch_state(1.0, kPi / 3.0));
    CHECK(circle_distance(cone.phi_geo, -kPi * (1.0 - std::cos(kPi / 3.0))) < 1e-6);

    const PhaseReport idle = geometric_phase(zero_field_path(), mixed_reference());
    CHECK(idle.phi_total == 0.0);
    CHECK(idle.phi_dyn == 0.0);
    CHECK(idle.phi_geo == 0.0);

    const PropagatorPath half = precession_path(1.0, kPi, 1024);
    const DensityOperator tilted = bloch_state(0.5, kPi / 3.0);
    CHECK_THROWS_AS(geometric_phase(half, tilted), NotCyclicError);
    CHECK_NOTHROW(geometric_phase(half, tilted, 1e-8, /*allow_noncyclic=*/true));
}

TEST_CASE("one_form route agrees with phi - phi_d") {
    const PropagatorPath path = precession_path(1.0, 2.0 * kPi, 4096);
    const PhaseReport rep = geometric_phase(path, mixed_reference());
    CHECK(rep.route_discrepancy < 1e-8);
    CHECK(rep.phi_geo_oneform == doctest::Approx(-kPi / 2.0).epsilon(1e-8));

    // Stationary ray: the loop integral vanishes.
    const OneFormResult stationary = one_form(path, bloch_state(1.0, 0.0));
    CHECK(std::abs(integrate_one_form(stationary.betas)) < 1e-9);

    const OneFormResult idle = one_form(zero_field_path(), mixed_reference());
    for (double b : idle.betas) CHECK(b == 0.0);
    CHECK(integrate_one_form(std::vector<double>{}) == 0.0);
}

TEST_CASE("per_level_phases anchored vs independent on the reference case") {
    const PropagatorPath path = precession_path(1.0, 2.0 * kPi, 4096);
    const DensityOperator rho = mixed_reference();

    const PerLevelPhases anchored = per_level_phases(path, rho, BranchMode::Anchored);
    REQUIRE(anchored.weights.size() == 2);
    CHECK(anchored.weights[0] == doctest::Approx(0.75));
    CHECK(anchored.level_total[0] == doctest::Approx(-kPi).epsilon(1e-9));
    CHECK(anchored.level_total[1] == doctest::Approx(-kPi).epsilon(1e-9));
    CHECK(anchored.level_dyn[0] == doctest::Approx(-kPi).epsilon(1e-9));
    CHECK(anchored.level_dyn[1] == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(anchored.level_geo[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(anchored.level_geo[1] == doctest::Approx(-2.0 * kPi).epsilon(1e-9));
    CHECK(anchored.weighted_geo == doctest::Approx(-kPi / 2.0).epsilon(1e-9));
    CHECK_FALSE(anchored.endpoint_global_warning);

    const PerLevelPhases indep = per_level_phases(path, rho, BranchMode::Independent);
    CHECK(indep.level_total[0] == doctest::Approx(-kPi).epsilon(1e-9));
    CHECK(indep.level_total[1] == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(indep.level_geo[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(indep.level_geo[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(indep.weighted_geo == doctest::Approx(0.0).epsilon(1e-9));
    // Branch sensitivity: the two modes differ by 2 pi w_1 (relative winding 1).
    CHECK(anchored.weighted_geo - indep.weighted_geo ==
          doctest::Approx(-2.0 * kPi * 0.25).epsilon(1e-9));
}

TEST_CASE("per_level_phases vanish without a drive") {
    const PerLevelPhases pl =
        per_level_phases(zero_field_path(), mixed_reference(), BranchMode::Anchored);
    for (double x : pl.level_total) CHECK(x == 0.0);
    for (double x : pl.level_geo) CHECK(x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pl.weighted_geo == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("anchored decomposition equals phi_geo whenever the endpoint is global") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 2 + trial % 3;
        const DensityOperator rho = random_density(rng, d);
        const HamiltonianSpec spec = random_loop_spec(rng, d, 3, 2.0);
        const PropagatorPath path = propagate(spec, build_grid(spec, 512));
        try {
            const PhaseReport rep = geometric_phase(path, rho);
            const PerLevelPhases pl = per_level_phases(path, rho, BranchMode::Anchored);
            CHECK(pl.weighted_geo == doctest::Approx(rep.phi_geo).epsilon(1e-9));
        } catch (const NearZeroCrossingError&) {
            // random trace wandered too close to zero; draw is uninformative
        }
    }
}

TEST_CASE("scalar drifts move phi and phi_d but not phi_geo") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> amp(-0.6, 0.6);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 2 + trial % 3;
        const DensityOperator rho = random_density(rng, d);
        HamiltonianSpec spec = random_loop_spec(rng, d, 2, 2.0);
        const TimeGrid grid = build_grid(spec, 1024);
        const PropagatorPath base = propagate(spec, grid);

        const double a = amp(rng), b = amp(rng);
        const double tau = 2.0;
        HamiltonianSpec drifted;
        drifted.dim = d;
        drifted.segments.push_back(SampledSegment{tau, {}});
        const HamiltonianSpec undrifted_copy = spec;
        auto segment_h = [&](double t) {
            double acc = 0.0;
            for (const Segment& seg : undrifted_copy.segments) {
                const auto& cs = std::get<ConstantSegment>(seg);
                if (t < acc + cs.duration || &seg == &undrifted_copy.segments.back())
                    return cs.hamiltonian;
                acc += cs.duration;
            }
            return std::get<ConstantSegment>(undrifted_copy.segments.back()).hamiltonian;
        };
        auto drift = [&](double t) { return a + b * std::sin(2.0 * kPi * t / tau); };
        fill_samples(drifted, grid,
                     [&](double t) { return Matrix(segment_h(t) + drift(t) * identity(d)); });
        const PropagatorPath shifted = propagate(drifted, grid);

        // Midpoint quadrature of the drift is the exact alpha the product picks up.
        double alpha_tau = 0.0;
        for (int j = 0; j < grid.steps(); ++j)
            alpha_tau += drift(0.5 * (grid.nodes[j] + grid.nodes[j + 1])) *
                         (grid.nodes[j + 1] - grid.nodes[j]);

        try {
            const PhaseReport before = geometric_phase(base, rho, 1e-8, true);
            const PhaseReport after = geometric_phase(shifted, rho, 1e-8, true);
            CHECK(after.phi_total - before.phi_total == doctest::Approx(-alpha_tau).epsilon(1e-8));
            CHECK(after.phi_dyn - before.phi_dyn == doctest::Approx(-alpha_tau).epsilon(1e-8));
            CHECK(std::abs(after.phi_geo - before.phi_geo) < 1e-8);
        } catch (const NearZeroCrossingError&) {
        }
    }
}

TEST_CASE("phases are reparametrization invariant") {
    auto h_of_s = [](double s) {
        return Matrix(0.35 * std::cos(s) * sigma_z() + 0.25 * std::sin(s) * sigma_x() +
                      0.35 * sigma_z());
    };
    const double tau = 2.0 * kPi;
    const DensityOperator rho = mixed_reference();

    auto phases_for = [&](auto time_map, auto rate, double t_end, int steps) {
        HamiltonianSpec spec;
        spec.dim = 2;
        spec.segments.push_back(SampledSegment{t_end, {}});
        TimeGrid grid;
        for (int j = 0; j <= steps; ++j) grid.nodes.push_back(t_end * j / steps);
        fill_samples(spec, grid,
                     [&](double t) { return Matrix(rate(t) * h_of_s(time_map(t))); });
        return geometric_phase(propagate(spec, grid), rho, 1e-6, true);
    };

    const PhaseReport direct = phases_for([](double t) { return t; }, [](double) { return 1.0; },
                                          tau, 1 << 16);
    // s(t) = tau (3u^2 - 2u^3), u = t / T with T = 1.
    auto s = [&](double t) { return tau * t * t * (3.0 - 2.0 * t); };
    auto ds = [&](double t) { return tau * 6.0 * t * (1.0 - t); };
    const PhaseReport warped = phases_for(s, ds, 1.0, 1 << 16);

    CHECK(warped.phi_total == doctest::Approx(direct.phi_total).epsilon(1e-8));
    CHECK(warped.phi_dyn == doctest::Approx(direct.phi_dyn).epsilon(1e-8));
    CHECK(warped.phi_geo == doctest::Approx(direct.phi_geo).epsilon(1e-8));
}

TEST_CASE("dynamical phase converges at second order on smooth drives") {
    auto h_of_t = [](double t) {
        return Matrix(0.4 * std::cos(t) * sigma_z() + 0.3 * std::sin(0.7 * t) * sigma_x());
    };
    const DensityOperator rho = mixed_reference();
    auto phi_d_at = [&](int steps) {
        HamiltonianSpec spec;
        spec.dim = 2;
        spec.segments.push_back(SampledSegment{2.0 * kPi, {}});
        TimeGrid grid;
        for (int j = 0; j <= steps; ++j) grid.nodes.push_back(2.0 * kPi * j / steps);
        fill_samples(spec, grid, h_of_t);
        return dynamical_phase(propagate(spec, grid), rho).phi_d;
    };
    const double reference = phi_d_at(1 << 16);
    double prev_err = -1.0;
    for (int steps : {512, 1024, 2048, 4096}) {
        const double err = std::abs(phi_d_at(steps) - reference);
        if (prev_err > 0.0) CHECK(prev_err / err >= 3.5);
        prev_err = err;
    }
}
