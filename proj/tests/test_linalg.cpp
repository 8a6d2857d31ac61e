#include <doctest.h>

#include <random>

#include "test_helpers.hpp"

using namespace phaselab;
using namespace testutil;

TEST_CASE("validate_density accepts the maximally mixed qubit") {
    const DensityOperator rho = validate_density(0.5 * identity(2));
    CHECK(rho.spectrum.eigenvalues(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rho.spectrum.eigenvalues(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rho.spectrum.degenerate);
}

TEST_CASE("validate_density keeps a diagonal spectrum in order") {
    Matrix m(2, 2);
    m << 0.75, 0, 0, 0.25;
    const DensityOperator rho = validate_density(m);
    CHECK(rho.spectrum.eigenvalues(0) == doctest::Approx(0.75));
    CHECK(rho.spectrum.eigenvalues(1) == doctest::Approx(0.25));
    CHECK(std::abs(rho.spectrum.eigenvectors(0, 0) - Complex(1, 0)) < 1e-12);
    CHECK(std::abs(rho.spectrum.eigenvectors(1, 1) - Complex(1, 0)) < 1e-12);
}

TEST_CASE("validate_density solves the sigma_x-tilted qubit") {
    // Hand oracle: (I + 0.5 sigma_x)/2 has eigenpairs 0.75 -> (1,1)/sqrt2,
    // 0.25 -> (1,-1)/sqrt2 up to phase convention.
    const Matrix m = 0.5 * (identity(2) + 0.5 * sigma_x());
    const DensityOperator rho = validate_density(m);
    CHECK(rho.spectrum.eigenvalues(0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(rho.spectrum.eigenvalues(1) == doctest::Approx(0.25).epsilon(1e-12));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(rho.spectrum.eigenvectors(0, 0) - Complex(s, 0)) < 1e-10);
    CHECK(std::abs(rho.spectrum.eigenvectors(1, 0) - Complex(s, 0)) < 1e-10);
    // Phase convention: largest-magnitude component real-positive.
    for (int k = 0; k < 2; ++k) {
        Eigen::Index imax = 0;
        rho.spectrum.eigenvectors.col(k).cwiseAbs().maxCoeff(&imax);
        CHECK(rho.spectrum.eigenvectors(imax, k).imag() == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(rho.spectrum.eigenvectors(imax, k).real() >= 0.0);
    }
}

TEST_CASE("validate_density rejects bad inputs") {
    Matrix not_hermitian(2, 2);
    not_hermitian << 0.5, 0.3, 0.0, 0.5;
    CHECK_THROWS_AS(validate_density(not_hermitian), NotHermitianError);

    CHECK_THROWS_AS(validate_density(identity(2)), NotUnitTraceError);

    Matrix not_positive(2, 2);
    not_positive << 1.5, 0, 0, -0.5;
    CHECK_THROWS_AS(validate_density(not_positive), NotPositiveError);
}

TEST_CASE("validate_density clamps tiny negative eigenvalues") {
    Matrix m(2, 2);
    m << 1.0 + 5e-11, 0, 0, -5e-11;
    const DensityOperator rho = validate_density(m);
    CHECK(rho.spectrum.eigenvalues(1) == 0.0);
    CHECK(rho.matrix.trace().real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eig_hermitian handles the standard cases") {
    const SpectralDecomposition id3 = eig_hermitian(identity(3));
    CHECK(id3.eigenvalues.isApproxToConstant(1.0, 1e-12));
    CHECK(id3.degenerate);

    const SpectralDecomposition z = eig_hermitian(sigma_z());
    CHECK(z.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(z.eigenvalues(1) == doctest::Approx(-1.0));
    CHECK(std::abs(z.eigenvectors(0, 0) - Complex(1, 0)) < 1e-12);
    CHECK(std::abs(z.eigenvectors(1, 1) - Complex(1, 0)) < 1e-12);

    const SpectralDecomposition x = eig_hermitian(sigma_x());
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(x.eigenvectors(0, 0) - Complex(s, 0)) < 1e-12);
    CHECK(std::abs(x.eigenvectors(1, 0) - Complex(s, 0)) < 1e-12);
    CHECK(std::abs(x.eigenvectors(0, 1) - Complex(s, 0)) < 1e-12);
    CHECK(std::abs(x.eigenvectors(1, 1) + Complex(s, 0)) < 1e-12);

    CHECK_THROWS_AS(eig_hermitian(Matrix(sigma_x() + kI * identity(2) * 0.5)), NotHermitianError);
}

TEST_CASE("eig_hermitian reconstruction and orthonormality on random matrices") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int d = 2 + trial % 7;
        const Matrix h = random_hermitian(rng, d);
        const SpectralDecomposition spec = eig_hermitian(h);
        const Matrix rebuilt = spec.eigenvectors *
                               spec.eigenvalues.cast<Complex>().asDiagonal() *
                               spec.eigenvectors.adjoint();
        CHECK((rebuilt - h).norm() < 1e-10);
        CHECK((spec.eigenvectors.adjoint() * spec.eigenvectors - identity(d)).cwiseAbs().maxCoeff() <
              1e-10);
        for (int k = 0; k + 1 < d; ++k) CHECK(spec.eigenvalues(k) >= spec.eigenvalues(k + 1));
    }
}

TEST_CASE("exp_hermitian_generator matches closed forms") {
    CHECK((exp_hermitian_generator(sigma_x(), 0.0) - identity(2)).norm() < 1e-14);

    const double t = 1.7;
    const Matrix u = exp_hermitian_generator(0.5 * sigma_z(), t);
    CHECK(std::abs(u(0, 0) - std::exp(-kI * t / 2.0)) < 1e-13);
    CHECK(std::abs(u(1, 1) - std::exp(kI * t / 2.0)) < 1e-13);

    const Matrix flip = exp_hermitian_generator(0.5 * kPi * sigma_x(), 1.0);
    CHECK((flip - Matrix(-kI * sigma_x())).norm() < 1e-13);
}

TEST_CASE("exp_hermitian_generator is unitary and inverts under dt -> -dt") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dts(-3.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 2 + trial % 7;
        const Matrix h = random_hermitian(rng, d);
        const double dt = dts(rng);
        const Matrix u = exp_hermitian_generator(h, dt);
        CHECK((u.adjoint() * u - identity(d)).norm() < 1e-12);
        CHECK((exp_hermitian_generator(h, -dt) * u - identity(d)).norm() < 1e-11);
    }
}

TEST_CASE("scalar_unitary_distance identifies scalar unitaries") {
    const auto scalar = scalar_unitary_distance(Matrix(std::exp(kI * kPi / 3.0) * identity(2)));
    CHECK_FALSE(scalar.zero_trace);
    CHECK(scalar.theta == doctest::Approx(kPi / 3.0).epsilon(1e-12));
    CHECK(scalar.dist == doctest::Approx(0.0).epsilon(1e-7));

    const auto traceless = scalar_unitary_distance(sigma_z());
    CHECK(traceless.zero_trace);
    CHECK(traceless.dist == doctest::Approx(2.0));

    Matrix partial(2, 2);
    partial << 1, 0, 0, std::exp(kI * kPi / 2.0);
    const auto mixed = scalar_unitary_distance(partial);
    CHECK(mixed.theta == doctest::Approx(kPi / 4.0));
    CHECK(mixed.dist == doctest::Approx(std::sqrt(4.0 - 2.0 * std::sqrt(2.0))));
}

TEST_CASE("scalar_unitary_distance ignores global phases") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> angles(-kPi, kPi);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 4;
        const Matrix u = exp_hermitian_generator(random_hermitian(rng, d), 1.0);
        const double base = scalar_unitary_distance(u).dist;
        const Matrix rotated = std::exp(kI * angles(rng)) * u;
        CHECK(scalar_unitary_distance(rotated).dist == doctest::Approx(base).epsilon(1e-10));
    }
}

TEST_CASE("unwind_phase follows the continuous branch") {
    const std::vector<Complex> constant{Complex(1, 0), Complex(1, 0), Complex(1, 0)};
    const auto flat = unwind_phase(constant);
    CHECK(flat == std::vector<double>{0.0, 0.0, 0.0});

    // Spiral e^{-i t/2} on [0, 2pi]: continuity forces -pi, not +pi.
    std::vector<Complex> spiral;
    const int n = 4096;
    for (int j = 0; j <= n; ++j) spiral.push_back(std::exp(-kI * (2.0 * kPi * j / n) / 2.0));
    const auto angles = unwind_phase(spiral);
    CHECK(angles.back() == doctest::Approx(-kPi).epsilon(1e-12));

    std::vector<Complex> tiny{Complex(1, 0), Complex(1e-12, 0)};
    CHECK_THROWS_AS(unwind_phase(tiny), NearZeroCrossingError);

    std::vector<Complex> coarse{Complex(1, 0), Complex(-1, 0)};
    CHECK_THROWS_AS(unwind_phase(coarse), JumpTooLargeError);
}

TEST_CASE("unwind_phase recovers omega*t across many windings") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> omegas(-6.0, 6.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double omega = omegas(rng);
        const double tau = 4.0 * kPi;
        const int n = 1024;  // |omega| dt < pi/2 holds comfortably
        std::vector<Complex> samples;
        for (int j = 0; j <= n; ++j) samples.push_back(std::exp(kI * omega * (tau * j / n)));
        const auto angles = unwind_phase(samples);
        CHECK(angles.back() == doctest::Approx(omega * tau).epsilon(1e-12));
    }
}
