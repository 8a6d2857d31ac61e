#pragma once

#include <numbers>
#include <random>

#include "phaselab/config.hpp"
#include "phaselab/evolution.hpp"
#include "phaselab/gauge.hpp"
#include "phaselab/phases.hpp"

namespace testutil {

using namespace phaselab;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

inline Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix sigma_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix identity(int d) { return Matrix::Identity(d, d); }

/// rho0 with Bloch vector (r, theta, 0).
inline DensityOperator bloch_state(double r, double theta) {
    return validate_density(bloch_density(BlochParams{r, theta, 0.0}));
}

/// Constant sigma_z/2-style precession spec: H = (omega/2) n.sigma with n = z.
inline HamiltonianSpec precession_spec(double omega, double tau) {
    HamiltonianSpec spec;
    spec.dim = 2;
    spec.segments.push_back(ConstantSegment{tau, 0.5 * omega * sigma_z()});
    return spec;
}

inline PropagatorPath precession_path(double omega, double tau, int steps) {
    const HamiltonianSpec spec = precession_spec(omega, tau);
    const int spu = std::max(1, static_cast<int>(std::ceil(steps / tau)));
    return propagate(spec, build_grid(spec, spu));
}

/// Random Hermitian matrix with entries of scale about `scale`.
inline Matrix random_hermitian(std::mt19937& rng, int d, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    return 0.5 * (m + Matrix(m.adjoint())).eval();
}

/// Random full-rank density operator with well-separated eigenvalues.
inline DensityOperator random_density(std::mt19937& rng, int d) {
    std::uniform_real_distribution<double> uni(0.2, 1.0);
    Eigen::VectorXd weights(d);
    for (int k = 0; k < d; ++k) weights(k) = uni(rng) + 0.15 * k;
    weights /= weights.sum();
    const SpectralDecomposition basis = eig_hermitian(random_hermitian(rng, d));
    const Matrix rho = basis.eigenvectors * weights.cast<Complex>().asDiagonal() *
                       basis.eigenvectors.adjoint();
    return validate_density(rho);
}

/// Cyclic-by-construction loop: m random constant segments followed by their
/// negated mirror image, so U(tau) = I exactly.
inline HamiltonianSpec random_loop_spec(std::mt19937& rng, int d, int half_segments,
                                        double tau) {
    HamiltonianSpec spec;
    spec.dim = d;
    const double seg = tau / (2.0 * half_segments);
    std::vector<Matrix> halves;
    for (int i = 0; i < half_segments; ++i) halves.push_back(random_hermitian(rng, d, 0.7));
    for (const Matrix& h : halves) spec.segments.push_back(ConstantSegment{seg, h});
    for (auto it = halves.rbegin(); it != halves.rend(); ++it)
        spec.segments.push_back(ConstantSegment{seg, Matrix(-*it)});
    return spec;
}

} // namespace testutil
