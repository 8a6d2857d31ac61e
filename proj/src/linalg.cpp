#include "phaselab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace phaselab {

namespace {

void require_finite(const Matrix& m) {
    if (!m.allFinite()) throw DomainError("matrix contains non-finite entries");
}

void require_square(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw DimensionMismatchError(fmt::format("expected square matrix, got {}x{}", m.rows(), m.cols()));
}

// Rotate each eigenvector so its largest-magnitude component is real-positive.
void fix_eigenvector_phases(Matrix& vecs) {
    for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
        Eigen::Index imax = 0;
        vecs.col(k).cwiseAbs().maxCoeff(&imax);
        const Complex pivot = vecs(imax, k);
        if (std::abs(pivot) > 0.0) vecs.col(k) *= std::conj(pivot) / std::abs(pivot);
    }
}

} // namespace

bool is_hermitian(const Matrix& m, double tol) {
    return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const Matrix gram = m.adjoint() * m;
    return (gram - Matrix::Identity(m.rows(), m.cols())).norm() <= tol;
}

double principal_angle(double angle) {
    const double two_pi = 2.0 * std::numbers::pi;
    double a = std::fmod(angle, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    if (a > std::numbers::pi) a -= two_pi;
    return a;
}

double circle_distance(double a, double b) {
    return std::abs(principal_angle(a - b));
}

SpectralDecomposition eig_hermitian(const Matrix& h, double tol) {
    require_square(h);
    require_finite(h);
    if (!is_hermitian(h, tol))
        throw NotHermitianError(fmt::format("asymmetry {:.3e} exceeds tol {:.1e}",
                                            (h - h.adjoint()).cwiseAbs().maxCoeff(), tol));

    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (h + h.adjoint()));
    if (solver.info() != Eigen::Success)
        throw Error("hermitian eigensolver failed to converge");

    const Eigen::Index d = h.rows();
    SpectralDecomposition out;
    out.eigenvalues.resize(d);
    out.eigenvectors.resize(d, d);
    // Eigen returns ascending order; flip to descending.
    for (Eigen::Index k = 0; k < d; ++k) {
        out.eigenvalues(k) = solver.eigenvalues()(d - 1 - k);
        out.eigenvectors.col(k) = solver.eigenvectors().col(d - 1 - k);
    }
    fix_eigenvector_phases(out.eigenvectors);
    for (Eigen::Index k = 0; k + 1 < d; ++k)
        if (out.eigenvalues(k) - out.eigenvalues(k + 1) < kDegeneracyGap) out.degenerate = true;
    return out;
}

DensityOperator validate_density(const Matrix& m, double tol) {
    require_square(m);
    require_finite(m);
    if (!is_hermitian(m, tol))
        throw NotHermitianError(fmt::format("density matrix asymmetry exceeds tol {:.1e}", tol));
    const double trace = m.trace().real();
    if (std::abs(m.trace() - Complex(1.0, 0.0)) > tol)
        throw NotUnitTraceError(fmt::format("trace {:.12g} differs from 1 beyond tol {:.1e}", trace, tol));

    SpectralDecomposition spec = eig_hermitian(m, tol);
    for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
        double& w = spec.eigenvalues(k);
        if (w < -tol)
            throw NotPositiveError(fmt::format("eigenvalue {:.3e} below -tol", w));
        if (w < 0.0) w = 0.0;
    }
    spec.eigenvalues /= spec.eigenvalues.sum();

    DensityOperator rho;
    rho.matrix = spec.eigenvectors *
                 spec.eigenvalues.cast<Complex>().asDiagonal() *
                 spec.eigenvectors.adjoint();
    rho.spectrum = std::move(spec);
    return rho;
}

Matrix exp_hermitian_generator(const Matrix& h, double dt) {
    if (!std::isfinite(dt)) throw DomainError("dt is not finite");
    const SpectralDecomposition spec = eig_hermitian(h);
    CVector phases(spec.dim());
    for (int k = 0; k < spec.dim(); ++k)
        phases(k) = std::exp(Complex(0.0, -spec.eigenvalues(k) * dt));
    return spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
}

ScalarUnitaryDistance scalar_unitary_distance(const Matrix& u) {
    require_square(u);
    if (!is_unitary(u, 1e-9)) throw DomainError("matrix is not unitary within 1e-9");
    const Complex tr = u.trace();
    const double d = static_cast<double>(u.rows());
    if (std::abs(tr) < 1e-12)
        return {0.0, std::sqrt(2.0 * d), true};
    const double dist_sq = std::max(0.0, 2.0 * d - 2.0 * std::abs(tr));
    return {std::arg(tr), std::sqrt(dist_sq), false};
}

std::vector<double> unwind_phase(std::span<const Complex> samples, double min_mag) {
    std::vector<double> angles;
    angles.reserve(samples.size());
    double prev = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        if (std::abs(samples[j]) <= min_mag)
            throw NearZeroCrossingError(
                fmt::format("sample {} has magnitude {:.3e} <= {:.1e}; phase ill-defined",
                            j, std::abs(samples[j]), min_mag));
        if (j == 0) {
            prev = std::arg(samples[0]);
        } else {
            const double step = principal_angle(std::arg(samples[j]) - prev);
            if (std::abs(step) > std::numbers::pi / 2.0)
                throw JumpTooLargeError(
                    fmt::format("branch step {:.3f} rad at sample {} exceeds pi/2; grid too coarse", step, j));
            prev += step;
        }
        angles.push_back(prev);
    }
    return angles;
}

} // namespace phaselab
