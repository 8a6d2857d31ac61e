#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "phaselab/errors.hpp"

namespace phaselab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Gap below which neighbouring eigenvalues count as one degenerate cluster.
inline constexpr double kDegeneracyGap = 1e-9;

/// Default magnitude floor under which a complex argument is meaningless.
inline constexpr double kUnwindMinMag = 1e-8;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
/// Each eigenvector is normalised so its largest-magnitude component is real
/// and nonnegative, which pins the otherwise arbitrary per-level phases.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;  // descending
    Matrix eigenvectors;          // columns, orthonormal
    bool degenerate = false;      // some adjacent gap < kDegeneracyGap

    int dim() const { return static_cast<int>(eigenvalues.size()); }
    CVector level(int k) const { return eigenvectors.col(k); }
};

/// Validated mixed state: Hermitian, unit trace, positive semidefinite.
struct DensityOperator {
    Matrix matrix;
    SpectralDecomposition spectrum;

    int dim() const { return static_cast<int>(matrix.rows()); }
};

struct ScalarUnitaryDistance {
    double theta;     // principal argument of Tr U (0 when zero_trace)
    double dist;      // Frobenius distance to the nearest scalar unitary
    bool zero_trace;  // |Tr U| < 1e-12: theta undefined, dist = sqrt(2d)
};

/// Checks Hermiticity, unit trace, and positivity of `m`. Eigenvalues in
/// [-tol, 0] are clamped to zero and the spectrum renormalised to trace one.
DensityOperator validate_density(const Matrix& m, double tol = 1e-10);

SpectralDecomposition eig_hermitian(const Matrix& h, double tol = 1e-10);

/// e^{-i h dt}, computed through the eigendecomposition of `h`.
Matrix exp_hermitian_generator(const Matrix& h, double dt);

ScalarUnitaryDistance scalar_unitary_distance(const Matrix& u);

/// Continuous-branch argument of a complex trajectory. The first angle is the
/// principal argument of samples[0]; each following angle is the branch of
/// arg(samples[j]) nearest its predecessor. Throws NearZeroCrossingError when
/// a sample magnitude drops to `min_mag` or below, JumpTooLargeError when the
/// nearest-branch step exceeds pi/2 (grid too coarse to trust).
std::vector<double> unwind_phase(std::span<const Complex> samples,
                                 double min_mag = kUnwindMinMag);

/// Wraps an angle into (-pi, pi].
double principal_angle(double angle);

/// Distance between two angles on the circle, in [0, pi].
double circle_distance(double a, double b);

bool is_hermitian(const Matrix& m, double tol = 1e-10);
bool is_unitary(const Matrix& m, double tol = 1e-9);

} // namespace phaselab
