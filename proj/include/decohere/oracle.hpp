#pragma once

// Brute-force propagators built by numerical diagonalisation. These exist to
// cross-check the closed forms and are independent of them.

#include <complex>

#include <Eigen/Dense>

#include "decohere/environment.hpp"
#include "decohere/errors.hpp"

namespace decohere::oracle {

/// Pauli matrices in the (|g>, |e>) ordering used throughout the library.
inline Eigen::Matrix2cd sigma2() {
    Eigen::Matrix2cd m;
    m << 0.0, std::complex<double>(0.0, 1.0), std::complex<double>(0.0, -1.0), 0.0;
    return m;
}

inline Eigen::Matrix2cd sigma3() {
    Eigen::Matrix2cd m;
    m << -1.0, 0.0, 0.0, 1.0;
    return m;
}

/// exp(-i H t) for a Hermitian H, by eigendecomposition.
template <typename Matrix>
Matrix hermitian_propagator(const Matrix& hamiltonian, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian);
    if (solver.info() != Eigen::Success) throw numeric_error("hermitian_propagator: eigensolver failed");
    const auto& vecs = solver.eigenvectors();
    Matrix phases = Matrix::Zero(hamiltonian.rows(), hamiltonian.cols());
    for (Eigen::Index k = 0; k < hamiltonian.rows(); ++k) {
        phases(k, k) = std::polar(1.0, -solver.eigenvalues()(k) * t);
    }
    return vecs * phases * vecs.adjoint();
}

/// exp[-i (omega sigma3 + xi g sigma2) t].
inline Eigen::Matrix2cd oracle_factor_unitary(const environment::BathMode& mode, double xi, double t) {
    detail::require(t >= 0.0, "oracle_factor_unitary: t must be >= 0");
    const Eigen::Matrix2cd h = mode.omega * sigma3() + (xi * mode.g) * sigma2();
    return hermitian_propagator(h, t);
}

} // namespace decohere::oracle
