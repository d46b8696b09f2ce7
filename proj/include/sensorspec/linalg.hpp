#pragma once

#include <Eigen/Dense>
#include <complex>

#include "sensorspec/errors.hpp"

namespace sensorspec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Kronecker product, a ⊗ b. Both operands must be square.
Matrix kron(const Matrix& a, const Matrix& b);

// Column-stacking vectorization and its inverse: vec stacks the columns of
// rho top to bottom. This is the one and only stacking convention in the
// engine; sandwich_superop below is defined relative to it.
Vector vec(const Matrix& rho);
Matrix devec(const Vector& v);

// Matrix form of the map rho -> a * rho * b under column stacking:
// vec(a rho b) = (b^T ⊗ a) vec(rho).
Matrix sandwich_superop(const Matrix& a, const Matrix& b);

struct EigenDecomposition {
    Eigen::VectorXd values;  // ascending
    Matrix vectors;          // orthonormal columns, phases fixed

    // gap lambda_{ab} = eps_a - eps_b
    double gap(int a, int b) const { return values(a) - values(b); }
};

// Eigendecomposition of a Hermitian matrix. The input is symmetrized before
// solving; asymmetry beyond 1e-10 * max|h| throws NonHermitianInput since it
// signals a model-construction bug upstream. Each eigenvector's phase is
// fixed (largest-magnitude component made real positive) so the output is
// deterministic and degenerate subspaces get a reproducible basis.
EigenDecomposition hermitian_eig(const Matrix& h);

// e^{M} for small dense M by scaling and squaring with a Taylor series.
Matrix expm(const Matrix& m);

}  // namespace sensorspec
