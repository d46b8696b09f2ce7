#include "sensorspec/linalg.hpp"

#include <cmath>

namespace sensorspec {

Matrix kron(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw DimensionMismatch("kron requires square operands");
    const Eigen::Index na = a.rows(), nb = b.rows();
    Matrix out(na * nb, na * nb);
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < na; ++j)
            out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
    return out;
}

Vector vec(const Matrix& rho) {
    // Eigen stores column-major, so the raw buffer already is the
    // column-stacked vector
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix devec(const Vector& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
    if (d * d != v.size())
        throw DimensionMismatch("devec input length is not a perfect square");
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix sandwich_superop(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw DimensionMismatch("sandwich_superop requires equal square dims");
    return kron(b.transpose(), a);
}

EigenDecomposition hermitian_eig(const Matrix& h) {
    if (h.rows() != h.cols())
        throw DimensionMismatch("hermitian_eig requires a square matrix");
    const double scale = h.cwiseAbs().maxCoeff();
    const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > 1e-10 * scale)
        throw NonHermitianInput("matrix asymmetry " + std::to_string(asym) +
                                " exceeds 1e-10 * max|h|");

    Matrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw Error("eigendecomposition failed to converge");

    EigenDecomposition out;
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();

    // fix each column's global phase: largest-magnitude component real
    // positive, ties broken by lowest index
    for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < out.vectors.rows(); ++r) {
            const double m = std::abs(out.vectors(r, c));
            if (m > best + 1e-14) {
                best = m;
                pivot = r;
            }
        }
        const Complex p = out.vectors(pivot, c);
        if (std::abs(p) > 0.0) out.vectors.col(c) *= std::conj(p) / std::abs(p);
    }
    return out;
}

Matrix expm(const Matrix& m) {
    const double norm = m.cwiseAbs().maxCoeff() * double(m.rows());
    int squarings = 0;
    double s = 1.0;
    while (norm * s > 0.25 && squarings < 60) {
        s *= 0.5;
        ++squarings;
    }
    const Matrix a = s * m;
    Matrix term = Matrix::Identity(m.rows(), m.cols());
    Matrix sum = term;
    for (int k = 1; k <= 16; ++k) {
        term = (term * a / double(k)).eval();
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = (sum * sum).eval();
    return sum;
}

}  // namespace sensorspec
