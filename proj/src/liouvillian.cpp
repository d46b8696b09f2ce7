#include "sensorspec/liouvillian.hpp"

#include <cmath>

namespace sensorspec {

namespace {

Matrix identity_like(const Matrix& a) {
    return Matrix::Identity(a.rows(), a.cols());
}

// i c [A, .] as a superoperator, for real c and operator a
Matrix scaled_commutator(const Matrix& a, double c) {
    const Matrix id = identity_like(a);
    return Complex(0.0, c) *
           (sandwich_superop(a, id) - sandwich_superop(id, a));
}

Matrix lift_by_identity(const Matrix& op, int total_dim) {
    const int rest = total_dim / static_cast<int>(op.rows());
    return kron(op, Matrix::Identity(rest, rest));
}

}  // namespace

const char* to_string(PhononMode mode) {
    switch (mode) {
        case PhononMode::Joint: return "joint";
        case PhononMode::Additive: return "additive";
        case PhononMode::Off: return "off";
    }
    return "?";
}

Matrix lindblad_dissipator(const Matrix& c, double rate) {
    if (rate < 0.0)
        throw NegativeRate("dissipator rate must be >= 0, got " +
                           std::to_string(rate));
    const Matrix id = identity_like(c);
    const Matrix cdc = c.adjoint() * c;
    return 0.5 * rate *
           (2.0 * sandwich_superop(c, c.adjoint()) -
            sandwich_superop(cdc, id) - sandwich_superop(id, cdc));
}

Matrix rate_operator(const EigenDecomposition& decomp, const Matrix& a,
                     const BathKernel& kernel) {
    const Eigen::Index d = a.rows();
    if (decomp.vectors.rows() != d)
        throw DimensionMismatch("rate_operator: decomposition/operator dims differ");
    if (kernel.params().alpha == 0.0) return Matrix::Zero(d, d);

    const Matrix a_eig = decomp.vectors.adjoint() * a * decomp.vectors;
    Matrix z_eig(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            z_eig(i, j) = a_eig(i, j) * kernel.half_fourier(-decomp.gap(int(i), int(j)));
    return decomp.vectors * z_eig * decomp.vectors.adjoint();
}

Matrix phonon_dissipator(const Matrix& a, const Matrix& z) {
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale > 0.0 &&
        (a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NonHermitianCoupling("phonon coupling operator must be Hermitian");
    if (a.rows() != z.rows())
        throw DimensionMismatch("phonon_dissipator: operator dims differ");
    const Matrix id = identity_like(a);
    // K(rho) = -[A, Z rho] + [A, rho Z^dag]
    return -sandwich_superop(a * z, id) + sandwich_superop(z, a) +
           sandwich_superop(a, z.adjoint()) -
           sandwich_superop(id, z.adjoint() * a);
}

Liouvillian build_liouvillian(const CompositeModel& model, PhononMode mode,
                              const BathKernel* kernel) {
    if (mode != PhononMode::Off && kernel == nullptr)
        throw ValidationError("phonon modes joint/additive require a bath kernel");

    const Matrix id = Matrix::Identity(model.dim, model.dim);
    Matrix l = Complex(0.0, -1.0) * (sandwich_superop(model.h_prime, id) -
                                     sandwich_superop(id, model.h_prime));
    for (const auto& [c, rate] : model.collapse)
        l += lindblad_dissipator(c, rate);

    if (mode == PhononMode::Joint) {
        const auto decomp = hermitian_eig(model.h_prime);
        const Matrix z = rate_operator(decomp, model.coupling_a, *kernel);
        l += phonon_dissipator(model.coupling_a, z);
        // Z carries the polaron shift in Im F; the resonance convention has
        // already moved that shift into the emitter gap, so compensate here
        l += scaled_commutator(model.coupling_a, polaron_shift(kernel->params()));
    } else if (mode == PhononMode::Additive) {
        // bare-emitter rate operator, dissipator formed on the emitter factor
        // and lifted by identity onto the sensors
        Matrix s2 = Matrix::Zero(2, 2);
        s2(0, 1) = 1.0;
        const Matrix a2 = s2.adjoint() * s2;
        const Matrix sx = s2 + s2.adjoint();
        const Matrix h_bare =
            model.emitter.detuning * a2 + 0.5 * model.emitter.rabi * sx;
        const Matrix z2 = rate_operator(hermitian_eig(h_bare), a2, *kernel);
        const Matrix a_lift = lift_by_identity(a2, model.dim);
        const Matrix z_lift = lift_by_identity(z2, model.dim);
        l += phonon_dissipator(a_lift, z_lift);
        l += scaled_commutator(a_lift, polaron_shift(kernel->params()));
    }

    return Liouvillian{std::move(l), mode, model.dim};
}

Matrix steady_state(const Liouvillian& l, SteadyStateReport* report) {
    const Eigen::Index d2 = l.matrix.rows();
    const Eigen::Index d = l.dim;
    if (d * d != d2) throw DimensionMismatch("liouvillian dim metadata wrong");

    // bordered system: replace the first row (one redundant equation of
    // L vec(rho) = 0) with the trace constraint
    Matrix m = l.matrix;
    m.row(0).setZero();
    for (Eigen::Index i = 0; i < d; ++i) m(0, i * d + i) = 1.0;
    Vector rhs = Vector::Zero(d2);
    rhs(0) = 1.0;

    Eigen::PartialPivLU<Matrix> lu(m);
    const auto u_diag = lu.matrixLU().diagonal().cwiseAbs();
    const double u_max = u_diag.maxCoeff();
    const double u_min = u_diag.minCoeff();
    if (!(u_max > 0.0) || !std::isfinite(u_max))
        throw SingularSolve("bordered system factorization produced no pivots");
    if (u_min < 1e-13 * u_max)
        throw DegenerateKernel(
            "generator kernel is not one-dimensional (pivot ratio " +
            std::to_string(u_min / u_max) +
            "); check for decoupled sectors");

    Vector x = lu.solve(rhs);
    const double l_norm = l.matrix.cwiseAbs().maxCoeff();
    double residual = 0.0;
    // Iterative refinement: weakly coupled sensor sectors sit many orders of
    // magnitude below the emitter sector, and plain LU only gives normwise
    // accuracy. The residuals of the graded (tiny) equations are computed to
    // good relative accuracy, so refinement restores those components even
    // when the normwise residual already looks converged; the first pass is
    // therefore unconditional.
    for (int pass = 0; pass < 3; ++pass) {
        x += lu.solve(rhs - m * x);
        residual = (l.matrix * x).cwiseAbs().maxCoeff() / l_norm;
        if (residual <= 1e-10) break;
    }
    if (residual > 1e-10)
        throw SingularSolve("steady-state residual " + std::to_string(residual) +
                            " did not refine below 1e-10 * ||L||");

    Matrix rho = devec(x);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    if (report != nullptr) {
        report->residual = residual;
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
        report->min_eigenvalue = es.eigenvalues().minCoeff();
        report->positivity_warning = report->min_eigenvalue < -1e-6;
    }
    return rho;
}

Matrix time_evolve(const Liouvillian& l, const Matrix& rho0, double t_end,
                   double dt) {
    if (dt <= 0.0) throw ValidationError("time_evolve requires dt > 0");
    if (t_end < 0.0) throw ValidationError("time_evolve requires t_end >= 0");
    if (t_end == 0.0) return rho0;

    const Matrix& a = l.matrix;
    auto rk4_step = [&a](const Vector& y, double h) {
        const Vector k1 = a * y;
        const Vector k2 = a * (y + 0.5 * h * k1);
        const Vector k3 = a * (y + 0.5 * h * k2);
        const Vector k4 = a * (y + h * k3);
        return (y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
    };

    Vector y = vec(rho0);

    // step-doubling error estimate on the first step
    const Vector full = rk4_step(y, dt);
    const Vector half = rk4_step(rk4_step(y, 0.5 * dt), 0.5 * dt);
    const double est = (full - half).cwiseAbs().maxCoeff() / 15.0;
    if (est > 1e-10)
        throw StepSizeTooLarge("first-step error estimate " +
                               std::to_string(est) +
                               " exceeds 1e-10; reduce dt");

    const auto steps = static_cast<long long>(std::ceil(t_end / dt - 1e-12));
    for (long long s = 0; s < steps; ++s) {
        const double h = std::min(dt, t_end - double(s) * dt);
        y = rk4_step(y, h);
    }
    return devec(y);
}

}  // namespace sensorspec
