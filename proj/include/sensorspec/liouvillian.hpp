#pragma once

#include "sensorspec/bath.hpp"
#include "sensorspec/linalg.hpp"
#include "sensorspec/model.hpp"

namespace sensorspec {

// How the phonon environment enters the generator:
//   Joint    - rate operator built in the eigenbasis of the full
//              emitter + sensor Hamiltonian (the method of record here);
//   Additive - rate operator built in the bare emitter eigenbasis and the
//              resulting dissipator lifted by identity onto the sensors, the
//              regression-theorem-equivalent treatment kept as a contrast;
//   Off      - no phonons.
enum class PhononMode { Joint, Additive, Off };

const char* to_string(PhononMode mode);

struct Liouvillian {
    Matrix matrix;  // D^2 x D^2, acts on vec(rho)
    PhononMode mode = PhononMode::Off;
    int dim = 0;  // D
};

// (rate/2) * (2 c rho c^dag - c^dag c rho - rho c^dag c) as a superoperator.
Matrix lindblad_dissipator(const Matrix& c, double rate);

// Rate operator Z = sum_{ab} <psi_a|A|psi_b> |psi_a><psi_b| F(-lambda_{ab})
// with lambda_{ab} = eps_a - eps_b the eigenvalue gaps of the decomposed
// Hamiltonian. Returned in the original (lab) basis.
Matrix rate_operator(const EigenDecomposition& decomp, const Matrix& a,
                     const BathKernel& kernel);

// Phonon dissipator K(rho) = -[A, Z rho] + [A, rho Z^dag]; A must be
// Hermitian.
Matrix phonon_dissipator(const Matrix& a, const Matrix& z);

// Full generator: -i[H', rho] + K(rho) + (gamma/2) D_sigma + sum_m
// (Gamma_m/2) D_{varsigma_m}. The kernel may be null in Off mode only.
//
// In Joint and Additive modes the generator carries the compensating
// commutator +i delta_P [A, rho]: the rate operator's imaginary part contains
// the polaron shift (Im F(0) = delta_P), but the resonance convention already
// absorbs that shift into the emitter gap, so it must not act a second time.
// Without the compensation a resonantly driven emitter would effectively be
// detuned by delta_P, which is several Rabi frequencies at the parameters of
// interest.
Liouvillian build_liouvillian(const CompositeModel& model, PhononMode mode,
                              const BathKernel* kernel);

struct SteadyStateReport {
    double residual = 0.0;        // ||L vec(rho)||_inf / ||L||_inf
    double min_eigenvalue = 0.0;  // most negative eigenvalue of rho_ss
    bool positivity_warning = false;
};

// Steady state via a bordered solve: one row of the generator is replaced by
// the trace constraint and the resulting system LU-factored, with iterative
// refinement to recover the small sensor-sector components. Throws
// DegenerateKernel when the kernel is not one-dimensional and SingularSolve
// when the refined residual will not drop. Negative eigenvalues beyond -1e-6
// set the positivity warning: the non-secular (Redfield-type) phonon
// dissipator does not guarantee exact positivity.
Matrix steady_state(const Liouvillian& l, SteadyStateReport* report = nullptr);

// Classical fourth-order propagation of vec(rho); test/oracle use only. The
// first step is error-estimated by step doubling and StepSizeTooLarge is
// thrown if the estimate exceeds 1e-10.
Matrix time_evolve(const Liouvillian& l, const Matrix& rho0, double t_end,
                   double dt);

}  // namespace sensorspec
