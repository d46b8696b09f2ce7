#pragma once

#include <utility>
#include <vector>

#include "sensorspec/bath.hpp"
#include "sensorspec/linalg.hpp"

namespace sensorspec {

struct EmitterParams {
    double detuning = 0.0;  // delta = omega_0' - omega_L, ps^-1
    double rabi = 0.0;      // Omega, ps^-1
    double gamma = 0.0;     // radiative rate, ps^-1

    // absolute polaron-shifted gap, recorded for axis labeling only; the
    // rotating-frame equations never use it
    double omega0_prime = 0.0;

    void validate() const;  // gamma > 0
};

struct SensorParams {
    double detuning = 0.0;   // omega_m - omega_L, ps^-1
    double linewidth = 0.0;  // Gamma_m, ps^-1
    double coupling = 0.0;   // epsilon_m, ps^-1

    void validate() const;  // linewidth > 0, coupling > 0
};

// Joint emitter + sensor system on the 2^(N+1)-dimensional space with the
// fixed tensor ordering emitter ⊗ sensor_1 ⊗ ... ⊗ sensor_N. Basis per
// factor: index 0 = ground/vacuum, 1 = excited/occupied.
struct CompositeModel {
    EmitterParams emitter;
    std::vector<SensorParams> sensors;
    int dim = 0;

    Matrix h_prime;     // rotating-frame Hamiltonian
    Matrix sigma;       // emitter lowering operator, lifted
    Matrix coupling_a;  // A = sigma^dag sigma, lifted
    std::vector<Matrix> varsigma;  // sensor lowering operators, lifted

    // (collapse operator, rate) pairs: (sigma, gamma), then one per sensor
    std::vector<std::pair<Matrix, double>> collapse;

    // set when any sensor violates eps^2 / (Gamma gamma) < 1e-2; the sensor
    // back-action is then no longer negligible and spectra are suspect
    bool weak_sensor_warning = false;
};

// Assemble the composite model. Up to three sensors (dimension guard;
// two is the largest paper-scale case).
CompositeModel build_composite(const EmitterParams& emitter,
                               const std::vector<SensorParams>& sensors);

// Resonance convention: the bath shifts the emitter gap by delta_P, and the
// shifted gap omega_0' = omega_0 + delta_P is what the laser is tuned to.
// Returns parameters with detuning = 0 and omega0_prime recorded.
EmitterParams resonant_drive(double omega0, const BathParams& bath,
                             double rabi, double gamma);

}  // namespace sensorspec
