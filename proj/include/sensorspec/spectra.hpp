#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sensorspec/liouvillian.hpp"

namespace sensorspec {

struct SpectrumGrid {
    std::vector<double> axis1;  // detunings omega_1 - omega_L, strictly increasing
    std::vector<double> axis2;  // second sensor axis; empty for 1D runs
    std::vector<double> linewidths;  // Gamma_i per sensor
    std::vector<double> couplings;   // epsilon_i per sensor

    bool two_photon() const { return !axis2.empty(); }
    void validate() const;
};

// Full parameter record carried by every result so emitted files can state
// exactly what produced them.
struct Provenance {
    EmitterParams emitter;
    BathParams bath;
    bool has_bath = false;
    QuadratureSpec quadrature;
    PhononMode mode = PhononMode::Off;
    int failed_points = 0;
    std::string first_failure;
};

struct SpectrumResult {
    SpectrumGrid grid;
    PhononMode mode = PhononMode::Off;

    std::vector<double> s1;  // per axis1 point (1D runs)
    std::vector<double> s2;  // row-major over axis1 x axis2 (2D runs)
    std::vector<double> g2;  // filled by g2_normalize

    // 1 = computed, 0 = failed point left as an explicit gap
    std::vector<std::uint8_t> valid;

    Provenance provenance;
};

struct PeakAnalysis {
    std::vector<double> positions;  // refined peak detunings, ascending
    double omega_r = 0.0;           // mean sidepeak distance from the center
    double grid_step = 0.0;         // quoted uncertainty
};

// <varsigma_1^dag ... varsigma_k^dag varsigma_k ... varsigma_1> on rho_ss for
// the 1-based, distinct sensor indices given. For distinct two-level sensors
// the lifted number operators commute, so this is <n_{i1} ... n_{ik}>.
double normal_ordered_moment(const Matrix& rho_ss, const CompositeModel& model,
                             const std::vector<int>& sensor_indices);

// S^(1)(omega) = Gamma/(2 pi eps^2) <n>_ss swept over grid.axis1 with a
// single sensor. Per-point engine failures are recorded as gaps, not thrown.
SpectrumResult single_photon_spectrum(const EmitterParams& emitter,
                                      PhononMode mode, const SpectrumGrid& grid,
                                      const BathKernel* kernel,
                                      int workers = 1);

// S^(2)(omega_1, omega_2) = Gamma_1 Gamma_2 / ((2 pi)^2 eps_1^2 eps_2^2)
// <:n_1 n_2:>_ss over the product grid with two sensors.
SpectrumResult two_photon_spectrum(const EmitterParams& emitter,
                                   PhononMode mode, const SpectrumGrid& grid,
                                   const BathKernel* kernel, int workers = 1);

// g2(w1, w2) = S^(2)(w1, w2) / (S^(1)(w1) S^(1)(w2)) with the denominators
// taken from dedicated single-sensor runs at the matching linewidths (not
// from marginals of the two-sensor state). Cells whose denominator is below
// an underflow floor are marked invalid instead of divided.
SpectrumResult g2_normalize(const SpectrumResult& s2,
                            const SpectrumResult& s1_axis1,
                            const SpectrumResult& s1_axis2);

// Regression-theorem reference: propagates sigma rho_ss under the
// emitter-only generator, Fourier transforms <sigma^dag(tau) sigma(0)> with
// e^{-Gamma tau / 2} damping (Lorentzian filter of width grid.linewidths[0]),
// and handles the coherent contribution analytically. Off or Additive mode
// only; the Joint construction is exactly what this route cannot express.
SpectrumResult qrt_reference_spectrum(const EmitterParams& emitter,
                                      PhononMode mode, const SpectrumGrid& grid,
                                      const BathKernel* kernel);

// Strict local maxima above 1% of the global maximum, refined by parabolic
// interpolation; needs at least three peaks. Omega_r is the mean distance of
// the two outer peaks of the three tallest from the central one.
PeakAnalysis extract_sidepeak_separation(const SpectrumResult& result);

}  // namespace sensorspec
