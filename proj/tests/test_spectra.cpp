#include <cmath>
#include <vector>

#include "doctest.h"
#include "sensorspec/spectra.hpp"

using namespace sensorspec;

namespace {

constexpr double kGamma = 1.0 / 700.0;
constexpr double kRabi = 0.05;

const EmitterParams kEmitter{0.0, kRabi, kGamma, 0.0};
const BathParams kBath{0.027, 2.2, 4.0};

const BathKernel& shared_kernel() {
    static const BathKernel kernel(kBath);
    return kernel;
}

SpectrumGrid grid_1d(std::vector<double> axis, double linewidth = 1e-4,
                     double coupling = 1e-6) {
    SpectrumGrid g;
    g.axis1 = std::move(axis);
    g.linewidths = {linewidth};
    g.couplings = {coupling};
    return g;
}

SpectrumGrid grid_2d(std::vector<double> axis, double linewidth,
                     double coupling = 1e-6) {
    SpectrumGrid g;
    g.axis1 = axis;
    g.axis2 = std::move(axis);
    g.linewidths = {linewidth, linewidth};
    g.couplings = {coupling, coupling};
    return g;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[std::size_t(i)] = lo + (hi - lo) * double(i) / double(n - 1);
    return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// linear-interpolated full width at half maximum of a symmetric-ish peak
double fwhm(const std::vector<double>& axis, const std::vector<double>& vals) {
    std::size_t top = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] > vals[top]) top = i;
    const double half = 0.5 * vals[top];
    std::size_t lo = top, hi = top;
    while (lo > 0 && vals[lo] > half) --lo;
    while (hi + 1 < vals.size() && vals[hi] > half) ++hi;
    auto cross = [&](std::size_t a, std::size_t b) {
        const double t = (half - vals[a]) / (vals[b] - vals[a]);
        return axis[a] + t * (axis[b] - axis[a]);
    };
    return cross(hi - 1, hi) - cross(lo + 1, lo);
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(grid_1d({0.0}).validate(), ValidationError);
    CHECK_THROWS_AS(grid_1d({0.1, 0.1}).validate(), ValidationError);
    CHECK_THROWS_AS(grid_1d({0.2, 0.1}).validate(), ValidationError);
    CHECK_NOTHROW(grid_1d({0.1, 0.2}).validate());
    SpectrumGrid g = grid_2d({0.0, 0.1}, 1e-4);
    g.linewidths.pop_back();
    CHECK_THROWS_AS(g.validate(), ValidationError);
}

TEST_CASE("normal-ordered moment on a product state factorizes") {
    const CompositeModel m = build_composite(
        kEmitter, {{0.0, 1e-4, 1e-6}, {0.1, 1e-4, 1e-6}});

    const double p1 = 0.3, p2 = 0.05;
    auto qubit = [](double p) {
        Matrix r = Matrix::Zero(2, 2);
        r(0, 0) = 1.0 - p;
        r(1, 1) = p;
        return r;
    };
    const Matrix rho = kron(qubit(0.2), kron(qubit(p1), qubit(p2)));

    CHECK(rel(normal_ordered_moment(rho, m, {1}), p1) < 1e-14);
    CHECK(rel(normal_ordered_moment(rho, m, {2}), p2) < 1e-14);
    CHECK(rel(normal_ordered_moment(rho, m, {1, 2}), p1 * p2) < 1e-14);
    CHECK(rel(normal_ordered_moment(rho, m, {2, 1}), p1 * p2) < 1e-14);

    CHECK_THROWS_AS(normal_ordered_moment(rho, m, {0}), ValidationError);
    CHECK_THROWS_AS(normal_ordered_moment(rho, m, {3}), ValidationError);
    CHECK_THROWS_AS(normal_ordered_moment(rho, m, {1, 1}),
                    DuplicateSensorIndex);
}

TEST_CASE("phonon-free spectrum, frozen points") {
    const SpectrumResult r = single_photon_spectrum(
        kEmitter, PhononMode::Off, grid_1d({0.0, kRabi}), nullptr);
    REQUIRE(r.valid == std::vector<std::uint8_t>{1, 1});
    CHECK(rel(r.s1[0], 105.46674270707791) < 1e-8);
    CHECK(rel(r.s1[1], 35.47828534022375) < 1e-8);
    CHECK(r.provenance.failed_points == 0);
    CHECK_FALSE(r.provenance.has_bath);
}

TEST_CASE("joint-mode spectrum, frozen points and sideband asymmetry") {
    const SpectrumResult r = single_photon_spectrum(
        kEmitter, PhononMode::Joint, grid_1d({-0.3, 0.0, 0.3}),
        &shared_kernel());
    REQUIRE(r.provenance.failed_points == 0);
    CHECK(rel(r.s1[0], 0.009643628511309347) < 5e-5);
    CHECK(rel(r.s1[1], 84.50968373810728) < 5e-5);
    CHECK(rel(r.s1[2], 0.005390759230868115) < 5e-5);
    // at 4 K phonon emission beats absorption: red sideband above blue
    CHECK(r.s1[0] > r.s1[2]);
    CHECK(r.provenance.has_bath);
    CHECK(r.provenance.bath.alpha == kBath.alpha);
}

TEST_CASE("additive mode misses most of the deep sideband") {
    const SpectrumGrid g = grid_1d({0.3, 0.35});
    const double joint = single_photon_spectrum(kEmitter, PhononMode::Joint, g,
                                                &shared_kernel())
                             .s1[0];
    const SpectrumResult add = single_photon_spectrum(
        kEmitter, PhononMode::Additive, g, &shared_kernel());
    CHECK(rel(add.s1[0], 0.0004379940355422575) < 5e-5);
    CHECK(joint > add.s1[0]);
}

TEST_CASE("spectrum is invariant under sensor-coupling halving") {
    const SpectrumGrid strong = grid_1d({0.0, kRabi}, 1e-4, 1e-6);
    const SpectrumGrid weak = grid_1d({0.0, kRabi}, 1e-4, 5e-7);
    const SpectrumResult a =
        single_photon_spectrum(kEmitter, PhononMode::Off, strong, nullptr);
    const SpectrumResult b =
        single_photon_spectrum(kEmitter, PhononMode::Off, weak, nullptr);
    CHECK(rel(a.s1[0], b.s1[0]) < 1e-3);
    CHECK(rel(a.s1[1], b.s1[1]) < 1e-3);
}

TEST_CASE("two-photon map: frozen correlations, symmetry, positivity") {
    const double w = kRabi;
    const SpectrumGrid map = grid_2d({-w, -w / 2.0, w / 2.0, w}, 2.0 * kGamma);
    const SpectrumResult s2 =
        two_photon_spectrum(kEmitter, PhononMode::Off, map, nullptr);
    const SpectrumResult s1 = single_photon_spectrum(
        kEmitter, PhononMode::Off, grid_1d({-w, -w / 2.0, w / 2.0, w}, 2.0 * kGamma),
        nullptr);
    const SpectrumResult g2 = g2_normalize(s2, s1, s1);
    REQUIRE(g2.provenance.failed_points == 0);

    const std::size_t n = 4;
    auto cell = [&](std::size_t i, std::size_t j) { return g2.g2[i * n + j]; };

    // opposite sidepeaks (+Omega, -Omega) and the leapfrog pair at half the
    // Rabi splitting, frozen against an independent solver
    CHECK(rel(cell(3, 0), 1.296609883527594) < 1e-8);
    CHECK(rel(cell(2, 1), 13.860784422749143) < 1e-8);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(g2.g2[i * n + j] >= 0.0);  // it is a physical correlation
            // identical sensors make the map symmetric under swapping them
            CHECK(std::abs(cell(i, j) - cell(j, i)) <=
                  1e-10 * std::max(1.0, cell(i, j)));
        }
}

TEST_CASE("worker count never changes results") {
    const SpectrumGrid map = grid_2d(linspace(-0.06, 0.06, 3), 2.0 * kGamma);
    const SpectrumResult lone =
        two_photon_spectrum(kEmitter, PhononMode::Off, map, nullptr, 1);
    const SpectrumResult many =
        two_photon_spectrum(kEmitter, PhononMode::Off, map, nullptr, 4);
    REQUIRE(lone.s2.size() == many.s2.size());
    for (std::size_t i = 0; i < lone.s2.size(); ++i)
        CHECK(lone.s2[i] == many.s2[i]);  // bit-identical, not just close
}

TEST_CASE("g2 normalization is exact on factorizing input and keeps gaps") {
    SpectrumResult s1a, s1b, s2;
    s1a.grid = grid_1d({0.0, 1.0}, 0.1);
    s1a.s1 = {2.0, 3.0};
    s1a.valid = {1, 1};
    s1b = s1a;
    s2.grid = grid_2d({0.0, 1.0}, 0.1);
    s2.s2 = {4.0, 6.0, 6.0, 9.0};  // outer product of s1 with itself
    s2.valid = {1, 1, 1, 0};       // one failed cell

    const SpectrumResult g2 = g2_normalize(s2, s1a, s1b);
    CHECK(g2.g2[0] == 1.0);
    CHECK(g2.g2[1] == 1.0);
    CHECK(g2.g2[2] == 1.0);
    CHECK(g2.valid[3] == 0);  // the gap survives normalization

    // an invalid denominator point poisons its whole row
    s1a.valid = {0, 1};
    const SpectrumResult poisoned = g2_normalize(s2, s1a, s1b);
    CHECK(poisoned.valid[0] == 0);
    CHECK(poisoned.valid[1] == 0);
    CHECK(poisoned.valid[2] == 1);

    // axis and linewidth mismatches are structural errors
    s1a.valid = {1, 1};
    s1a.grid.axis1 = {0.0, 2.0};
    CHECK_THROWS_AS(g2_normalize(s2, s1a, s1b), AxisMismatch);
    s1a.grid.axis1 = {0.0, 1.0};
    s1a.grid.linewidths = {0.2};
    CHECK_THROWS_AS(g2_normalize(s2, s1a, s1b), AxisMismatch);
}

TEST_CASE("regression reference: filter broadens the central line to gamma + Gamma") {
    // strong resonant drive: the central incoherent line has width gamma,
    // and the Lorentzian filter adds its own width on top
    const double filter = 2.0 * kGamma;
    const SpectrumGrid g = grid_1d(linspace(-0.008, 0.008, 321), filter);
    const SpectrumResult r =
        qrt_reference_spectrum(kEmitter, PhononMode::Off, g, nullptr);

    // strip the coherent contribution analytically before measuring
    const CompositeModel m = build_composite(kEmitter, {});
    const Matrix rho = steady_state(build_liouvillian(m, PhononMode::Off, nullptr));
    const double g_coh = std::norm((m.sigma * rho).trace());
    std::vector<double> inc(r.s1.size());
    for (std::size_t i = 0; i < inc.size(); ++i) {
        const double w = g.axis1[i];
        inc[i] = r.s1[i] - g_coh * (0.5 * filter) / M_PI /
                               (w * w + 0.25 * filter * filter);
    }

    const double width = fwhm(g.axis1, inc);
    CHECK(rel(width, kGamma + filter) < 0.15);
}

TEST_CASE("sensor method agrees with the regression reference without phonons") {
    const SpectrumGrid g =
        grid_1d({-kRabi, -kRabi / 2.0, 0.0, kRabi / 2.0, kRabi}, 2.0 * kGamma);
    const SpectrumResult sensor =
        single_photon_spectrum(kEmitter, PhononMode::Off, g, nullptr);
    const SpectrumResult qrt =
        qrt_reference_spectrum(kEmitter, PhononMode::Off, g, nullptr);
    for (std::size_t i = 0; i < g.axis1.size(); ++i)
        CHECK(rel(sensor.s1[i], qrt.s1[i]) < 0.02);
}

TEST_CASE("sensor method agrees with the regression reference in additive mode") {
    const SpectrumGrid g = grid_1d({-kRabi, 0.0, kRabi}, 2.0 * kGamma);
    const SpectrumResult sensor = single_photon_spectrum(
        kEmitter, PhononMode::Additive, g, &shared_kernel());
    const SpectrumResult qrt = qrt_reference_spectrum(
        kEmitter, PhononMode::Additive, g, &shared_kernel());
    for (std::size_t i = 0; i < g.axis1.size(); ++i)
        CHECK(rel(sensor.s1[i], qrt.s1[i]) < 0.02);
}

TEST_CASE("regression reference rejects what it cannot express") {
    const SpectrumGrid g = grid_1d({-0.1, 0.1});
    CHECK_THROWS_AS(
        qrt_reference_spectrum(kEmitter, PhononMode::Joint, g, &shared_kernel()),
        ValidationError);
    CHECK_THROWS_AS(qrt_reference_spectrum(kEmitter, PhononMode::Off,
                                           grid_2d({-0.1, 0.1}, 1e-4), nullptr),
                    ValidationError);
    CHECK_THROWS_AS(single_photon_spectrum(kEmitter, PhononMode::Off,
                                           grid_2d({-0.1, 0.1}, 1e-4), nullptr),
                    ValidationError);
    CHECK_THROWS_AS(
        two_photon_spectrum(kEmitter, PhononMode::Off, g, nullptr),
        ValidationError);
}

TEST_CASE("sidepeak separation recovers the Rabi splitting") {
    const SpectrumGrid coarse = grid_1d(linspace(-0.12, 0.12, 241), 2.0 * kGamma);
    const SpectrumResult r =
        single_photon_spectrum(kEmitter, PhononMode::Off, coarse, nullptr);
    const PeakAnalysis coarse_peaks = extract_sidepeak_separation(r);
    CHECK(coarse_peaks.grid_step == doctest::Approx(0.001));
    CHECK(std::abs(coarse_peaks.omega_r - kRabi) < coarse_peaks.grid_step);

    // doubling the resolution moves the estimate by less than the coarse step
    const SpectrumGrid fine = grid_1d(linspace(-0.12, 0.12, 481), 2.0 * kGamma);
    const PeakAnalysis fine_peaks = extract_sidepeak_separation(
        single_photon_spectrum(kEmitter, PhononMode::Off, fine, nullptr));
    CHECK(std::abs(fine_peaks.omega_r - coarse_peaks.omega_r) <
          coarse_peaks.grid_step);
}

TEST_CASE("peak extraction fails loudly on featureless data") {
    SpectrumResult flat;
    flat.grid = grid_1d({1.0, 2.0, 3.0, 4.0, 5.0});
    flat.s1 = {1.0, 2.0, 3.0, 2.0, 1.0};  // a single hump
    flat.valid.assign(5, 1);
    CHECK_THROWS_AS(extract_sidepeak_separation(flat), PeaksNotFound);

    SpectrumResult tiny;
    tiny.grid = grid_1d({0.0, 1.0});
    tiny.s1 = {1.0, 2.0};
    tiny.valid = {1, 1};
    CHECK_THROWS_AS(extract_sidepeak_separation(tiny), ValidationError);
}
