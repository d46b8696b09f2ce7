#include "sensorspec/bath.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <mutex>

namespace sensorspec {

namespace {

// coth with the small-argument series to avoid 1/0 at the integrand origin
double coth(double x) {
    if (std::abs(x) < 1e-6) return 1.0 / x + x / 3.0;
    return 1.0 / std::tanh(x);
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975362, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975362};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

}  // namespace

void BathParams::validate() const {
    if (alpha < 0.0) throw ValidationError("bath.alpha must be >= 0");
    if (nu_c <= 0.0) throw ValidationError("bath.nu_c must be > 0");
    if (temperature <= 0.0)
        throw ValidationError("bath.temperature_K must be > 0");
}

double spectral_density(double nu, const BathParams& params) {
    if (nu < 0.0) throw NegativeFrequency("spectral_density requires nu >= 0");
    const double r = nu / params.nu_c;
    return params.alpha * nu * nu * nu * std::exp(-r * r);
}

double bose_occupation(double nu, double beta_inv) {
    if (nu <= 0.0) throw NonPositiveFrequency("bose_occupation requires nu > 0");
    return 1.0 / std::expm1(nu / beta_inv);
}

Complex bath_correlation(double tau, const BathParams& params, double rel_tol) {
    if (params.alpha == 0.0) return {0.0, 0.0};
    const double beta_inv = params.beta_inv();
    // the Gaussian cutoff kills the integrand far below this bound
    const double nu_hi = 10.0 * params.nu_c;

    using boost::math::quadrature::gauss_kronrod;
    double err_re = 0.0, err_im = 0.0;

    const double re = gauss_kronrod<double, 15>::integrate(
        [&](double nu) {
            if (nu == 0.0) return 0.0;
            return spectral_density(nu, params) *
                   coth(0.5 * nu / beta_inv) * std::cos(nu * tau);
        },
        0.0, nu_hi, 15, rel_tol, &err_re);

    double im = 0.0;
    if (tau != 0.0) {
        im = -gauss_kronrod<double, 15>::integrate(
            [&](double nu) {
                return spectral_density(nu, params) * std::sin(nu * tau);
            },
            0.0, nu_hi, 15, rel_tol, &err_im);
    }

    // At large tau the integral is cancellation-dominated and tiny while the
    // integrand is not, so pointwise relative accuracy is unattainable and
    // meaningless; judge the error against the kernel's characteristic scale
    // C(0) ~ alpha nu_c^4 instead.
    const double scale = std::max({std::abs(re), std::abs(im),
                                   params.alpha * std::pow(params.nu_c, 4)});
    if (err_re > rel_tol * scale * 10.0 || err_im > rel_tol * scale * 10.0)
        throw QuadratureNonConvergence(
            "bath_correlation error estimate " +
            std::to_string(std::max(err_re, err_im)) + " at tau = " +
            std::to_string(tau));
    return {re, im};
}

double polaron_shift(const BathParams& params) {
    return -params.alpha * std::sqrt(M_PI) * params.nu_c * params.nu_c *
           params.nu_c / 4.0;
}

BathKernel::BathKernel(const BathParams& params, QuadratureSpec quad)
    : params_(params), quad_(quad) {
    params_.validate();
    if (quad_.tau_max <= 0.0)
        throw ValidationError("quadrature.tau_max must be > 0");
    if (quad_.tolerance <= 0.0)
        throw ValidationError("quadrature.tolerance must be > 0");
    if (params_.alpha == 0.0) return;  // F is identically zero

    // Tabulate C(tau) on composite Gauss-Legendre panels, doubling the panel
    // count until F settles on a probe set spanning the frequencies the rate
    // operator will ask for. All later evaluations reuse the settled table.
    const double b = params_.beta_inv();
    const std::array<double, 9> probes = {0.0,
                                          0.5 * params_.nu_c,
                                          -0.5 * params_.nu_c,
                                          params_.nu_c,
                                          -params_.nu_c,
                                          3.0 * params_.nu_c,
                                          -3.0 * params_.nu_c,
                                          b,
                                          -b};

    auto tabulate = [&](int panels, std::vector<double>& nodes,
                        std::vector<double>& weights,
                        std::vector<Complex>& values) {
        nodes.clear();
        weights.clear();
        values.clear();
        nodes.reserve(std::size_t(panels) * 8);
        weights.reserve(std::size_t(panels) * 8);
        const double h = quad_.tau_max / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = (p + 0.5) * h;
            for (int k = 0; k < 8; ++k) {
                nodes.push_back(mid + 0.5 * h * kGlNodes[k]);
                weights.push_back(0.5 * h * kGlWeights[k]);
            }
        }
        values.reserve(nodes.size());
        for (double t : nodes)
            values.push_back(bath_correlation(t, params_, 1e-10));
    };

    auto probe_f = [&](const std::vector<double>& nodes,
                       const std::vector<double>& weights,
                       const std::vector<Complex>& values, double lambda) {
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * std::polar(1.0, lambda * nodes[i]) * values[i];
        return acc;
    };

    int panels = 64;
    const int max_panels = 2048;
    tabulate(panels, nodes_, weights_, c_tau_);
    while (true) {
        std::vector<double> nodes2, weights2;
        std::vector<Complex> values2;
        tabulate(2 * panels, nodes2, weights2, values2);
        double worst = 0.0;
        for (double lam : probes)
            worst = std::max(worst,
                             std::abs(probe_f(nodes_, weights_, c_tau_, lam) -
                                      probe_f(nodes2, weights2, values2, lam)));
        nodes_.swap(nodes2);
        weights_.swap(weights2);
        c_tau_.swap(values2);
        panels *= 2;
        if (worst <= quad_.tolerance) break;
        if (panels >= max_panels)
            throw QuadratureNonConvergence(
                "half_fourier did not settle below tolerance " +
                std::to_string(quad_.tolerance) + "; residual " +
                std::to_string(worst) + " at " + std::to_string(panels) +
                " panels");
    }

    const double c0 = std::abs(bath_correlation(0.0, params_, 1e-10));
    const double ctail = std::abs(bath_correlation(quad_.tau_max, params_, 1e-10));
    truncation_warning_ = (c0 > 0.0 && ctail > 1e-3 * c0);
}

Complex BathKernel::evaluate(double lambda) const {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        acc += weights_[i] * std::polar(1.0, lambda * nodes_[i]) * c_tau_[i];
    return acc;
}

Complex BathKernel::half_fourier(double lambda) const {
    if (params_.alpha == 0.0) return {0.0, 0.0};
    const auto key = static_cast<std::int64_t>(std::llround(lambda * 1e12));
    {
        std::shared_lock lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    // evaluate at the quantized representative so the stored value depends
    // only on the key, never on which caller computed it first
    const Complex value = evaluate(double(key) * 1e-12);
    std::unique_lock lock(mutex_);
    if (cache_.size() >= kMaxCacheEntries) cache_.clear();
    cache_.try_emplace(key, value);
    return value;
}

std::size_t BathKernel::cache_size() const {
    std::shared_lock lock(mutex_);
    return cache_.size();
}

}  // namespace sensorspec
