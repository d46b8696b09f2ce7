#include "sensorspec/spectra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace sensorspec {

namespace {

void check_increasing(const std::vector<double>& axis, const char* name) {
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (!(axis[i] > axis[i - 1]))
            throw ValidationError(std::string(name) +
                                  " must be strictly increasing");
}

// static round-robin map: point i runs on worker i % workers, results land in
// pre-indexed slots, so the output is identical for any worker count
void parallel_map(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& body) {
    const int w = std::max(1, workers);
    if (w == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<bool> dead{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = std::size_t(t); i < n; i += std::size_t(w)) {
                    if (dead.load(std::memory_order_relaxed)) return;
                    body(i);
                }
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                dead.store(true, std::memory_order_relaxed);
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

Provenance make_provenance(const EmitterParams& emitter, PhononMode mode,
                           const BathKernel* kernel) {
    Provenance p;
    p.emitter = emitter;
    p.mode = mode;
    if (kernel != nullptr) {
        p.bath = kernel->params();
        p.has_bath = true;
        p.quadrature = kernel->quadrature();
    }
    return p;
}

void record_failure(SpectrumResult& result, std::mutex& m, const char* what) {
    std::scoped_lock lock(m);
    ++result.provenance.failed_points;
    if (result.provenance.first_failure.empty())
        result.provenance.first_failure = what;
}

}  // namespace

void SpectrumGrid::validate() const {
    if (axis1.size() < 2) throw ValidationError("axis1 needs at least 2 points");
    check_increasing(axis1, "axis1");
    if (!axis2.empty()) {
        if (axis2.size() < 2)
            throw ValidationError("axis2 needs at least 2 points");
        check_increasing(axis2, "axis2");
    }
    const std::size_t sensors = two_photon() ? 2 : 1;
    if (linewidths.size() < sensors || couplings.size() < sensors)
        throw ValidationError("grid must carry one linewidth and coupling per sensor");
}

double normal_ordered_moment(const Matrix& rho_ss, const CompositeModel& model,
                             const std::vector<int>& sensor_indices) {
    const int n = static_cast<int>(model.sensors.size());
    std::vector<bool> seen(std::size_t(n) + 1, false);
    Matrix prod = Matrix::Identity(model.dim, model.dim);
    for (int idx : sensor_indices) {
        if (idx < 1 || idx > n)
            throw ValidationError("sensor index " + std::to_string(idx) +
                                  " out of range [1, " + std::to_string(n) + "]");
        if (seen[std::size_t(idx)])
            throw DuplicateSensorIndex(
                "sensor index " + std::to_string(idx) +
                " repeated; :n^2: vanishes identically for a two-level sensor");
        seen[std::size_t(idx)] = true;
        const Matrix& vs = model.varsigma[std::size_t(idx) - 1];
        prod = (prod * (vs.adjoint() * vs)).eval();
    }
    return (rho_ss * prod).trace().real();
}

SpectrumResult single_photon_spectrum(const EmitterParams& emitter,
                                      PhononMode mode, const SpectrumGrid& grid,
                                      const BathKernel* kernel, int workers) {
    grid.validate();
    if (grid.two_photon())
        throw ValidationError("single_photon_spectrum takes a 1D grid");

    SpectrumResult result;
    result.grid = grid;
    result.mode = mode;
    result.provenance = make_provenance(emitter, mode, kernel);
    const std::size_t n = grid.axis1.size();
    result.s1.assign(n, 0.0);
    result.valid.assign(n, 0);

    const double gam = grid.linewidths[0];
    const double eps = grid.couplings[0];
    const double prefactor = gam / (2.0 * M_PI * eps * eps);

    std::mutex failures;
    parallel_map(n, workers, [&](std::size_t i) {
        try {
            const SensorParams sensor{grid.axis1[i], gam, eps};
            const auto model = build_composite(emitter, {sensor});
            const auto l = build_liouvillian(model, mode, kernel);
            const Matrix rho = steady_state(l);
            const double nv = normal_ordered_moment(rho, model, {1});
            result.s1[i] = prefactor * std::max(nv, 0.0);
            result.valid[i] = 1;
        } catch (const Error& e) {
            record_failure(result, failures, e.what());
        }
    });
    return result;
}

SpectrumResult two_photon_spectrum(const EmitterParams& emitter,
                                   PhononMode mode, const SpectrumGrid& grid,
                                   const BathKernel* kernel, int workers) {
    grid.validate();
    if (!grid.two_photon())
        throw ValidationError("two_photon_spectrum needs both axes");

    SpectrumResult result;
    result.grid = grid;
    result.mode = mode;
    result.provenance = make_provenance(emitter, mode, kernel);
    const std::size_t n1 = grid.axis1.size();
    const std::size_t n2 = grid.axis2.size();
    result.s2.assign(n1 * n2, 0.0);
    result.valid.assign(n1 * n2, 0);

    const double g1 = grid.linewidths[0], g2 = grid.linewidths[1];
    const double e1 = grid.couplings[0], e2 = grid.couplings[1];
    const double prefactor =
        g1 * g2 / (4.0 * M_PI * M_PI * e1 * e1 * e2 * e2);

    std::mutex failures;
    parallel_map(n1 * n2, workers, [&](std::size_t cell) {
        const std::size_t i = cell / n2;  // row-major: axis1 outer
        const std::size_t j = cell % n2;
        try {
            const SensorParams s1{grid.axis1[i], g1, e1};
            const SensorParams s2{grid.axis2[j], g2, e2};
            const auto model = build_composite(emitter, {s1, s2});
            const auto l = build_liouvillian(model, mode, kernel);
            const Matrix rho = steady_state(l);
            const double nv = normal_ordered_moment(rho, model, {1, 2});
            result.s2[cell] = prefactor * std::max(nv, 0.0);
            result.valid[cell] = 1;
        } catch (const Error& e) {
            record_failure(result, failures, e.what());
        }
    });
    return result;
}

SpectrumResult g2_normalize(const SpectrumResult& s2,
                            const SpectrumResult& s1_axis1,
                            const SpectrumResult& s1_axis2) {
    if (s2.grid.axis1 != s1_axis1.grid.axis1 ||
        s2.grid.axis2 != s1_axis2.grid.axis1)
        throw AxisMismatch("g2_normalize: denominator axes differ from the map axes");
    if (s1_axis1.grid.linewidths[0] != s2.grid.linewidths[0] ||
        s1_axis2.grid.linewidths[0] != s2.grid.linewidths[1])
        throw AxisMismatch("g2_normalize: denominator linewidths differ from the map sensors");

    SpectrumResult out = s2;
    const std::size_t n1 = out.grid.axis1.size();
    const std::size_t n2 = out.grid.axis2.size();
    out.g2.assign(n1 * n2, 0.0);
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const std::size_t cell = i * n2 + j;
            if (!out.valid[cell] || !s1_axis1.valid[i] || !s1_axis2.valid[j]) {
                out.valid[cell] = 0;
                continue;
            }
            const double denom = s1_axis1.s1[i] * s1_axis2.s1[j];
            if (!(denom > 1e-300)) {  // underflow floor, never divided
                out.valid[cell] = 0;
                continue;
            }
            out.g2[cell] = out.s2[cell] / denom;
        }
    }
    return out;
}

SpectrumResult qrt_reference_spectrum(const EmitterParams& emitter,
                                      PhononMode mode, const SpectrumGrid& grid,
                                      const BathKernel* kernel) {
    grid.validate();
    if (grid.two_photon())
        throw ValidationError("qrt_reference_spectrum takes a 1D grid");
    if (mode == PhononMode::Joint)
        throw ValidationError(
            "the regression reference cannot run in joint mode; that "
            "construction is exactly what it lacks");

    const auto model = build_composite(emitter, {});
    const auto l = build_liouvillian(model, mode, kernel);
    const Matrix rho_ss = steady_state(l);

    const double gam_filter = grid.linewidths[0];

    // stationary correlation <sigma^dag(tau) sigma(0)>: propagate sigma
    // rho_ss and trace against sigma^dag
    const Complex s_ss = (model.sigma * rho_ss).trace();
    const Complex sdag_ss = (model.sigma.adjoint() * rho_ss).trace();
    const Complex g_coh = sdag_ss * s_ss;  // long-time (coherent) plateau

    const double dt = 0.05;
    const double t_max = 14.0 / emitter.gamma;
    std::size_t nsteps = static_cast<std::size_t>(std::ceil(t_max / dt));
    if (nsteps % 2 == 1) ++nsteps;  // composite Simpson needs an even count

    const Matrix propagator = expm(l.matrix * dt);
    Vector x = vec(model.sigma * rho_ss);
    std::vector<Complex> g_inc(nsteps + 1);
    for (std::size_t k = 0; k <= nsteps; ++k) {
        g_inc[k] = (model.sigma.adjoint() * devec(x)).trace() - g_coh;
        if (k < nsteps) x = propagator * x;
    }

    SpectrumResult result;
    result.grid = grid;
    result.mode = mode;
    result.provenance = make_provenance(emitter, mode, kernel);
    const std::size_t n = grid.axis1.size();
    result.s1.assign(n, 0.0);
    result.valid.assign(n, 1);

    std::vector<double> simpson(nsteps + 1, dt / 3.0);
    for (std::size_t k = 1; k < nsteps; ++k)
        simpson[k] *= (k % 2 == 1) ? 4.0 : 2.0;

    for (std::size_t i = 0; i < n; ++i) {
        const double w = grid.axis1[i];
        Complex integral{0.0, 0.0};
        for (std::size_t k = 0; k <= nsteps; ++k) {
            const double t = double(k) * dt;
            integral += simpson[k] *
                        std::polar(std::exp(-0.5 * gam_filter * t), -w * t) *
                        g_inc[k];
        }
        integral += g_coh / Complex(0.5 * gam_filter, w);
        result.s1[i] = std::max(integral.real() / M_PI, 0.0);
    }
    return result;
}

PeakAnalysis extract_sidepeak_separation(const SpectrumResult& result) {
    const auto& axis = result.grid.axis1;
    const auto& vals = result.s1;
    if (vals.size() != axis.size() || axis.size() < 3)
        throw ValidationError("peak extraction needs a computed 1D spectrum");

    double top = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (result.valid[i]) top = std::max(top, vals[i]);
    const double floor = 0.01 * top;  // prominence floor against ripple

    struct Peak {
        double position;
        double height;
    };
    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < vals.size(); ++i) {
        if (!result.valid[i - 1] || !result.valid[i] || !result.valid[i + 1])
            continue;
        if (vals[i] > vals[i - 1] && vals[i] > vals[i + 1] && vals[i] >= floor) {
            const double dx = axis[i + 1] - axis[i];
            const double denom = vals[i - 1] - 2.0 * vals[i] + vals[i + 1];
            const double shift =
                (denom != 0.0)
                    ? 0.5 * dx * (vals[i - 1] - vals[i + 1]) / denom
                    : 0.0;
            peaks.push_back({axis[i] + shift, vals[i]});
        }
    }
    if (peaks.size() < 3)
        throw PeaksNotFound("found " + std::to_string(peaks.size()) +
                            " peaks, need at least 3");

    std::vector<Peak> tallest = peaks;
    std::sort(tallest.begin(), tallest.end(),
              [](const Peak& a, const Peak& b) { return a.height > b.height; });
    tallest.resize(3);
    std::sort(tallest.begin(), tallest.end(),
              [](const Peak& a, const Peak& b) { return a.position < b.position; });

    PeakAnalysis out;
    out.grid_step = axis[1] - axis[0];
    for (const auto& p : peaks) out.positions.push_back(p.position);
    std::sort(out.positions.begin(), out.positions.end());
    out.omega_r = 0.5 * ((tallest[1].position - tallest[0].position) +
                         (tallest[2].position - tallest[1].position));
    return out;
}

}  // namespace sensorspec
