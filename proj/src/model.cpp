#include "sensorspec/model.hpp"

namespace sensorspec {

namespace {

Matrix two_level_lowering() {
    Matrix s = Matrix::Zero(2, 2);
    s(0, 1) = 1.0;  // |g><e| with basis 0 = ground, 1 = excited
    return s;
}

// op acting on tensor factor `pos` of n_factors two-level factors
Matrix lift(const Matrix& op, int pos, int n_factors) {
    Matrix out = (pos == 0) ? op : Matrix::Identity(2, 2);
    for (int f = 1; f < n_factors; ++f)
        out = kron(out, (f == pos) ? op : Matrix::Identity(2, 2));
    return out;
}

}  // namespace

void EmitterParams::validate() const {
    if (gamma <= 0.0) throw ValidationError("emitter.gamma must be > 0");
    if (rabi < 0.0) throw ValidationError("emitter.rabi must be >= 0");
}

void SensorParams::validate() const {
    if (linewidth <= 0.0) throw ValidationError("sensor.linewidth must be > 0");
    if (coupling <= 0.0) throw ValidationError("sensor.coupling must be > 0");
}

CompositeModel build_composite(const EmitterParams& emitter,
                               const std::vector<SensorParams>& sensors) {
    emitter.validate();
    for (const auto& s : sensors) s.validate();
    const int n = static_cast<int>(sensors.size());
    if (n > 3)
        throw TooManySensors("at most 3 sensors supported, got " +
                             std::to_string(n));

    CompositeModel m;
    m.emitter = emitter;
    m.sensors = sensors;
    const int nf = n + 1;
    m.dim = 1 << nf;

    const Matrix s2 = two_level_lowering();
    const Matrix n2 = s2.adjoint() * s2;  // |e><e|
    const Matrix sx = s2 + s2.adjoint();

    m.sigma = lift(s2, 0, nf);
    m.coupling_a = lift(n2, 0, nf);

    m.h_prime = emitter.detuning * m.coupling_a +
                0.5 * emitter.rabi * lift(sx, 0, nf);

    m.collapse.emplace_back(m.sigma, emitter.gamma);
    for (int i = 0; i < n; ++i) {
        const Matrix vs = lift(s2, i + 1, nf);
        m.varsigma.push_back(vs);
        m.h_prime += sensors[i].detuning * lift(n2, i + 1, nf);
        m.h_prime += sensors[i].coupling *
                     (m.sigma.adjoint() * vs + m.sigma * vs.adjoint());
        m.collapse.emplace_back(vs, sensors[i].linewidth);

        const double ratio = sensors[i].coupling * sensors[i].coupling /
                             (sensors[i].linewidth * emitter.gamma);
        if (ratio >= 1e-2) m.weak_sensor_warning = true;
    }
    return m;
}

EmitterParams resonant_drive(double omega0, const BathParams& bath,
                             double rabi, double gamma) {
    bath.validate();
    EmitterParams p;
    p.detuning = 0.0;
    p.rabi = rabi;
    p.gamma = gamma;
    p.omega0_prime = omega0 + polaron_shift(bath);
    return p;
}

}  // namespace sensorspec
