#pragma once

#include <string>
#include <vector>

#include "sensorspec/spectra.hpp"

namespace sensorspec {

struct AxisConfig {
    double min = 0.0;
    double max = 0.0;
    int points = 0;

    std::vector<double> linspace() const;
};

struct SweepConfig {
    AxisConfig axis1;
    AxisConfig axis2;       // points == 0 means single-photon sweep
    bool two_photon() const { return axis2.points > 0; }
};

struct OutputConfig {
    std::string format = "csv";  // csv | json
    std::string path = "";       // empty: resolved by the CLI
    bool svg = false;
};

struct RunConfig {
    EmitterParams emitter;
    BathParams bath;
    bool has_bath = false;
    PhononMode mode = PhononMode::Off;
    std::vector<SensorParams> sensors;  // detunings come from the sweep
    SweepConfig sweep;
    QuadratureSpec quadrature;
    OutputConfig output;
    int workers = 0;  // 0 = hardware concurrency

    // every default the parser applied, echoed to the run log
    std::vector<std::string> applied_defaults;
};

// Parse the key = value / [section] configuration format. Unknown sections
// and keys are rejected; syntax errors carry line and column. The returned
// config is fully validated.
RunConfig parse_config(const std::string& text);

// Canonical serialization; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

// FNV-1a over the canonical serialization; embedded in emitted files.
std::uint64_t config_hash(const RunConfig& config);

}  // namespace sensorspec
