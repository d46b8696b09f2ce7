#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sensorspec/config.hpp"
#include "sensorspec/spectra.hpp"

namespace sensorspec {

// Shortest round-trip-exact decimal representation of a double.
std::string format_double(double value);

// CSV: 1D results as "omega_detuning,s1", 2D as "omega1,omega2,s2,g2",
// row-major, one data row per point; failed points leave their value fields
// empty. No metadata rows: provenance lives in the JSON/manifest outputs.
void emit_csv(const SpectrumResult& result, const std::string& path);

// JSON mirror of the CSV schema plus engine version, config hash and the
// full provenance record.
void emit_json(const SpectrumResult& result, const RunConfig& config,
               const std::string& path);

struct SvgStyle {
    bool symlog = false;  // symmetric-log color scale about g2 = 1
    double clamp = 2.0;   // linear-scale clamp
    int width = 860;
    int height = 560;
    std::vector<std::string> labels;  // series legends for overlay plots
};

// Self-contained SVG: log-scale line plot for 1D results, diverging heatmap
// (blue below 1, white at 1, red above) for 2D results. Invalid cells render
// gray. No external renderer involved.
void render_svg(const SpectrumResult& result, const SvgStyle& style,
                const std::string& path, std::uint64_t config_hash_value);

// Overlay variant for several 1D results sharing one axis.
void render_svg_overlay(const std::vector<const SpectrumResult*>& results,
                        const SvgStyle& style, const std::string& path,
                        std::uint64_t config_hash_value);

struct ManifestEntry {
    std::string label;
    std::string file;
    int failed_points = 0;
    std::string first_failure;
    std::string config_hash;  // hex, per-job
    std::string config_text;  // canonical serialization of the job config
};

// manifest.json next to the emitted files: engine version, produced files,
// per-job config (echoed and hashed) and any per-point failures. Contains
// nothing non-deterministic, so reruns are byte-identical.
void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::string& dir, const std::string& run_label);

}  // namespace sensorspec
