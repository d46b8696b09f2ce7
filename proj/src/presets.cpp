#include "sensorspec/presets.hpp"

#include "sensorspec/errors.hpp"

namespace sensorspec {

namespace {

constexpr double kGamma = 1.0 / 700.0;

// Shared drive and radiative rate for every preset.
EmitterParams preset_emitter() {
    EmitterParams e;
    e.detuning = 0.0;
    e.rabi = 0.05;
    e.gamma = kGamma;
    return e;
}

BathParams preset_bath() {
    BathParams b;
    b.alpha = 0.027;
    b.nu_c = 2.2;
    b.temperature = 4.0;
    return b;
}

SensorParams sensor(double linewidth) {
    SensorParams s;
    s.linewidth = linewidth;
    s.coupling = 1e-6;
    return s;
}

RunConfig base_config() {
    RunConfig cfg;
    cfg.emitter = preset_emitter();
    cfg.output.format = "csv";
    cfg.output.svg = true;
    return cfg;
}

// Single-photon sweep with one narrow sensor, one job per phonon mode.
void add_fig2_jobs(PresetPlan& plan, const char* grid_label, double lo,
                   double hi, int points) {
    for (PhononMode mode :
         {PhononMode::Joint, PhononMode::Additive, PhononMode::Off}) {
        RunConfig cfg = base_config();
        cfg.bath = preset_bath();
        cfg.has_bath = true;
        cfg.mode = mode;
        cfg.sensors = {sensor(1e-4)};
        cfg.sweep.axis1 = {lo, hi, points};
        plan.jobs.push_back(
            {std::string(to_string(mode)) + "_" + grid_label, cfg});
    }
}

// Two-photon map plus the single-sensor axis run used to normalize g2.
void add_map_jobs(PresetPlan& plan, const std::string& prefix, bool with_bath,
                  double lo, double hi, int points) {
    RunConfig map = base_config();
    if (with_bath) {
        map.bath = preset_bath();
        map.has_bath = true;
        map.mode = PhononMode::Joint;
    }
    map.sensors = {sensor(2.0 * kGamma), sensor(2.0 * kGamma)};
    map.sweep.axis1 = {lo, hi, points};
    map.sweep.axis2 = {lo, hi, points};
    plan.jobs.push_back({prefix + "map", map});

    RunConfig axis = map;
    axis.sensors = {sensor(2.0 * kGamma)};
    axis.sweep.axis2 = {0.0, 0.0, 0};
    axis.output.svg = false;  // normalization input, data file only
    plan.jobs.push_back({prefix + "axis", axis});
}

}  // namespace

PresetPlan make_preset(const std::string& name) {
    PresetPlan plan;
    plan.name = name;
    if (name == "fig2") {
        add_fig2_jobs(plan, "main", -2.5, 2.5, 2001);
        add_fig2_jobs(plan, "inset", -0.1, 0.1, 1601);
        plan.overlay_groups = {{"joint_main", "additive_main", "off_main"},
                               {"joint_inset", "additive_inset", "off_inset"}};
    } else if (name == "fig3a") {
        add_map_jobs(plan, "", false, -1.0, 1.0, 301);
    } else if (name == "fig3b") {
        add_map_jobs(plan, "", true, -1.0, 1.0, 301);
        // dense sub-window over the phonon-sideband triplet
        add_map_jobs(plan, "zoom_", true, -0.8, -0.2, 151);
    } else if (name == "figS2") {
        // fig3 maps again, rendered with the symmetric-log color scale
        add_map_jobs(plan, "flat_", false, -1.0, 1.0, 301);
        add_map_jobs(plan, "phonon_", true, -1.0, 1.0, 301);
        plan.symlog_render = true;
    } else {
        throw ValidationError("unknown preset '" + name +
                              "' (expected fig2, fig3a, fig3b or figS2)");
    }
    return plan;
}

std::vector<std::string> preset_names() {
    return {"fig2", "fig3a", "fig3b", "figS2"};
}

}  // namespace sensorspec
