#pragma once

#include <string>
#include <vector>

#include "sensorspec/config.hpp"

namespace sensorspec {

// One engine invocation inside a preset: a label (used in file names and
// series legends) plus the config to run.
struct PresetJob {
    std::string label;
    RunConfig config;
};

struct PresetPlan {
    std::string name;
    std::vector<PresetJob> jobs;
    // jobs whose SVGs use the symmetric-log color scale instead of the
    // default linear scale clamped at 2
    bool symlog_render = false;
    // 1D jobs grouped into overlay plots: each group lists job labels that
    // share one SVG
    std::vector<std::vector<std::string>> overlay_groups;
};

// fig2  - single-photon Mollow/PSB curves (joint, additive, off) on the wide
//         grid plus a dense inset window around the triplet;
// fig3a - two-photon correlation map without phonons;
// fig3b - two-photon correlation map with phonons plus a dense sub-window
//         around the sideband triplet;
// figS2 - fig3 maps re-rendered with the symmetric-log color scale.
PresetPlan make_preset(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace sensorspec
