#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "sensorspec/config.hpp"
#include "sensorspec/output.hpp"
#include "sensorspec/presets.hpp"
#include "sensorspec/spectra.hpp"
#include "sensorspec/version.hpp"

namespace fs = std::filesystem;
using namespace sensorspec;

namespace {

constexpr const char* kOutDirEnv = "SENSORSPEC_OUT";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int resolve_workers(int from_config, int from_cli) {
    int w = from_cli > 0 ? from_cli : from_config;
    if (w <= 0) w = int(std::thread::hardware_concurrency());
    return std::max(1, w);
}

std::string resolve_out_dir(const std::string& cli_out,
                            const std::string& config_out,
                            const std::string& fallback) {
    if (!cli_out.empty()) return cli_out;
    if (!config_out.empty()) return config_out;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return fallback;
}

void ensure_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + out_dir +
                      "': " + ec.message());
}

void echo_defaults(const RunConfig& cfg) {
    for (const auto& d : cfg.applied_defaults)
        std::cerr << "default applied: " << d << "\n";
}

void preflight_warnings(const RunConfig& cfg, std::size_t sensors_used) {
    for (std::size_t i = 0; i < sensors_used; ++i) {
        const auto& s = cfg.sensors[i];
        const double ratio =
            s.coupling * s.coupling / (s.linewidth * cfg.emitter.gamma);
        if (ratio >= 1e-2)
            std::cerr << "warning: sensor " << (i + 1)
                      << " back-action is not negligible (eps^2/(Gamma gamma) = "
                      << format_double(ratio) << ")\n";
    }
    if (cfg.sensors.size() > sensors_used)
        std::cerr << "note: sweep uses the first " << sensors_used << " of "
                  << cfg.sensors.size() << " configured sensors\n";
}

// Kernels are expensive to tabulate; reuse one across jobs that share the
// same bath and quadrature settings.
class KernelCache {
  public:
    const BathKernel* get(const RunConfig& cfg) {
        if (cfg.mode == PhononMode::Off) return nullptr;
        const std::array<double, 5> key = {cfg.bath.alpha, cfg.bath.nu_c,
                                           cfg.bath.temperature,
                                           cfg.quadrature.tau_max,
                                           cfg.quadrature.tolerance};
        if (!kernel_ || key != key_) {
            kernel_ = std::make_unique<BathKernel>(cfg.bath, cfg.quadrature);
            key_ = key;
            if (kernel_->truncation_warning())
                std::cerr << "warning: bath correlations have not decayed at "
                             "tau_max = "
                          << format_double(cfg.quadrature.tau_max)
                          << "; consider raising quadrature.tau_max\n";
        }
        return kernel_.get();
    }

  private:
    std::unique_ptr<BathKernel> kernel_;
    std::array<double, 5> key_{};
};

SpectrumGrid grid_from_config(const RunConfig& cfg) {
    SpectrumGrid grid;
    grid.axis1 = cfg.sweep.axis1.linspace();
    grid.linewidths = {cfg.sensors[0].linewidth};
    grid.couplings = {cfg.sensors[0].coupling};
    if (cfg.sweep.two_photon()) {
        grid.axis2 = cfg.sweep.axis2.linspace();
        grid.linewidths.push_back(cfg.sensors[1].linewidth);
        grid.couplings.push_back(cfg.sensors[1].coupling);
    }
    return grid;
}

// One engine invocation: 1D sweep or raw (unnormalized) 2D map.
SpectrumResult run_sweep(const RunConfig& cfg, int workers,
                         KernelCache& kernels) {
    const SpectrumGrid grid = grid_from_config(cfg);
    const BathKernel* kernel = kernels.get(cfg);
    if (grid.two_photon())
        return two_photon_spectrum(cfg.emitter, cfg.mode, grid, kernel,
                                   workers);
    return single_photon_spectrum(cfg.emitter, cfg.mode, grid, kernel,
                                  workers);
}

RunConfig axis_config(const RunConfig& map_cfg, int axis) {
    RunConfig cfg = map_cfg;
    cfg.sensors = {map_cfg.sensors[std::size_t(axis - 1)]};
    if (axis == 2) cfg.sweep.axis1 = map_cfg.sweep.axis2;
    cfg.sweep.axis2 = {0.0, 0.0, 0};
    return cfg;
}

bool axes_interchangeable(const RunConfig& cfg) {
    const auto& a1 = cfg.sweep.axis1;
    const auto& a2 = cfg.sweep.axis2;
    return a1.min == a2.min && a1.max == a2.max && a1.points == a2.points &&
           cfg.sensors[0].linewidth == cfg.sensors[1].linewidth &&
           cfg.sensors[0].coupling == cfg.sensors[1].coupling;
}

ManifestEntry manifest_entry(const std::string& label, const std::string& file,
                             const SpectrumResult& result,
                             const RunConfig& cfg) {
    ManifestEntry e;
    e.label = label;
    e.file = file;
    e.failed_points = result.provenance.failed_points;
    e.first_failure = result.provenance.first_failure;
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    e.config_hash = buf;
    e.config_text = serialize_config(cfg);
    return e;
}

void emit_result(const SpectrumResult& result, const RunConfig& cfg,
                 const std::string& path) {
    if (cfg.output.format == "json") emit_json(result, cfg, path);
    else emit_csv(result, path);
}

int cmd_run(const std::string& config_path, const std::string& cli_out,
            int cli_workers, const std::string& cli_format, bool cli_svg) {
    RunConfig cfg = parse_config(read_file(config_path));
    echo_defaults(cfg);
    if (!cli_format.empty()) cfg.output.format = cli_format;
    if (cli_svg) cfg.output.svg = true;
    const int workers = resolve_workers(cfg.workers, cli_workers);
    const std::size_t used = cfg.sweep.two_photon() ? 2 : 1;
    preflight_warnings(cfg, used);

    const std::string out_dir = resolve_out_dir(cli_out, cfg.output.path, ".");
    ensure_dir(out_dir);
    const std::string stem = fs::path(config_path).stem().string();

    KernelCache kernels;
    SpectrumResult result = run_sweep(cfg, workers, kernels);
    if (cfg.sweep.two_photon()) {
        const SpectrumResult ax1 =
            run_sweep(axis_config(cfg, 1), workers, kernels);
        if (axes_interchangeable(cfg)) {
            result = g2_normalize(result, ax1, ax1);
        } else {
            const SpectrumResult ax2 =
                run_sweep(axis_config(cfg, 2), workers, kernels);
            result = g2_normalize(result, ax1, ax2);
        }
    }

    const std::string data_file = stem + "." + cfg.output.format;
    emit_result(result, cfg, out_dir + "/" + data_file);
    std::vector<ManifestEntry> manifest = {
        manifest_entry(stem, data_file, result, cfg)};
    if (cfg.output.svg) {
        SvgStyle style;
        style.labels = {stem};
        render_svg(result, style, out_dir + "/" + stem + ".svg",
                   config_hash(cfg));
        manifest.push_back(manifest_entry(stem + " (svg)", stem + ".svg",
                                          result, cfg));
    }
    write_manifest(manifest, out_dir, stem);

    if (result.provenance.failed_points > 0) {
        std::cerr << "error: " << result.provenance.failed_points
                  << " grid points failed; first: "
                  << result.provenance.first_failure << "\n";
        return 2;
    }
    std::cerr << "wrote " << out_dir << "/" << data_file << "\n";
    return 0;
}

int cmd_preset(const std::string& name, const std::string& cli_out,
               int cli_workers, const std::string& cli_format, bool cli_svg) {
    PresetPlan plan = make_preset(name);
    const std::string out_dir =
        resolve_out_dir(cli_out, "", plan.name + "_out");
    ensure_dir(out_dir);

    KernelCache kernels;
    std::map<std::string, SpectrumResult> results;
    std::map<std::string, RunConfig> configs;
    std::vector<ManifestEntry> manifest;
    int exit_code = 0;

    for (auto& job : plan.jobs) {
        RunConfig cfg = job.config;
        if (!cli_format.empty()) cfg.output.format = cli_format;
        if (cli_svg) cfg.output.svg = true;
        const int workers = resolve_workers(cfg.workers, cli_workers);
        preflight_warnings(cfg, cfg.sweep.two_photon() ? 2 : 1);
        std::cerr << "running " << plan.name << "/" << job.label << " ("
                  << cfg.sweep.axis1.points
                  << (cfg.sweep.two_photon()
                          ? " x " + std::to_string(cfg.sweep.axis2.points)
                          : "")
                  << " points)\n";
        try {
            results.emplace(job.label, run_sweep(cfg, workers, kernels));
        } catch (const Error& e) {
            ManifestEntry entry;
            entry.label = job.label;
            entry.first_failure = e.what();
            entry.config_text = serialize_config(cfg);
            manifest.push_back(entry);
            write_manifest(manifest, out_dir, plan.name);
            std::cerr << "error in job '" << job.label << "': " << e.what()
                      << "\n";
            return 2;
        }
        configs.emplace(job.label, std::move(cfg));
    }

    // normalize every 2D map with its single-sensor axis partner
    for (auto& [label, result] : results) {
        if (!result.grid.two_photon()) continue;
        const std::string axis_label =
            label.substr(0, label.size() - 3) + "axis";
        const SpectrumResult& axis = results.at(axis_label);
        result = g2_normalize(result, axis, axis);
    }

    for (const auto& job : plan.jobs) {
        const RunConfig& cfg = configs.at(job.label);
        const SpectrumResult& result = results.at(job.label);
        const std::string data_file = job.label + "." + cfg.output.format;
        emit_result(result, cfg, out_dir + "/" + data_file);
        manifest.push_back(manifest_entry(job.label, data_file, result, cfg));
        if (result.provenance.failed_points > 0) exit_code = 2;
    }

    // figure renders: grouped overlays for 1D series, heatmaps for maps
    std::map<std::string, bool> in_group;
    for (const auto& group : plan.overlay_groups) {
        std::vector<const SpectrumResult*> series;
        SvgStyle style;
        for (const auto& label : group) {
            series.push_back(&results.at(label));
            style.labels.push_back(label);
            in_group[label] = true;
        }
        const std::string suffix = group.front().substr(
            group.front().find_last_of('_') + 1);
        const std::string file = plan.name + "_" + suffix + ".svg";
        render_svg_overlay(series, style, out_dir + "/" + file,
                           config_hash(configs.at(group.front())));
        manifest.push_back(manifest_entry(suffix + " (svg)", file,
                                          *series.front(),
                                          configs.at(group.front())));
    }
    for (const auto& job : plan.jobs) {
        const RunConfig& cfg = configs.at(job.label);
        if (!cfg.output.svg || in_group.count(job.label)) continue;
        const SpectrumResult& result = results.at(job.label);
        SvgStyle style;
        style.symlog = plan.symlog_render && result.grid.two_photon();
        style.labels = {job.label};
        const std::string file = job.label + ".svg";
        render_svg(result, style, out_dir + "/" + file, config_hash(cfg));
        manifest.push_back(
            manifest_entry(job.label + " (svg)", file, result, cfg));
    }

    write_manifest(manifest, out_dir, plan.name);
    if (exit_code != 0)
        std::cerr << "error: some grid points failed; see manifest.json\n";
    else
        std::cerr << "wrote " << manifest.size() << " files to " << out_dir
                  << "\n";
    return exit_code;
}

int cmd_validate(const std::string& config_path) {
    const RunConfig cfg = parse_config(read_file(config_path));
    std::cout << "OK\n";
    for (const auto& d : cfg.applied_defaults)
        std::cout << "default applied: " << d << "\n";
    std::cout << serialize_config(cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-filtered one- and two-photon emission spectra of "
                 "a driven two-level emitter with a structured phonon bath"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format;
    std::string preset_name;
    int workers = 0;
    bool svg = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--workers", workers, "worker thread count");
        sub->add_option("--format", format, "data file format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--svg", svg, "render SVG plots");
    };

    auto* run = app.add_subcommand("run", "run a configuration file");
    run->add_option("config", config_path, "configuration file")->required();
    add_common(run);

    auto* preset =
        app.add_subcommand("preset", "run a built-in figure preset");
    preset->add_option("name", preset_name, "preset name")
        ->required()
        ->check(CLI::IsMember(preset_names()));
    add_common(preset);

    auto* validate =
        app.add_subcommand("validate", "parse and validate a configuration");
    validate->add_option("config", config_path, "configuration file")
        ->required();

    app.add_subcommand("version", "print the engine version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed())
            return cmd_run(config_path, out_dir, workers, format, svg);
        if (preset->parsed())
            return cmd_preset(preset_name, out_dir, workers, format, svg);
        if (validate->parsed()) return cmd_validate(config_path);
        std::cout << "sensorspec " << engine_version << "\n";
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
}
