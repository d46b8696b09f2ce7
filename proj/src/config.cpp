#include "sensorspec/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "sensorspec/output.hpp"

namespace sensorspec {

namespace {

struct KeyLine {
    int number = 0;
    std::string key;
    std::string value;
    int value_column = 0;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

double parse_number(const KeyLine& ln) {
    const std::string& v = ln.value;
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ParseError("expected a number for '" + ln.key + "', got '" + v + "'",
                         ln.number, ln.value_column);
    return out;
}

int parse_int(const KeyLine& ln) {
    const std::string& v = ln.value;
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ParseError("expected an integer for '" + ln.key + "', got '" + v + "'",
                         ln.number, ln.value_column);
    return out;
}

bool parse_bool(const KeyLine& ln) {
    if (ln.value == "true") return true;
    if (ln.value == "false") return false;
    throw ParseError("expected true/false for '" + ln.key + "'", ln.number,
                     ln.value_column);
}

PhononMode parse_mode(const KeyLine& ln) {
    if (ln.value == "joint") return PhononMode::Joint;
    if (ln.value == "additive") return PhononMode::Additive;
    if (ln.value == "off") return PhononMode::Off;
    throw ValidationError("bath.mode must be joint, additive or off, got '" +
                          ln.value + "'");
}

}  // namespace

std::vector<double> AxisConfig::linspace() const {
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        out[std::size_t(i)] = min + (max - min) * double(i) / double(points - 1);
    return out;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    cfg.emitter.gamma = 0.0;  // required fields start invalid
    cfg.emitter.rabi = -1.0;
    cfg.sweep.axis1 = {0.0, 0.0, 0};
    cfg.sweep.axis2 = {0.0, 0.0, 0};

    bool seen_detuning = false, seen_mode = false, seen_bath = false;
    bool seen_quad_tau = false, seen_quad_tol = false;
    bool seen_format = false, seen_path = false, seen_svg = false;
    bool seen_workers = false;
    bool axis1_min = false, axis1_max = false, axis1_pts = false;
    bool axis2_min = false, axis2_max = false, axis2_pts = false;

    auto dispatch = [&](const std::string& section, const KeyLine& ln) {
        const std::string full = section + "." + ln.key;
        if (section == "emitter") {
            if (ln.key == "gamma") cfg.emitter.gamma = parse_number(ln);
            else if (ln.key == "rabi") cfg.emitter.rabi = parse_number(ln);
            else if (ln.key == "detuning") {
                cfg.emitter.detuning = parse_number(ln);
                seen_detuning = true;
            } else
                throw ValidationError("unknown key '" + full + "'");
        } else if (section == "bath") {
            if (ln.key == "alpha") cfg.bath.alpha = parse_number(ln);
            else if (ln.key == "nu_c") cfg.bath.nu_c = parse_number(ln);
            else if (ln.key == "temperature_K") cfg.bath.temperature = parse_number(ln);
            else if (ln.key == "mode") {
                cfg.mode = parse_mode(ln);
                seen_mode = true;
            } else
                throw ValidationError("unknown key '" + full + "'");
        } else if (section == "sensor") {
            // binds to the most recently opened [sensor] section
            auto& sensor = cfg.sensors.back();
            if (ln.key == "linewidth") sensor.linewidth = parse_number(ln);
            else if (ln.key == "coupling") sensor.coupling = parse_number(ln);
            else
                throw ValidationError("unknown key '" + full + "'");
        } else if (section == "sweep") {
            if (ln.key == "axis1_min") { cfg.sweep.axis1.min = parse_number(ln); axis1_min = true; }
            else if (ln.key == "axis1_max") { cfg.sweep.axis1.max = parse_number(ln); axis1_max = true; }
            else if (ln.key == "axis1_points") { cfg.sweep.axis1.points = parse_int(ln); axis1_pts = true; }
            else if (ln.key == "axis2_min") { cfg.sweep.axis2.min = parse_number(ln); axis2_min = true; }
            else if (ln.key == "axis2_max") { cfg.sweep.axis2.max = parse_number(ln); axis2_max = true; }
            else if (ln.key == "axis2_points") { cfg.sweep.axis2.points = parse_int(ln); axis2_pts = true; }
            else
                throw ValidationError("unknown key '" + full + "'");
        } else if (section == "quadrature") {
            if (ln.key == "tau_max") { cfg.quadrature.tau_max = parse_number(ln); seen_quad_tau = true; }
            else if (ln.key == "tolerance") { cfg.quadrature.tolerance = parse_number(ln); seen_quad_tol = true; }
            else
                throw ValidationError("unknown key '" + full + "'");
        } else if (section == "output") {
            if (ln.key == "format") {
                cfg.output.format = ln.value;
                seen_format = true;
            } else if (ln.key == "path") {
                cfg.output.path = ln.value;
                seen_path = true;
            } else if (ln.key == "svg") {
                cfg.output.svg = parse_bool(ln);
                seen_svg = true;
            } else
                throw ValidationError("unknown key '" + full + "'");
        } else if (section == "run") {
            if (ln.key == "workers") { cfg.workers = parse_int(ln); seen_workers = true; }
            else
                throw ValidationError("unknown key '" + full + "'");
        } else {
            throw ValidationError("unknown section [" + section + "]");
        }
    };

    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        std::string body = (hash == std::string::npos) ? raw : raw.substr(0, hash);
        const std::string t = trim(body);
        if (t.empty()) continue;

        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError("unterminated section header", line_no,
                                 int(body.find('[')) + 1);
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ParseError("empty section name", line_no,
                                 int(body.find('[')) + 1);
            if (section == "sensor") cfg.sensors.push_back({});
            if (section == "bath") seen_bath = true;
            continue;
        }

        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value'", line_no, 1);
        KeyLine ln;
        ln.number = line_no;
        ln.key = trim(body.substr(0, eq));
        ln.value = trim(body.substr(eq + 1));
        std::size_t vc = eq + 1;
        while (vc < body.size() && is_space(body[vc])) ++vc;
        ln.value_column = int(vc) + 1;
        if (ln.key.empty())
            throw ParseError("missing key before '='", line_no, 1);
        if (ln.value.empty())
            throw ParseError("missing value for '" + ln.key + "'", line_no,
                             ln.value_column);
        if (section.empty())
            throw ValidationError("key '" + ln.key + "' outside any section");
        dispatch(section, ln);
    }

    // required fields
    if (cfg.emitter.gamma <= 0.0)
        throw ValidationError("emitter.gamma must be set and > 0");
    if (cfg.emitter.rabi < 0.0)
        throw ValidationError("emitter.rabi must be set and >= 0");
    if (cfg.sensors.empty())
        throw ValidationError("configuration needs at least one sensor");
    for (std::size_t i = 0; i < cfg.sensors.size(); ++i) {
        if (cfg.sensors[i].linewidth <= 0.0)
            throw ValidationError("sensor " + std::to_string(i + 1) +
                                  ".linewidth must be > 0");
        if (cfg.sensors[i].coupling <= 0.0)
            throw ValidationError("sensor " + std::to_string(i + 1) +
                                  ".coupling must be > 0");
    }
    if (!(axis1_min && axis1_max && axis1_pts))
        throw ValidationError("sweep.axis1_min/axis1_max/axis1_points are required");
    if (cfg.sweep.axis1.points < 2)
        throw ValidationError("sweep.axis1_points must be >= 2");
    if (!(cfg.sweep.axis1.min < cfg.sweep.axis1.max))
        throw ValidationError("sweep.axis1_min must be < axis1_max");
    const bool any_axis2 = axis2_min || axis2_max || axis2_pts;
    if (any_axis2 && !(axis2_min && axis2_max && axis2_pts))
        throw ValidationError("sweep.axis2 needs min, max and points together");
    if (any_axis2) {
        if (cfg.sweep.axis2.points < 2)
            throw ValidationError("sweep.axis2_points must be >= 2");
        if (!(cfg.sweep.axis2.min < cfg.sweep.axis2.max))
            throw ValidationError("sweep.axis2_min must be < axis2_max");
        if (cfg.sensors.size() < 2)
            throw ValidationError("a two-photon sweep needs two sensors");
    }
    if (seen_bath) {
        cfg.bath.validate();
        cfg.has_bath = true;
    }
    if (!seen_mode) {
        cfg.mode = (cfg.has_bath && cfg.bath.alpha > 0.0) ? PhononMode::Joint
                                                          : PhononMode::Off;
        cfg.applied_defaults.push_back(std::string("bath.mode = ") +
                                       to_string(cfg.mode));
    }
    if (cfg.mode != PhononMode::Off && !cfg.has_bath)
        throw ValidationError("bath.mode " + std::string(to_string(cfg.mode)) +
                              " requires a [bath] section");
    if (cfg.quadrature.tau_max <= 0.0)
        throw ValidationError("quadrature.tau_max must be > 0");
    if (cfg.quadrature.tolerance <= 0.0)
        throw ValidationError("quadrature.tolerance must be > 0");
    if (cfg.workers < 0)
        throw ValidationError("run.workers must be >= 0");
    if (cfg.output.format != "csv" && cfg.output.format != "json")
        throw ValidationError("output.format must be csv or json");

    if (!seen_detuning) cfg.applied_defaults.push_back("emitter.detuning = 0");
    if (!seen_quad_tau) cfg.applied_defaults.push_back("quadrature.tau_max = 15");
    if (!seen_quad_tol) cfg.applied_defaults.push_back("quadrature.tolerance = 1e-09");
    if (!seen_format) cfg.applied_defaults.push_back("output.format = csv");
    if (!seen_path) cfg.applied_defaults.push_back("output.path = (CLI default)");
    if (!seen_svg) cfg.applied_defaults.push_back("output.svg = false");
    if (!seen_workers) cfg.applied_defaults.push_back("run.workers = 0 (auto)");
    return cfg;
}

std::string serialize_config(const RunConfig& config) {
    std::string out;
    auto kv = [&out](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    auto kvd = [&](const char* key, double v) { kv(key, format_double(v)); };

    out += "[emitter]\n";
    kvd("gamma", config.emitter.gamma);
    kvd("rabi", config.emitter.rabi);
    kvd("detuning", config.emitter.detuning);
    if (config.has_bath) {
        out += "[bath]\n";
        kvd("alpha", config.bath.alpha);
        kvd("nu_c", config.bath.nu_c);
        kvd("temperature_K", config.bath.temperature);
        kv("mode", to_string(config.mode));
    }
    for (const auto& s : config.sensors) {
        out += "[sensor]\n";
        kvd("linewidth", s.linewidth);
        kvd("coupling", s.coupling);
    }
    out += "[sweep]\n";
    kvd("axis1_min", config.sweep.axis1.min);
    kvd("axis1_max", config.sweep.axis1.max);
    kv("axis1_points", std::to_string(config.sweep.axis1.points));
    if (config.sweep.two_photon()) {
        kvd("axis2_min", config.sweep.axis2.min);
        kvd("axis2_max", config.sweep.axis2.max);
        kv("axis2_points", std::to_string(config.sweep.axis2.points));
    }
    out += "[quadrature]\n";
    kvd("tau_max", config.quadrature.tau_max);
    kvd("tolerance", config.quadrature.tolerance);
    out += "[output]\n";
    kv("format", config.output.format);
    if (!config.output.path.empty()) kv("path", config.output.path);
    kv("svg", config.output.svg ? "true" : "false");
    out += "[run]\n";
    kv("workers", std::to_string(config.workers));
    return out;
}

std::uint64_t config_hash(const RunConfig& config) {
    const std::string canon = serialize_config(config);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace sensorspec
