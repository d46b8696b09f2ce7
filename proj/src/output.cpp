#include "sensorspec/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "sensorspec/errors.hpp"
#include "sensorspec/version.hpp"

namespace sensorspec {

namespace {

using Json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string hash_hex(std::uint64_t h) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

// fixed-point coordinate formatting keeps the SVG byte-deterministic
std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Rgb {
    int r, g, b;
};

std::string fill(const Rgb& c) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
    auto ch = [t](int x, int y) { return int(std::lround(x + (y - x) * t)); };
    return {ch(a.r, b.r), ch(a.g, b.g), ch(a.b, b.b)};
}

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kBlue{49, 54, 149};
constexpr Rgb kRed{165, 0, 38};
constexpr Rgb kGray{176, 176, 176};
constexpr double kSymlogThreshold = 0.1;

// diverging map about g2 = 1: white at 1, blue below, red above
Rgb diverging_color(double v, const SvgStyle& style, double dev_max) {
    const double dev = v - 1.0;
    double u;
    if (style.symlog) {
        const double denom = std::log1p(dev_max / kSymlogThreshold);
        u = denom > 0.0
                ? std::log1p(std::abs(dev) / kSymlogThreshold) / denom
                : 0.0;
    } else {
        const double width = std::max(style.clamp - 1.0, 1e-12);
        u = std::abs(dev) / width;
    }
    u = std::clamp(u, 0.0, 1.0);
    return lerp(kWhite, dev < 0.0 ? kBlue : kRed, u);
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#7f7f7f", "#2ca02c",
                          "#9467bd", "#8c564b"};

struct Frame {
    double left, top, plot_w, plot_h;
};

void svg_header(std::string& svg, const SvgStyle& style,
                std::uint64_t config_hash_value) {
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<!-- engine " + std::string(engine_version) + " config " +
           hash_hex(config_hash_value) + " -->\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(style.width) + "\" height=\"" +
           std::to_string(style.height) + "\" font-family=\"monospace\" " +
           "font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void frame_box(std::string& svg, const Frame& f) {
    svg += "<rect x=\"" + px(f.left) + "\" y=\"" + px(f.top) + "\" width=\"" +
           px(f.plot_w) + "\" height=\"" + px(f.plot_h) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
}

void x_ticks(std::string& svg, const Frame& f, double lo, double hi,
             const std::string& label) {
    for (int k = 0; k < 5; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        const double x = f.left + (v - lo) / (hi - lo) * f.plot_w;
        const double y0 = f.top + f.plot_h;
        svg += "<line x1=\"" + px(x) + "\" y1=\"" + px(y0) + "\" x2=\"" + px(x) +
               "\" y2=\"" + px(y0 + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + px(x) + "\" y=\"" + px(y0 + 18) +
               "\" text-anchor=\"middle\">" + tick_label(v) + "</text>\n";
    }
    svg += "<text x=\"" + px(f.left + f.plot_w / 2) + "\" y=\"" +
           px(f.top + f.plot_h + 36) + "\" text-anchor=\"middle\">" +
           xml_escape(label) + "</text>\n";
}

void y_label(std::string& svg, const Frame& f, const std::string& label) {
    const double x = f.left - 52;
    const double y = f.top + f.plot_h / 2;
    svg += "<text x=\"" + px(x) + "\" y=\"" + px(y) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 " + px(x) + " " +
           px(y) + ")\">" + xml_escape(label) + "</text>\n";
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, std::size_t(ptr - buf));
}

void emit_csv(const SpectrumResult& result, const std::string& path) {
    std::ofstream out = open_out(path);
    std::string body;
    const auto& g = result.grid;
    if (!g.two_photon()) {
        body = "omega_detuning,s1\n";
        for (std::size_t i = 0; i < g.axis1.size(); ++i) {
            body += format_double(g.axis1[i]);
            body += ',';
            if (result.valid[i]) body += format_double(result.s1[i]);
            body += '\n';
        }
    } else {
        body = "omega1,omega2,s2,g2\n";
        const std::size_t n2 = g.axis2.size();
        for (std::size_t i = 0; i < g.axis1.size(); ++i) {
            for (std::size_t j = 0; j < n2; ++j) {
                const std::size_t cell = i * n2 + j;
                body += format_double(g.axis1[i]);
                body += ',';
                body += format_double(g.axis2[j]);
                body += ',';
                if (result.valid[cell]) body += format_double(result.s2[cell]);
                body += ',';
                if (!result.g2.empty() && result.valid[cell])
                    body += format_double(result.g2[cell]);
                body += '\n';
            }
        }
    }
    out << body;
    finish(out, path);
}

void emit_json(const SpectrumResult& result, const RunConfig& config,
               const std::string& path) {
    Json doc;
    doc["engine_version"] = engine_version;
    doc["config_hash"] = hash_hex(config_hash(config));
    doc["config"] = serialize_config(config);

    const Provenance& p = result.provenance;
    Json prov;
    prov["emitter"] = {{"gamma", p.emitter.gamma},
                       {"rabi", p.emitter.rabi},
                       {"detuning", p.emitter.detuning}};
    if (p.has_bath)
        prov["bath"] = {{"alpha", p.bath.alpha},
                        {"nu_c", p.bath.nu_c},
                        {"temperature_K", p.bath.temperature}};
    else
        prov["bath"] = nullptr;
    prov["mode"] = to_string(p.mode);
    prov["quadrature"] = {{"tau_max", p.quadrature.tau_max},
                          {"tolerance", p.quadrature.tolerance}};
    prov["failed_points"] = p.failed_points;
    prov["first_failure"] = p.first_failure;
    doc["provenance"] = prov;

    const auto& g = result.grid;
    doc["grid"] = {{"axis1", g.axis1},
                   {"axis2", g.axis2},
                   {"linewidths", g.linewidths},
                   {"couplings", g.couplings}};

    auto column = [&result](const std::vector<double>& v) {
        Json arr = Json::array();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (result.valid[i]) arr.push_back(v[i]);
            else arr.push_back(nullptr);
        }
        return arr;
    };
    if (!g.two_photon()) {
        doc["s1"] = column(result.s1);
    } else {
        doc["s2"] = column(result.s2);
        if (!result.g2.empty()) doc["g2"] = column(result.g2);
    }

    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
    finish(out, path);
}

void render_svg_overlay(const std::vector<const SpectrumResult*>& results,
                        const SvgStyle& style, const std::string& path,
                        std::uint64_t config_hash_value) {
    if (results.empty()) throw ValidationError("no results to render");
    const auto& axis = results[0]->grid.axis1;
    for (const auto* r : results) {
        if (r->grid.two_photon())
            throw ValidationError("overlay render expects 1D results");
        if (r->grid.axis1 != axis)
            throw AxisMismatch("overlay series do not share one axis");
    }

    // shared log-scale range over every positive, valid point
    double ymax = 0.0, ymin_pos = 0.0;
    for (const auto* r : results)
        for (std::size_t i = 0; i < r->s1.size(); ++i)
            if (r->valid[i] && r->s1[i] > 0.0) {
                ymax = std::max(ymax, r->s1[i]);
                ymin_pos = ymin_pos == 0.0 ? r->s1[i]
                                           : std::min(ymin_pos, r->s1[i]);
            }
    int hi_exp = 0, lo_exp = -8;
    if (ymax > 0.0) {
        hi_exp = int(std::ceil(std::log10(ymax)));
        lo_exp = int(std::floor(
            std::log10(std::max(ymin_pos, ymax * 1e-8))));
        if (lo_exp >= hi_exp) lo_exp = hi_exp - 1;
    }

    const Frame f{70.0, 30.0, double(style.width) - 90.0,
                  double(style.height) - 80.0};
    auto x_of = [&](double v) {
        return f.left + (v - axis.front()) / (axis.back() - axis.front()) *
                            f.plot_w;
    };
    auto y_of = [&](double v) {
        const double l = std::clamp(std::log10(v), double(lo_exp),
                                    double(hi_exp));
        return f.top + f.plot_h * (hi_exp - l) / double(hi_exp - lo_exp);
    };

    std::string svg;
    svg_header(svg, style, config_hash_value);
    frame_box(svg, f);

    const int decade_step = std::max(1, (hi_exp - lo_exp + 7) / 8);
    for (int e = lo_exp; e <= hi_exp; e += decade_step) {
        const double y = y_of(std::pow(10.0, e));
        svg += "<line x1=\"" + px(f.left - 5) + "\" y1=\"" + px(y) +
               "\" x2=\"" + px(f.left) + "\" y2=\"" + px(y) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + px(f.left - 8) + "\" y=\"" + px(y + 4) +
               "\" text-anchor=\"end\">1e" + std::to_string(e) + "</text>\n";
    }
    x_ticks(svg, f, axis.front(), axis.back(), "omega - omega_L (1/ps)");
    y_label(svg, f, "S1 (arb. units)");

    for (std::size_t s = 0; s < results.size(); ++s) {
        const auto* r = results[s];
        const char* color = kPalette[s % std::size(kPalette)];
        std::string d;
        bool open = false;
        for (std::size_t i = 0; i < axis.size(); ++i) {
            if (!r->valid[i] || r->s1[i] <= 0.0) {
                open = false;  // explicit gap: break the polyline
                continue;
            }
            d += open ? " L " : " M ";
            d += px(x_of(axis[i])) + " " + px(y_of(r->s1[i]));
            open = true;
        }
        if (!d.empty())
            svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" +
                   std::string(color) + "\" stroke-width=\"1.5\"/>\n";
        const std::string label =
            s < style.labels.size() ? style.labels[s] : "series " + std::to_string(s + 1);
        const double ly = f.top + 16 + 16 * double(s);
        svg += "<line x1=\"" + px(f.left + f.plot_w - 150) + "\" y1=\"" +
               px(ly - 4) + "\" x2=\"" + px(f.left + f.plot_w - 125) +
               "\" y2=\"" + px(ly - 4) + "\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + px(f.left + f.plot_w - 118) + "\" y=\"" + px(ly) +
               "\">" + xml_escape(label) + "</text>\n";
    }
    svg += "</svg>\n";

    std::ofstream out = open_out(path);
    out << svg;
    finish(out, path);
}

void render_svg(const SpectrumResult& result, const SvgStyle& style,
                const std::string& path, std::uint64_t config_hash_value) {
    if (!result.grid.two_photon()) {
        render_svg_overlay({&result}, style, path, config_hash_value);
        return;
    }
    if (result.g2.empty())
        throw ValidationError("2D render needs a g2-normalized result");

    const auto& a1 = result.grid.axis1;
    const auto& a2 = result.grid.axis2;
    const std::size_t n1 = a1.size(), n2 = a2.size();

    double dev_max = 0.0;
    for (std::size_t c = 0; c < result.g2.size(); ++c)
        if (result.valid[c])
            dev_max = std::max(dev_max, std::abs(result.g2[c] - 1.0));

    const Frame f{70.0, 30.0, double(style.width) - 160.0,
                  double(style.height) - 80.0};
    const double cw = f.plot_w / double(n1);
    const double ch = f.plot_h / double(n2);

    std::string svg;
    svg_header(svg, style, config_hash_value);

    // cells, merging equal-colored horizontal runs to keep the file small
    for (std::size_t j = 0; j < n2; ++j) {
        const double y = f.top + f.plot_h - double(j + 1) * ch;
        std::size_t i = 0;
        while (i < n1) {
            const std::size_t cell = i * n2 + j;
            const std::string color =
                result.valid[cell] ? fill(diverging_color(result.g2[cell],
                                                          style, dev_max))
                                   : fill(kGray);
            std::size_t run = i + 1;
            while (run < n1) {
                const std::size_t c2 = run * n2 + j;
                const std::string color2 =
                    result.valid[c2] ? fill(diverging_color(result.g2[c2],
                                                            style, dev_max))
                                     : fill(kGray);
                if (color2 != color) break;
                ++run;
            }
            svg += "<rect x=\"" + px(f.left + double(i) * cw) + "\" y=\"" +
                   px(y) + "\" width=\"" + px(double(run - i) * cw + 0.3) +
                   "\" height=\"" + px(ch + 0.3) + "\" fill=\"" + color +
                   "\"/>\n";
            i = run;
        }
    }
    frame_box(svg, f);
    x_ticks(svg, f, a1.front(), a1.back(), "omega_1 - omega_L (1/ps)");
    y_label(svg, f, "omega_2 - omega_L (1/ps)");
    for (int k = 0; k < 5; ++k) {
        const double v = a2.front() + (a2.back() - a2.front()) * k / 4.0;
        const double y = f.top + f.plot_h -
                         (v - a2.front()) / (a2.back() - a2.front()) * f.plot_h;
        svg += "<line x1=\"" + px(f.left - 5) + "\" y1=\"" + px(y) +
               "\" x2=\"" + px(f.left) + "\" y2=\"" + px(y) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + px(f.left - 8) + "\" y=\"" + px(y + 4) +
               "\" text-anchor=\"end\">" + tick_label(v) + "</text>\n";
    }

    // colorbar: same color function sampled over the deviation range
    const double bar_x = f.left + f.plot_w + 24;
    const double dev_scale = style.symlog ? std::max(dev_max, kSymlogThreshold)
                                          : std::max(style.clamp - 1.0, 1e-12);
    const int steps = 64;
    for (int s = 0; s < steps; ++s) {
        const double frac = (double(s) + 0.5) / steps;       // 0 bottom, 1 top
        const double dev = (2.0 * frac - 1.0) * dev_scale;   // blue .. red
        const double y = f.top + f.plot_h * (1.0 - double(s + 1) / steps);
        svg += "<rect x=\"" + px(bar_x) + "\" y=\"" + px(y) + "\" width=\"18\"" +
               " height=\"" + px(f.plot_h / steps + 0.3) + "\" fill=\"" +
               fill(diverging_color(1.0 + dev, style, dev_max)) + "\"/>\n";
    }
    const double bar_vals[3] = {1.0 - dev_scale, 1.0, 1.0 + dev_scale};
    for (int k = 0; k < 3; ++k) {
        const double y = f.top + f.plot_h * (1.0 - k / 2.0);
        svg += "<text x=\"" + px(bar_x + 24) + "\" y=\"" + px(y + 4) +
               "\">" + tick_label(bar_vals[k]) + "</text>\n";
    }
    svg += "<text x=\"" + px(bar_x + 9) + "\" y=\"" + px(f.top - 10) +
           "\" text-anchor=\"middle\">g2</text>\n";
    svg += "</svg>\n";

    std::ofstream out = open_out(path);
    out << svg;
    finish(out, path);
}

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::string& dir, const std::string& run_label) {
    Json doc;
    doc["engine_version"] = engine_version;
    doc["run"] = run_label;
    Json files = Json::array();
    for (const auto& e : entries) {
        Json item;
        item["label"] = e.label;
        item["file"] = e.file;
        item["failed_points"] = e.failed_points;
        if (!e.first_failure.empty()) item["first_failure"] = e.first_failure;
        item["config_hash"] = e.config_hash;
        item["config"] = e.config_text;
        files.push_back(item);
    }
    doc["files"] = files;

    const std::string path = dir + "/manifest.json";
    std::ofstream out = open_out(path);
    out << doc.dump(2) << '\n';
    finish(out, path);
}

}  // namespace sensorspec
