#pragma once

// Flat key = value configuration with # comments. Unknown keys are errors:
// a silently ignored typo in an experiment config is worse than a failed run.

#include <cctype>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "traceinv/signal.hpp"
#include "traceinv/solver.hpp"

namespace traceinv {

struct RunConfig {
    // geometry + scenario
    double r = 1.0;
    double m_min = 0.125;
    double m_max = 0.6;
    double m_star = 0.4;
    double mu = 0.05;
    double lambda = 0.05;
    double lambda_max = 0.5;
    double t_min = -0.5;
    double t_max = 1.5;
    std::size_t n = 4001;
    double alpha = 0.05;
    double epsilon = 0.01;
    double eta = 0.0;
    std::string noise_mode = "white";  // white | source-filtered | two-event
    double noise_mb = 0.25;            // interfering-event slowness (two-event)
    unsigned long long seed = 0;
    std::string wavelet_family = "bump";  // bump | modulated-bump
    double wavelet_freq = 0.0;
    double wavelet_amplitude = 1.0;
    // sweeps and drivers
    double m_grid_min = 0.125;
    double m_grid_max = 0.6;
    double m_grid_step = 1e-3;
    std::string alpha_list = "0.05";
    std::string eta_list = "0.1,0.2,0.4";
    std::string noise_seeds = "1:20";
    std::size_t threads = 1;
    double invert_m0 = 0.55;
    double invert_alpha0 = 0.05;
    std::size_t invert_max_outer = 60;
    std::string out_dir = "out";
};

inline RunConfig default_config() { return RunConfig{}; }

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' needs a number, got '" + value + "'");
    }
    if (used != value.size())
        throw std::invalid_argument("config: trailing characters after number for key '" + key + "'");
    return v;
}

inline unsigned long long parse_uint(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' needs a non-negative integer, got '" +
                                    value + "'");
    }
    if (used != value.size())
        throw std::invalid_argument("config: trailing characters after integer for key '" + key +
                                    "'");
    return v;
}

}  // namespace detail

inline void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_uint;
    if (key == "r") c.r = parse_double(key, value);
    else if (key == "m_min") c.m_min = parse_double(key, value);
    else if (key == "m_max") c.m_max = parse_double(key, value);
    else if (key == "m_star") c.m_star = parse_double(key, value);
    else if (key == "mu") c.mu = parse_double(key, value);
    else if (key == "lambda") c.lambda = parse_double(key, value);
    else if (key == "lambda_max") c.lambda_max = parse_double(key, value);
    else if (key == "t_min") c.t_min = parse_double(key, value);
    else if (key == "t_max") c.t_max = parse_double(key, value);
    else if (key == "n") c.n = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "alpha") c.alpha = parse_double(key, value);
    else if (key == "epsilon") c.epsilon = parse_double(key, value);
    else if (key == "eta") c.eta = parse_double(key, value);
    else if (key == "noise_mode") c.noise_mode = value;
    else if (key == "noise_mb") c.noise_mb = parse_double(key, value);
    else if (key == "seed") c.seed = parse_uint(key, value);
    else if (key == "wavelet_family") c.wavelet_family = value;
    else if (key == "wavelet_freq") c.wavelet_freq = parse_double(key, value);
    else if (key == "wavelet_amplitude") c.wavelet_amplitude = parse_double(key, value);
    else if (key == "m_grid_min") c.m_grid_min = parse_double(key, value);
    else if (key == "m_grid_max") c.m_grid_max = parse_double(key, value);
    else if (key == "m_grid_step") c.m_grid_step = parse_double(key, value);
    else if (key == "alpha_list") c.alpha_list = value;
    else if (key == "eta_list") c.eta_list = value;
    else if (key == "noise_seeds") c.noise_seeds = value;
    else if (key == "threads") c.threads = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "invert_m0") c.invert_m0 = parse_double(key, value);
    else if (key == "invert_alpha0") c.invert_alpha0 = parse_double(key, value);
    else if (key == "invert_max_outer")
        c.invert_max_outer = static_cast<std::size_t>(parse_uint(key, value));
    else if (key == "out_dir") c.out_dir = value;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not of the form key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: empty key at line " + std::to_string(lineno));
        apply_config_entry(c, key, value);
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("config: cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

inline std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item = detail::trim(item);
        if (item.empty()) continue;
        out.push_back(detail::parse_double("list item", item));
    }
    if (out.empty()) throw std::invalid_argument("config: empty numeric list");
    return out;
}

/// "1:20" means the inclusive range, "3,5,9" an explicit list.
inline std::vector<unsigned long long> parse_seed_list(const std::string& text) {
    std::vector<unsigned long long> out;
    const std::size_t colon = text.find(':');
    if (colon != std::string::npos) {
        const unsigned long long lo = detail::parse_uint("seed range", detail::trim(text.substr(0, colon)));
        const unsigned long long hi = detail::parse_uint("seed range", detail::trim(text.substr(colon + 1)));
        if (hi < lo) throw std::invalid_argument("config: seed range upper end below lower end");
        for (unsigned long long v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item = detail::trim(item);
        if (item.empty()) continue;
        out.push_back(detail::parse_uint("seed list", item));
    }
    if (out.empty()) throw std::invalid_argument("config: empty seed list");
    return out;
}

inline NoiseMode parse_noise_mode(const std::string& text) {
    if (text == "white") return NoiseMode::white;
    if (text == "source-filtered" || text == "source_filtered") return NoiseMode::source_filtered;
    if (text == "two-event" || text == "two_event") return NoiseMode::two_event;
    throw std::invalid_argument("config: unknown noise_mode '" + text + "'");
}

inline Geometry make_geometry(const RunConfig& c) {
    Geometry g;
    g.r = c.r;
    g.m_min = c.m_min;
    g.m_max = c.m_max;
    g.lambda_max = c.lambda_max;
    g.grid = build_grid(c.t_min, c.t_max, c.n);
    return g;
}

inline AnalyticWavelet make_wavelet(const RunConfig& c) {
    if (c.wavelet_family == "bump") return make_bump(c.mu, c.wavelet_amplitude);
    if (c.wavelet_family == "modulated-bump" || c.wavelet_family == "modulated_bump")
        return make_modulated_bump(c.mu, c.wavelet_freq, c.wavelet_amplitude);
    throw std::invalid_argument("config: unknown wavelet_family '" + c.wavelet_family + "'");
}

inline Scenario make_scenario(const RunConfig& c) {
    Scenario s;
    s.geom = make_geometry(c);
    s.m_star = c.m_star;
    s.w_star = make_wavelet(c);
    s.lambda = c.lambda;
    s.epsilon = c.epsilon;
    s.noise.eta = c.eta;
    s.noise.seed = c.seed;
    s.noise.mode = parse_noise_mode(c.noise_mode);
    s.noise.m_b = c.noise_mb;
    require_valid_scenario(s);
    return s;
}

inline std::vector<double> make_m_grid(const RunConfig& c) {
    if (!(c.m_grid_step > 0.0) || !std::isfinite(c.m_grid_step))
        throw std::invalid_argument("config: m_grid_step must be positive");
    if (!(c.m_grid_max > c.m_grid_min))
        throw std::invalid_argument("config: m_grid range must be non-empty");
    // Tolerate roundoff in the step count and snap the last node onto the
    // configured endpoint, so decimal steps cover the intended range exactly.
    const std::size_t count =
        static_cast<std::size_t>(std::floor((c.m_grid_max - c.m_grid_min) / c.m_grid_step + 1e-6)) +
        1;
    if (count < 3) throw std::invalid_argument("config: m_grid needs at least 3 points");
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k)
        grid[k] = c.m_grid_min + static_cast<double>(k) * c.m_grid_step;
    if (std::abs(grid.back() - c.m_grid_max) <= 1e-6 * c.m_grid_step) grid.back() = c.m_grid_max;
    if (grid.back() > c.m_max || grid.front() < c.m_min)
        throw std::invalid_argument("config: m_grid leaves the admissible slowness range");
    return grid;
}

/// Full front-door validation of a parsed config; throws on the first
/// problem, otherwise returns the assembled scenario.
inline Scenario validate_config(const RunConfig& c) {
    const Scenario s = make_scenario(c);
    make_m_grid(c);
    parse_double_list(c.alpha_list);
    if (!(c.invert_alpha0 > 0.0))
        throw std::invalid_argument("config: invert_alpha0 must be positive");
    if (!slowness_in_range(s.geom, c.invert_m0))
        throw std::invalid_argument("config: invert_m0 outside the slowness range");
    return s;
}

}  // namespace traceinv
