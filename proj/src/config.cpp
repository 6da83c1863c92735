#include "platelab/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace platelab {

namespace {

constexpr std::array kKnownKeys = {
    "geometry.r0", "geometry.r1", "geometry.x0",
    "plate.mu",
    "fem.elements", "fem.modes",
    "feedback.beta1", "feedback.beta2", "feedback.gamma1", "feedback.gamma2",
    "feedback.tau1", "feedback.tau2",
    "delay.n_rho1", "delay.n_rho2",
    "system",
    "seed",
    "sim.t_end", "sim.dt", "sim.checkpoint_every",
    "sweep.lambda_min", "sweep.lambda_max", "sweep.count", "sweep.opnorm",
    "mgc.samples",
    "spectrum.count",
    "teigs.count", "teigs.fine_elements",
    "quasimode.count",
    "design.k", "design.l", "design.which_eig", "design.branch",
    "verify.case", "verify.periods", "verify.tau1_index", "verify.tau2_index",
    "verify.min_cells",
    "fit.kind", "fit.input", "fit.t_start", "fit.t_end",
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    cfg.text_ = text;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
            throw ConfigError("unknown config key: " + key);
        if (cfg.kv_.count(key)) throw ConfigError("duplicate config key: " + key);
        cfg.kv_[key] = val;
    }
    return cfg;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config key " + key + ": not a number: " + it->second);
    }
}

int Config::get_int(const std::string& key, int fallback) const {
    return int(get_long(key, fallback));
}

long long Config::get_long(const std::string& key, long long fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        size_t pos = 0;
        const long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config key " + key + ": not an integer: " + it->second);
    }
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::string v = trim(it->second);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw ConfigError("config key " + key + ": expected [a, b, ...]");
    v = v.substr(1, v.size() - 2);
    std::vector<double> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ConfigError("config key " + key + ": bad list entry: " + item);
        }
    }
    return out;
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      const std::vector<int>& fallback) const {
    std::vector<double> dd =
        get_double_list(key, std::vector<double>(fallback.begin(), fallback.end()));
    std::vector<int> out;
    out.reserve(dd.size());
    for (double d : dd) out.push_back(int(d));
    return out;
}

}  // namespace platelab
