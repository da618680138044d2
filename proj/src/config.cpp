#include "attractorlab/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace attractorlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("");
        } catch (...) {
            throw ConfigError("bad numeric list entry for key '" + key + "': " + item);
        }
    }
    return out;
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("bad numeric value for key '" + key + "': " + v);
    }
}

long parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("bad integer value for key '" + key + "': " + v);
    }
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"experiment.kind", [](RunConfig& c, const std::string& v, const std::string&) { c.kind = v; }},
        {"experiment.seed",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.seed = std::uint64_t(parse_int(v, k));
         }},
        {"experiment.out", [](RunConfig& c, const std::string& v, const std::string&) { c.out = v; }},
        {"drift.kind",
         [](RunConfig& c, const std::string& v, const std::string&) { c.drift_kind = v; }},
        {"drift.alpha",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.alpha = parse_double(v, k); }},
        {"drift.eta",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.eta = parse_double(v, k); }},
        {"drift.mu",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.mu = parse_double(v, k); }},
        {"drift.sigma",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.sigma = parse_double(v, k); }},
        {"drift.reaction_slope",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.reaction_slope = parse_double(v, k);
         }},
        {"noise.modes",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.modes = int(parse_int(v, k)); }},
        {"noise.gamma",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.gamma = parse_double(v, k); }},
        {"noise.q0",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.q0 = parse_double(v, k); }},
        {"noise.t_min",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.t_min = parse_double(v, k); }},
        {"noise.t_max",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.t_max = parse_double(v, k); }},
        {"noise.dt",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.noise_dt = parse_double(v, k); }},
        {"noise.burn_in",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.burn_in = parse_double(v, k); }},
        {"solver.n",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.mesh_n = int(parse_int(v, k)); }},
        {"solver.length",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.length = parse_double(v, k); }},
        {"solver.dt",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.solver_dt = parse_double(v, k); }},
        {"solver.newton_tol",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.newton_tol = parse_double(v, k);
         }},
        {"solver.newton_max",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.newton_max = int(parse_int(v, k));
         }},
        {"params.pullback_tol",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.pullback_tol = parse_double(v, k);
         }},
        {"params.starts",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.starts = parse_list(v, k); }},
        {"params.ensemble",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ensemble = int(parse_int(v, k));
         }},
        {"params.delta_grid",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.delta_grid = parse_list(v, k);
         }},
        {"params.t_grid",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.t_grid = parse_list(v, k); }},
        {"params.h_grid",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.h_grid = parse_list(v, k); }},
        {"params.eps",
         [](RunConfig& c, const std::string& v, const std::string& k) { c.eps = parse_double(v, k); }},
        {"params.moment_k",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.moment_k = int(parse_int(v, k));
         }},
        {"params.ball_radius",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.ball_radius = parse_double(v, k);
         }},
        {"params.entropy_s0",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.entropy_s0 = parse_double(v, k);
         }},
        {"params.samples",
         [](RunConfig& c, const std::string& v, const std::string& k) {
             c.samples = int(parse_int(v, k));
         }},
    };

    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "drift" && section != "noise" &&
                section != "solver" && section != "params")
                throw ConfigError("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError("key '" + key + "' outside any section");
        const std::string full = section + "." + key;
        const auto it = setters.find(full);
        if (it == setters.end()) throw ConfigError("unknown key '" + full + "'");
        it->second(cfg, value, full);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate(const RunConfig& cfg) {
    const std::vector<std::string> kinds = {"stationary", "flow",    "absorb", "collapse",
                                            "sync",       "entropy", "oracle"};
    if (std::find(kinds.begin(), kinds.end(), cfg.kind) == kinds.end())
        throw ConfigError("experiment.kind must be one of stationary|flow|absorb|collapse|sync|entropy|oracle");
    if (cfg.drift_kind != "plaplace" && cfg.drift_kind != "pme" && cfg.drift_kind != "rde")
        throw ConfigError("drift.kind must be plaplace|pme|rde");
    if (cfg.alpha < 2.0) throw ConfigError("drift.alpha must be >= 2");
    if (cfg.drift_kind == "rde" && cfg.alpha != 2.0) throw ConfigError("rde requires alpha = 2");
    if (cfg.sigma < 0.0) throw ConfigError("drift.sigma must be >= 0");
    if (cfg.modes < 0) throw ConfigError("noise.modes must be >= 0");
    if (cfg.gamma <= 1.0) throw ConfigError("noise.gamma must exceed 1 (trace class)");
    if (cfg.noise_dt <= 0.0) throw ConfigError("noise.dt must be positive");
    if (!(cfg.t_min < 0.0 && 0.0 < cfg.t_max)) throw ConfigError("noise window must contain 0");
    if (cfg.burn_in <= 0.0) throw ConfigError("noise.burn_in must be positive");
    if (cfg.mesh_n < 2) throw ConfigError("solver.n must be >= 2");
    if (cfg.length <= 0.0) throw ConfigError("solver.length must be positive");
    if (cfg.solver_dt <= 0.0) throw ConfigError("solver.dt must be positive");
    const double ratio = cfg.solver_dt / cfg.noise_dt;
    if (std::abs(ratio - std::lround(ratio)) > 1e-9)
        throw ConfigError("solver.dt must be an integer multiple of noise.dt");
    if (cfg.newton_tol <= 0.0) throw ConfigError("solver.newton_tol must be positive");
    if (cfg.newton_max < 1) throw ConfigError("solver.newton_max must be >= 1");
    if (cfg.pullback_tol <= 0.0) throw ConfigError("params.pullback_tol must be positive");
    if (cfg.ensemble < 1) throw ConfigError("params.ensemble must be >= 1");
    if (cfg.eps <= 0.0) throw ConfigError("params.eps must be positive");
    if (cfg.samples < 1) throw ConfigError("params.samples must be >= 1");
    for (double d : cfg.delta_grid)
        if (d <= 0.0) throw ConfigError("params.delta_grid entries must be positive");
    if (cfg.entropy_s0 >= 0.0) throw ConfigError("params.entropy_s0 must be negative");
}

std::string config_to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["experiment"] = {{"kind", c.kind}, {"seed", c.seed}, {"out", c.out}};
    j["drift"] = {{"kind", c.drift_kind}, {"alpha", c.alpha},   {"eta", c.eta},
                  {"mu", c.mu},           {"sigma", c.sigma},   {"reaction_slope", c.reaction_slope}};
    j["noise"] = {{"modes", c.modes},   {"gamma", c.gamma},   {"q0", c.q0},
                  {"t_min", c.t_min},   {"t_max", c.t_max},   {"dt", c.noise_dt},
                  {"burn_in", c.burn_in}};
    j["solver"] = {{"n", c.mesh_n},
                   {"length", c.length},
                   {"dt", c.solver_dt},
                   {"newton_tol", c.newton_tol},
                   {"newton_max", c.newton_max}};
    j["params"] = {{"pullback_tol", c.pullback_tol},
                   {"starts", c.starts},
                   {"ensemble", c.ensemble},
                   {"delta_grid", c.delta_grid},
                   {"t_grid", c.t_grid},
                   {"h_grid", c.h_grid},
                   {"eps", c.eps},
                   {"moment_k", c.moment_k},
                   {"ball_radius", c.ball_radius},
                   {"entropy_s0", c.entropy_s0},
                   {"samples", c.samples}};
    return j.dump(2);
}

} // namespace attractorlab
