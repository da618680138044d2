#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "attractorlab/errors.hpp"

namespace attractorlab {

/// Plain-text run configuration: `[section]` headers and `key = value` lines,
/// `#` comments. Unknown sections or keys are rejected before any computation
/// starts.
struct RunConfig {
    // [experiment]
    std::string kind = "oracle";
    std::uint64_t seed = 1;
    std::string out = "out";

    // [drift]
    std::string drift_kind = "plaplace";
    double alpha = 3.0;
    double eta = 0.0;
    double mu = 0.0;
    double sigma = 1.0;
    double reaction_slope = 0.0;

    // [noise]
    int modes = 4;
    double gamma = 2.0;
    double q0 = 1.0;
    double t_min = -40.0;
    double t_max = 2.0;
    double noise_dt = 1e-2;
    double burn_in = 20.0;

    // [solver]
    int mesh_n = 64;
    double length = 1.0;
    double solver_dt = 1e-2;
    double newton_tol = 1e-10;
    int newton_max = 40;

    // [params]
    double pullback_tol = 1e-6;
    std::vector<double> starts;
    int ensemble = 100;
    std::vector<double> delta_grid;
    std::vector<double> t_grid;
    std::vector<double> h_grid;
    double eps = 0.05;
    int moment_k = 2;
    double ball_radius = 1.0;
    double entropy_s0 = -1.0;
    int samples = 3;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Cross-field validation; throws ConfigError with the offending key.
void validate(const RunConfig& cfg);
std::string config_to_json(const RunConfig& cfg);

} // namespace attractorlab
