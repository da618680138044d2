#pragma once

#include <cstdint>
#include <vector>

#include "attractorlab/noise.hpp"
#include "attractorlab/stepper.hpp"

namespace attractorlab {

struct StationarySolution {
    Trajectory u; // on [t_eval_min, t_max]
    std::vector<double> pullback_starts;
    std::vector<double> cauchy_gaps; // sup-norm gaps between successive runs
    double tol = 0.0;
    double t_eval_min = 0.0;
    double t_max = 0.0;
};

struct PullbackOptions {
    double t_eval_min = 0.0;
    double t_max = 0.0; // 0 ⇒ use the noise window's t_max
    double base_horizon = 1.0;
    int max_doublings = 24;
    /// Pin the number of pullback runs (used by invariance tests that need a
    /// fixed start list); < 0 means run until the gap drops below tol.
    int forced_runs = -1;
};

/// Strictly stationary solution of du = M(u)dt + σ μ_t dW by pullback:
/// integrate from starts s_n = t_eval_min − 2ⁿ·T₀ with initial 0 until the
/// sup gap over the evaluation window drops below tol. The Stratonovich
/// forcing is evaluated as left-point sums, which is exact in expectation
/// because μ is driven by β, independent of W, so the cross-variation
/// correction vanishes.
StationarySolution pullback_stationary(const TripleSpec& triple, const NoiseEnvironment& noise,
                                       double tol, const StepperConfig& cfg,
                                       const PullbackOptions& opts = {});

/// One pullback leg from a given start and initial value (no doubling loop).
Trajectory pullback_leg(const TripleSpec& triple, const NoiseEnvironment& noise, double start,
                        const Field& initial, double record_from, double t_max,
                        const StepperConfig& cfg);

struct ContractionReport {
    double observed_sq = 0.0;
    double bound = 0.0;
    double c_hat = 0.0; // measured strong-monotonicity constant of M in H
    bool pass = false;
    double slack = 0.1;
};

/// Contraction probe: two trajectories of the M-equation
/// from (x, s2) and (y, s1) must satisfy the initial-data-free bound
/// ((β−1)ĉ(t−s₂))^{−1/(β−1)} on the squared H-distance (β = α/2 > 1), or the
/// exponential bound for α = 2.
ContractionReport verify_contraction(const TripleSpec& triple, const NoiseEnvironment& noise,
                                     const Field& x, const Field& y, double s1, double s2,
                                     double t, const StepperConfig& cfg, double slack = 0.1);

/// ‖u_h(ω) − u_0(θ_h ω)‖_H with an independent pullback on the shifted path.
double stationarity_check(const TripleSpec& triple, const NoiseEnvironment& noise, double h,
                          double tol, const StepperConfig& cfg);

struct BirkhoffReport {
    int k = 0;
    std::vector<double> windows;
    std::vector<double> time_averages; // (1/T)∫₀ᵀ ‖u‖_H^k
    double ensemble_mean = 0.0;        // E‖u_0‖_H^k over independent seeds
    int ensemble_seeds = 0;
};

BirkhoffReport birkhoff_average(const TripleSpec& triple, const StationarySolution& solution,
                                int k, const std::vector<double>& windows);

/// Monte-Carlo estimate of E‖u_0‖_H^k over independent environments.
double ensemble_moment(const TripleSpec& triple, const NoiseParams& params, std::uint64_t seed,
                       int n_seeds, int k, double tol, const StepperConfig& cfg);

} // namespace attractorlab
