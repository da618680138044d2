#pragma once

#include "attractorlab/flow.hpp"
#include "attractorlab/oracles.hpp"

namespace attractorlab {

struct AbsorptionReport {
    double R = 0.0;   // bounded-absorption radius at t
    double eta = 0.0; // ergodic decay rate of the averaged dissipation
    double s0 = 0.0;  // absorption time: averages stay ≤ −η for s ≤ s0
    bool comparison_mode = false; // unforced case, data-free comparison bound
    std::vector<double> starts;
    std::vector<double> empirical; // max ‖Z(t,s)x‖_H over sampled tempered data
    bool pass = false;
    double ratio = 0.0; // max empirical / R
};

/// Explicit absorption radius for the transformed flow of the standard
/// p-Laplace drift (η = 0, α > 2): the dissipation inequality
///   d‖Z‖²/dt ≤ g(t)‖Z‖² + f̃(t),
///   g = −(α/4)·2^{1−α}λ^{−α/2}μ_t^{2−α} + 2μ z_t,
/// is integrated with the measured path quantities; the constants in f̃ come
/// from the Young splits written out in the implementation. Tempered initial
/// families ‖D(s)‖² = e^{η|s|/2} are sampled empirically at the probe starts.
AbsorptionReport absorption_radius(const FlowRun& run, double t,
                                   const std::vector<double>& probe_starts,
                                   int samples_per_start, std::uint64_t seed);

struct AttractorEstimate {
    double t_eval = 0.0;
    std::vector<Field> cloud;
    std::vector<double> starts;
    double convergence_diagnostic = 0.0; // Hausdorff drift between successive starts
    int failures = 0;
};

AttractorEstimate pullback_cloud(const FlowRun& run, double t, const std::vector<double>& starts,
                                 int seeds_of_initial, std::uint64_t seed, double ball_radius);

double hausdorff_distance(const TripleSpec& triple, const std::vector<Field>& a,
                          const std::vector<Field>& b);

struct CollapseReport {
    double lambda_sm = 0.0; // measured strong-monotonicity coefficient of A
    double t = 0.0;
    std::vector<double> s;
    std::vector<double> observed_sq;
    std::vector<double> bound;
    bool pass = false;
    double slack = 0.1;
};

/// Observed pullback distances to the earliest-start image against the
/// quadrature bound ((α/2−1)λ ∫ₛᵗ e^{(α−2)μ(β_r−β_t)} dr)^{−2/(α−2)}.
CollapseReport collapse_rate_check(const FlowRun& run, const Field& x,
                                   const std::vector<double>& s_list, double t,
                                   double slack = 0.1);

struct SyncPoint {
    double t = 0.0;
    double probability = 0.0; // empirical P(diam > eps)
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    long order_violations = 0;
};

/// Monte-Carlo synchronization probe: corners and midpoint of [x, y] evolved
/// under common additive noise, per independent path; reports the empirical
/// exceedance probability of the image diameter with Wilson 95% intervals.
std::vector<SyncPoint> synchronization_mc(const DriftSpec& drift, const NoiseParams& noise_params,
                                          const Field& x, const Field& y,
                                          const std::vector<double>& t_list, int paths, double eps,
                                          std::uint64_t seed, const StepperConfig& cfg);

struct CoveringCount {
    double delta = 0.0;
    long count = 0;
    double log_count = 0.0;
};

/// Greedy H-norm covering counts; ball centers are refined toward the
/// 1-center of nearby points, so a pair at distance 1 is covered by a single
/// radius-0.6 ball.
std::vector<CoveringCount> covering_entropy(const TripleSpec& triple,
                                            const std::vector<Field>& cloud,
                                            const std::vector<double>& delta_grid);

struct EntropyLowerReport {
    double ball_radius = 0.0; // spatial radius of the disjoint balls
    double span = 0.0;        // evolution span |s0| of the bump construction
    long count = 0;           // |R_ε|
    double mass = 0.0;        // bump mass M fitted to the ball radius
    double separation = 0.0;  // pairwise H-distance of the bump combinations
    double exponent = 0.0;    // d(α−2)/(d(α−2)+α)
    double entropy_lower = 0.0; // count·ln 2
    std::vector<double> centers;
    oracles::BarenblattParams params;
};

/// Bump-placement lower bound on the Kolmogorov entropy: disjoint spatial
/// balls of radius `ball_radius` filled with self-similar bumps whose mass is
/// chosen so the support at time |s0| fits a ball.
EntropyLowerReport barenblatt_entropy_lower(double ball_radius, double alpha, int d,
                                            const Mesh1D& domain, double s0);

/// The 2^m on/off combinations of the first m bumps of a placement report.
std::vector<Field> bump_combination_cloud(const EntropyLowerReport& report, const Mesh1D& mesh,
                                          int m);

struct WilsonInterval {
    double lo = 0.0, hi = 0.0;
};
WilsonInterval wilson_95(long successes, long trials);

} // namespace attractorlab
