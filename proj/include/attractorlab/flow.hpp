#pragma once

#include <map>
#include <tuple>

#include "attractorlab/stationary.hpp"

namespace attractorlab {

/// Stationary conjugation pair T(t,ω)y = μ_t y − u_t, T⁻¹(t,ω)y = (y+u_t)/μ_t.
struct ConjugationMap {
    const NoiseEnvironment* noise = nullptr;
    const StationarySolution* u = nullptr;

    Field forward(double t, const Field& y) const;
    Field inverse(double t, const Field& y) const;
};

/// One ω: the transformed random PDE for Z, the conjugated flow S, and the
/// cached k(s,t) = e^{−μ∫ₛᵗ z} used to remove the zero-order term before
/// time stepping.
class FlowRun {
  public:
    /// Builds the stationary ingredient by pullback over [s_min, t_max]; all
    /// later solves must stay inside that window.
    static FlowRun make(const DriftSpec& drift, const NoiseEnvironment& noise, double s_min,
                        double t_max, double pullback_tol, const StepperConfig& cfg);

    const DriftSpec& drift() const { return drift_; }
    const NoiseEnvironment& noise() const { return noise_; }
    const StationarySolution& stationary() const { return stat_; }
    const StepperConfig& cfg() const { return cfg_; }
    double s_min() const { return s_min_; }
    double t_max() const { return t_max_; }
    ConjugationMap conjugation() const { return {&noise_, &stat_}; }

    double z_at(double t) const;
    double mu_at(double t) const;
    Field u_at(double t) const;
    double k(double s, double t) const;

    /// A_ω(t,v) without the zero-order term μ z_t v.
    Field a_omega(double t, const Field& v) const;
    /// Right-hand side of the transformed equation: A_ω(t,v) + μ z_t v.
    Field transformed_drift(double t, const Field& v) const;

    Field solve_Z(double s, double t, const Field& x) const;
    Trajectory solve_Z_trajectory(double s, double t, const Field& x, double record_from) const;
    Field flow_S(double s, double t, const Field& x) const;
    Trajectory flow_S_trajectory(double s, double t, const Field& x, double record_from) const;

    /// ‖S(t,s;ω)x − S(t−s,0;θ_sω)x‖_H, rebuilding the shifted run (including
    /// its stationary pullback) on θ_sω.
    double check_cocycle(double s, double t, const Field& x) const;

    /// Drift-magnitude scale recorded by the most recent Z solve; the flow
    /// and cocycle identities are asserted against 5·dt·(this scale).
    double last_rhs_scale() const { return last_rhs_scale_; }

  private:
    DriftSpec drift_;
    NoiseEnvironment noise_;
    StationarySolution stat_;
    StepperConfig cfg_;
    double s_min_ = 0.0;
    double t_max_ = 0.0;
    double pullback_tol_ = 0.0;
    mutable double last_rhs_scale_ = 0.0;
    // endpoint memo keyed by (s, t, datum fingerprint); a run is confined to
    // one worker, so no synchronization
    mutable std::map<std::tuple<long, long, std::uint64_t>, Field> endpoint_cache_;
};

/// Residual of the original SPDE integral identity along a solved S
/// trajectory, with the Stratonovich term rewritten in Itô form and
/// left-point stochastic sums. Decays like O(√dt).
double ito_residual(const FlowRun& run, double s, double t, const Field& x);

} // namespace attractorlab
