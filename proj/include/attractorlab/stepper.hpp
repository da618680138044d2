#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "attractorlab/errors.hpp"
#include "attractorlab/gelfand.hpp"
#include "attractorlab/mesh.hpp"

namespace attractorlab {

struct StepperConfig {
    double dt = 1e-2;
    double newton_tol = 1e-10; // scaled by (1 + ‖v‖_H) per step
    int newton_max = 40;
    double damping = 1.0; // initial Newton step fraction, in (0,1]
    int record_stride = 1;
    double record_from = -std::numeric_limits<double>::infinity();
    bool allow_halving = true;
};

/// One per-path random PDE dv/dt = rhs(t, v) + forcing. `forcing(t)` is the
/// average forcing rate over [t, t+dt] (piecewise constant; Wiener increments
/// divided by dt), evaluated at the left endpoint of each step.
struct RandomPDEProblem {
    std::function<Field(double, const Field&)> rhs;
    std::function<Field(double)> forcing; // may be empty
    double t_start = 0.0;
    double t_end = 0.0;
    Field initial;
    TripleSpec triple;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> states;
    std::vector<int> newton_iters;
    std::vector<double> residuals;
    double max_rhs_norm = 0.0; // drift-magnitude scale used for dt budgets
    int halvings = 0;

    const Field& back() const { return states.back(); }
    long index_of(double t) const;
    const Field& at_time(double t) const { return states[index_of(t)]; }
    /// Linear interpolation between recorded states (used only for the rare
    /// half-step retries that fall between grid points).
    Field at_time_interp(double t) const;
};

/// Implicit Euler step: solves w = v + dt·rhs(t+dt, w) + dt·g by damped
/// Newton with a colored finite-difference tridiagonal Jacobian of the
/// mesh-local rhs, falling back to a damped fixed-point iteration when the
/// Newton model stalls (degenerate PME diffusivity). Residuals always use the
/// exact rhs.
Field step_backward_euler(const RandomPDEProblem& problem, const Field& v, double t, double dt,
                          const StepperConfig& cfg, int* iters_out = nullptr,
                          double* residual_out = nullptr, double* rhs_norm_out = nullptr);

/// Uniform-grid integration from t_start to t_end (final partial step
/// allowed). On NewtonDiverged a step is retried once as two half steps.
Trajectory integrate(const RandomPDEProblem& problem, const StepperConfig& cfg);

} // namespace attractorlab
