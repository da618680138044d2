#pragma once

#include "attractorlab/attractor.hpp"
#include "attractorlab/config.hpp"

namespace attractorlab {

/// Runs the configured experiment and writes its CSV tables plus a
/// manifest.json into cfg.out. ConfigError propagates untouched; numerical
/// failures are rethrown with the failing stage named.
void run_experiment(const RunConfig& cfg);

TripleSpec triple_from_config(const RunConfig& cfg);
DriftSpec drift_from_config(const RunConfig& cfg);
NoiseParams noise_from_config(const RunConfig& cfg);
StepperConfig stepper_from_config(const RunConfig& cfg);

/// Fixed-step classical Runge-Kutta for scalar ODEs; the independent
/// integration route used to check the closed-form comparison bounds.
double rk4_scalar(const std::function<double(double, double)>& f, double y0, double t0, double t1,
                  long steps);

} // namespace attractorlab
