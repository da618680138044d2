#pragma once

#include <functional>

#include "attractorlab/noise.hpp"
#include "attractorlab/stepper.hpp"

namespace attractorlab {
namespace oracles {

/// Self-similar profile parameters for the degenerate p-Laplace equation,
/// d = 1: k = 1/(α−2+α/d), q = ((α−2)/α)(k/d)^{1/(α−1)}, and the mass
/// constant C(M) fixed by normalizing ∫U(t,·)dξ = M numerically.
struct BarenblattParams {
    double alpha = 3.0;
    int d = 1;
    double mass = 1.0;
    double k = 0.0;
    double q = 0.0;
    double c_mass = 0.0; // C(M)

    static BarenblattParams make(double alpha, int d, double mass);
};

/// U(t,ξ) = t^{−k}(C(M) − q|ξ|^{α/(α−1)} t^{−kα/(d(α−1))})₊^{(α−1)/(α−2)}.
double barenblatt(double t, double xi, const BarenblattParams& params);
double barenblatt_support_radius(double t, const BarenblattParams& params);
/// Profile sampled on a mesh, centered at `center` (absolute coordinate).
Field barenblatt_field(double t, double center, const Mesh1D& mesh,
                       const BarenblattParams& params);
/// ∫ U(t,·) dξ by quadrature (mass conservation check).
double barenblatt_mass_quadrature(double t, const BarenblattParams& params, int intervals = 4000);

/// Exact solution bound of y' = −h y^β from y(s) = q0 after ∫h = h_integral:
/// (q0^{−(β−1)} + (β−1)·h_integral)^{−1/(β−1)}; the q0 → ∞ limit is
/// initial-data free.
double comparison_closed_form(double q0, double beta, double h_integral);

/// The a-priori absorption level R(t,p,h) = sup_{r∈[a₁−1,t]} (2p(r)/h(r))^{1/β}
/// for subsolutions of y' = −h y^β + p; a₁ is bracketed by the time the
/// data-free decay bound falls below the (2p/h)^{1/β} floor. p is floored at
/// δ = 1e−8.
double apriori_bound(const std::function<double(double)>& p,
                     const std::function<double(double)>& h, double beta, double t,
                     double search_window);

/// ((α/2−1)·λ_sm·∫ₛᵗ e^{(α−2)μ(β_r−β_t)} dr)^{−2/(α−2)} by trapezoid on the
/// sampled path grid; +∞ for an empty interval.
double equil_rate_bound(double lambda_sm, double alpha, double mu, const BrownianPath& beta,
                        double s, double t);

/// Exact discrete recursion for dX = Δ_h X dt + σ dW on the RDE triple,
/// modewise against the sine eigenbasis; the additive increments are the same
/// sampled ones the stepper sees, so trajectories are comparable pathwise.
Trajectory linear_sde_exact(const TripleSpec& triple, const NoiseEnvironment& noise,
                            double t_start, double t_end, const Field& initial, double dt);

/// Exact discrete heat semigroup e^{t Δ_h} v (spectral).
Field heat_exact(const TripleSpec& triple, const Field& v, double t);

} // namespace oracles
} // namespace attractorlab
