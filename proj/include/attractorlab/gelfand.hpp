#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "attractorlab/mesh.hpp"
#include "attractorlab/tridiag.hpp"

namespace attractorlab {

enum class TripleKind { PLaplace, PME, RDE };

std::string to_string(TripleKind k);
TripleKind triple_kind_from_string(const std::string& s);

/// Discretized Gelfand triple V ⊆ H ⊆ V*. The three kinds fix the norm
/// structure:
///   PLaplace:  H = L², V-norm = discrete-gradient ℓ^α norm,
///   PME:       H = discrete H⁻¹ (one cached Laplacian solve per norm),
///              V-norm = ℓ^α,
///   RDE:       α = 2, V = discrete H¹₀.
/// embedding_lambda satisfies ‖v‖_H² ≤ λ‖v‖_V² for every grid function; it is
/// computed from the smallest discrete Dirichlet eigenvalue plus a Hölder
/// factor, so the inequality is exact on the mesh, not just sampled.
class TripleSpec {
  public:
    static TripleSpec make(TripleKind kind, double alpha, const Mesh1D& mesh);

    TripleKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    const Mesh1D& mesh() const { return mesh_; }
    double embedding_lambda() const { return embedding_lambda_; }

    double h_inner(const Field& u, const Field& v) const;
    double h_norm(const Field& v) const;
    double v_norm(const Field& v) const;
    /// Duality pairing; reduces to the H inner product under the discrete
    /// identification of V* with H.
    double dual_pair(const Field& w, const Field& v) const;
    /// Dual norm ‖w‖_{V*} = sup_v (w,v)_H / ‖v‖_V, computed exactly for the
    /// discrete norms (used by the growth-assumption checker).
    double v_star_norm(const Field& w) const;

    Field laplacian(const Field& v) const;
    Field neg_laplace_solve(const Field& v) const;

    /// k-th discrete Dirichlet eigenvalue (2/h²)(1 − cos(kπh/L)), k ≥ 1.
    double dirichlet_eigenvalue(int k) const;
    /// L²-orthonormal sine eigenvector.
    Field dirichlet_eigenvector(int k) const;
    /// Eigenvector rescaled to unit H-norm for this triple's H.
    Field h_orthonormal_mode(int k) const;

    void require_mesh(const Field& v) const;

  private:
    TripleKind kind_ = TripleKind::PLaplace;
    double alpha_ = 2.0;
    Mesh1D mesh_;
    double embedding_lambda_ = 0.0;
    std::shared_ptr<const NegLaplaceSolver> inv_laplace_;
};

/// Drift families from the three example classes, with their declared
/// structural constants. `f` is the inhomogeneity bound appearing in the
/// coercivity/growth inequalities, not a forcing term.
struct DriftSpec {
    TripleSpec triple;
    double c = 2.0;
    double C = 0.0;
    std::function<double(double)> f;
    double lambda_sm = 0.0;
    double eta = 0.0;
    double mu = 0.0;
    double additive_scale = 0.0; // σ
    double phi_exponent = 0.0;   // defaults to triple.alpha() when 0
    std::function<double(double, double)> reaction;       // RDE G(t,u)
    std::function<double(double, double)> reaction_du;    // optional dG/du
    double reaction_slope = 0.0;                          // declared λ(ω) for G
    double reaction_growth = 0.0;                         // declared C in |G|²≤C|u|²+f

    double phi_p() const { return phi_exponent > 0.0 ? phi_exponent : triple.alpha(); }
    double f_at(double t) const { return f ? f(t) : 0.0; }
};

DriftSpec make_p_laplace_drift(const TripleSpec& triple, double eta, double mu, double sigma);
DriftSpec make_pme_drift(const TripleSpec& triple, double eta, double mu, double sigma);
DriftSpec make_rde_drift(const TripleSpec& triple,
                         std::function<double(double, double)> reaction,
                         double reaction_slope, double reaction_growth, double mu,
                         double sigma);

Field p_laplace_apply(const Field& v, const DriftSpec& drift);
Field pme_apply(const Field& v, const DriftSpec& drift);
Field rde_apply(const Field& v, double t, const DriftSpec& drift);
/// Dispatch on the drift kind; A(t, v).
Field drift_apply(double t, const Field& v, const DriftSpec& drift);

/// The strongly monotone auxiliary operator used to build stationary
/// solutions: the p-Laplace itself, Δ(|v|^{α−2}v) for PME, and the Dirichlet
/// Laplacian (Riesz map, dissipative sign) for RDE.
Field aux_monotone_M(const Field& v, const TripleSpec& triple);

struct AssumptionReport {
    int samples = 0;
    double monotonicity_C = 0.0;           // max 2⟨A(u)−A(v), u−v⟩ / ‖u−v‖_H²
    double strong_monotonicity_H = 0.0;    // min −2⟨A(u)−A(v), u−v⟩ / ‖u−v‖_H^α
    double strong_monotonicity_V = 0.0;    // min −2⟨A(u)−A(v), u−v⟩ / ‖u−v‖_V^α
    double coercivity_c = 0.0;             // min (C‖v‖_H² + f − 2⟨A(v),v⟩)/‖v‖_V^α
    double growth_C = 0.0;                 // max (‖A(v)‖_{V*}^{α/(α−1)} − f)/‖v‖_V^α
    double hemicontinuity_jump_coarse = 0.0;
    double hemicontinuity_jump_fine = 0.0;
    bool zero_drift = false;
    bool coercivity_pass = false;
    bool monotonicity_pass = false;
    bool growth_pass = false;
    bool hemicontinuity_pass = false;
    bool reaction_mixing_pass = true; // RDE only: √C_G < c_L
    double reaction_growth_measured = 0.0;
    double l_coercivity = 0.0; // RDE: smallest Dirichlet eigenvalue
};

/// Empirical sweep of the structural inequalities over random fields and
/// times. Violations are reported through the flags, never thrown.
AssumptionReport check_assumptions(const DriftSpec& drift, int samples, std::uint64_t seed);

/// Same sweep against a caller-supplied operator (used for probing auxiliary
/// operators and deliberately broken drifts).
AssumptionReport check_assumptions_op(const TripleSpec& triple, double alpha,
                                      const std::function<Field(double, const Field&)>& op,
                                      const std::function<double(double)>& f, double declared_C,
                                      int samples, std::uint64_t seed);

/// Measured strong-monotonicity constant of an operator in H: min over adversarial and
/// random probe pairs of −2⟨A(u)−A(v), u−v⟩/‖u−v‖_H^α.
double measure_lambda_sm(const TripleSpec& triple, double alpha,
                         const std::function<Field(const Field&)>& op, int samples,
                         std::uint64_t seed);

} // namespace attractorlab
