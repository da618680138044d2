#include "attractorlab/gelfand.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "attractorlab/rng.hpp"

namespace attractorlab {

namespace {

double power_flux(double r, double p) {
    if (r == 0.0) return 0.0;
    return std::pow(std::abs(r), p - 2.0) * r;
}

// min over c of the h-weighted ℓ^q norm of (w - c), q > 1. Convex in c.
double min_shift_lq_norm(const Eigen::VectorXd& w, double q, double h) {
    double lo = w.minCoeff(), hi = w.maxCoeff();
    if (lo == hi) return 0.0;
    auto val = [&](double c) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < w.size(); ++i) s += std::pow(std::abs(w[i] - c), q);
        return s;
    };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = val(x1), f2 = val(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = val(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = val(x2);
        }
    }
    return std::pow(h * std::min(f1, f2), 1.0 / q);
}

} // namespace

std::string to_string(TripleKind k) {
    switch (k) {
        case TripleKind::PLaplace: return "plaplace";
        case TripleKind::PME: return "pme";
        case TripleKind::RDE: return "rde";
    }
    return "?";
}

TripleKind triple_kind_from_string(const std::string& s) {
    if (s == "plaplace") return TripleKind::PLaplace;
    if (s == "pme") return TripleKind::PME;
    if (s == "rde") return TripleKind::RDE;
    throw std::invalid_argument("unknown triple kind: " + s);
}

TripleSpec TripleSpec::make(TripleKind kind, double alpha, const Mesh1D& mesh) {
    if (alpha < 2.0) throw std::invalid_argument("TripleSpec: alpha must be >= 2");
    if (kind == TripleKind::RDE && alpha != 2.0)
        throw std::invalid_argument("TripleSpec: RDE requires alpha = 2");
    TripleSpec t;
    t.kind_ = kind;
    t.alpha_ = alpha;
    t.mesh_ = mesh;
    t.inv_laplace_ = std::make_shared<NegLaplaceSolver>(mesh.interior_nodes, mesh.spacing());
    const double lam1 = t.dirichlet_eigenvalue(1);
    const double L = mesh.length;
    // ‖v‖_H² ≤ λ₁⁻¹ (gradient or L² energy), then a Hölder factor L^{(α−2)/α}
    // bridges the ℓ² and ℓ^α norms. Exact on the mesh.
    switch (kind) {
        case TripleKind::RDE: t.embedding_lambda_ = 1.0 / lam1; break;
        case TripleKind::PLaplace:
        case TripleKind::PME:
            t.embedding_lambda_ = std::pow(L, (alpha - 2.0) / alpha) / lam1;
            break;
    }
    return t;
}

void TripleSpec::require_mesh(const Field& v) const {
    if (v.mesh != mesh_) throw std::invalid_argument("field mesh does not match triple");
}

double TripleSpec::h_inner(const Field& u, const Field& v) const {
    require_mesh(u);
    require_mesh(v);
    const double h = mesh_.spacing();
    if (kind_ == TripleKind::PME) return h * u.values.dot(inv_laplace_->solve(v.values));
    return h * u.values.dot(v.values);
}

double TripleSpec::h_norm(const Field& v) const { return std::sqrt(std::max(0.0, h_inner(v, v))); }

double TripleSpec::v_norm(const Field& v) const {
    require_mesh(v);
    const double h = mesh_.spacing();
    const int n = v.size();
    if (kind_ == TripleKind::PME) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::pow(std::abs(v[i]), alpha_);
        return std::pow(h * s, 1.0 / alpha_);
    }
    // gradient norm over cell edges, Dirichlet ghosts
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double left = (j == 0) ? 0.0 : v[j - 1];
        const double right = (j == n) ? 0.0 : v[j];
        s += std::pow(std::abs((right - left) / h), alpha_);
    }
    return std::pow(h * s, 1.0 / alpha_);
}

double TripleSpec::dual_pair(const Field& w, const Field& v) const { return h_inner(w, v); }

double TripleSpec::v_star_norm(const Field& w) const {
    require_mesh(w);
    const double h = mesh_.spacing();
    const double q = alpha_ / (alpha_ - 1.0);
    if (kind_ == TripleKind::PME) {
        Eigen::VectorXd u = inv_laplace_->solve(w.values);
        double s = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]), q);
        return std::pow(h * s, 1.0 / q);
    }
    // Dual of the edge-gradient α-norm: cumulative sums against gradients,
    // minimized over the constant shift enforcing the Dirichlet constraint.
    const int n = w.size();
    Eigen::VectorXd cum(n + 1);
    cum[n] = 0.0;
    for (int j = n - 1; j >= 0; --j) cum[j] = cum[j + 1] + h * w[j];
    return min_shift_lq_norm(cum, q, h);
}

Field TripleSpec::laplacian(const Field& v) const {
    require_mesh(v);
    const int n = v.size();
    const double h2 = mesh_.spacing() * mesh_.spacing();
    Field out(mesh_);
    for (int i = 0; i < n; ++i) {
        const double left = (i == 0) ? 0.0 : v[i - 1];
        const double right = (i == n - 1) ? 0.0 : v[i + 1];
        out[i] = (left - 2.0 * v[i] + right) / h2;
    }
    return out;
}

Field TripleSpec::neg_laplace_solve(const Field& v) const {
    require_mesh(v);
    return {mesh_, inv_laplace_->solve(v.values)};
}

double TripleSpec::dirichlet_eigenvalue(int k) const {
    const double h = mesh_.spacing();
    return 2.0 / (h * h) * (1.0 - std::cos(k * M_PI * h / mesh_.length));
}

Field TripleSpec::dirichlet_eigenvector(int k) const {
    const int n = mesh_.interior_nodes;
    Field e(mesh_);
    const double scale = std::sqrt(2.0 / mesh_.length);
    for (int i = 0; i < n; ++i)
        e[i] = scale * std::sin(k * M_PI * (i + 1) / double(n + 1));
    return e;
}

Field TripleSpec::h_orthonormal_mode(int k) const {
    Field e = dirichlet_eigenvector(k);
    if (kind_ == TripleKind::PME) {
        // H = H⁻¹: rescale so (e, (−Δ)⁻¹e) h-weighted is 1.
        const double lam = dirichlet_eigenvalue(k);
        e.values *= std::sqrt(lam);
    }
    return e;
}

DriftSpec make_p_laplace_drift(const TripleSpec& triple, double eta, double mu, double sigma) {
    if (triple.kind() != TripleKind::PLaplace)
        throw std::invalid_argument("make_p_laplace_drift: wrong triple kind");
    DriftSpec d;
    d.triple = triple;
    d.c = 2.0;
    d.C = 2.0 * std::max(eta, 0.0);
    d.eta = eta;
    d.mu = mu;
    d.additive_scale = sigma;
    return d;
}

DriftSpec make_pme_drift(const TripleSpec& triple, double eta, double mu, double sigma) {
    if (triple.kind() != TripleKind::PME)
        throw std::invalid_argument("make_pme_drift: wrong triple kind");
    DriftSpec d;
    d.triple = triple;
    d.c = 2.0;
    d.C = 2.0 * std::max(eta, 0.0);
    d.eta = eta;
    d.mu = mu;
    d.additive_scale = sigma;
    return d;
}

DriftSpec make_rde_drift(const TripleSpec& triple,
                         std::function<double(double, double)> reaction,
                         double reaction_slope, double reaction_growth, double mu,
                         double sigma) {
    if (triple.kind() != TripleKind::RDE)
        throw std::invalid_argument("make_rde_drift: wrong triple kind");
    DriftSpec d;
    d.triple = triple;
    d.c = 2.0;
    d.C = reaction_growth + 1.0;
    d.reaction = std::move(reaction);
    d.reaction_slope = reaction_slope;
    d.reaction_growth = reaction_growth;
    d.mu = mu;
    d.additive_scale = sigma;
    return d;
}

Field p_laplace_apply(const Field& v, const DriftSpec& drift) {
    if (drift.triple.kind() != TripleKind::PLaplace)
        throw std::invalid_argument("p_laplace_apply: drift kind mismatch");
    drift.triple.require_mesh(v);
    const int n = v.size();
    const double h = v.mesh.spacing();
    const double p = drift.phi_p();
    // flux at the N+1 cell edges, then centered differences
    Eigen::VectorXd flux(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double left = (j == 0) ? 0.0 : v[j - 1];
        const double right = (j == n) ? 0.0 : v[j];
        flux[j] = power_flux((right - left) / h, p);
    }
    Field out(v.mesh);
    for (int i = 0; i < n; ++i) out[i] = (flux[i + 1] - flux[i]) / h + drift.eta * v[i];
    return out;
}

Field pme_apply(const Field& v, const DriftSpec& drift) {
    if (drift.triple.kind() != TripleKind::PME)
        throw std::invalid_argument("pme_apply: drift kind mismatch");
    drift.triple.require_mesh(v);
    const double p = drift.phi_p();
    Field phi(v.mesh);
    for (int i = 0; i < v.size(); ++i) phi[i] = power_flux(v[i], p);
    Field out = drift.triple.laplacian(phi);
    out.values += drift.eta * v.values;
    return out;
}

Field rde_apply(const Field& v, double t, const DriftSpec& drift) {
    if (drift.triple.kind() != TripleKind::RDE)
        throw std::invalid_argument("rde_apply: drift kind mismatch");
    drift.triple.require_mesh(v);
    Field out = drift.triple.laplacian(v);
    if (drift.reaction)
        for (int i = 0; i < v.size(); ++i) out[i] += drift.reaction(t, v[i]);
    return out;
}

Field drift_apply(double t, const Field& v, const DriftSpec& drift) {
    switch (drift.triple.kind()) {
        case TripleKind::PLaplace: return p_laplace_apply(v, drift);
        case TripleKind::PME: return pme_apply(v, drift);
        case TripleKind::RDE: return rde_apply(v, t, drift);
    }
    throw std::logic_error("drift_apply: unreachable");
}

Field aux_monotone_M(const Field& v, const TripleSpec& triple) {
    triple.require_mesh(v);
    switch (triple.kind()) {
        case TripleKind::PLaplace: {
            DriftSpec d;
            d.triple = triple;
            return p_laplace_apply(v, d);
        }
        case TripleKind::PME: {
            DriftSpec d;
            d.triple = triple;
            return pme_apply(v, d);
        }
        case TripleKind::RDE: return triple.laplacian(v);
    }
    throw std::logic_error("aux_monotone_M: unreachable");
}

namespace {

Field random_field(const TripleSpec& triple, RandomStream& rs, double amplitude) {
    Field v(triple.mesh());
    for (int i = 0; i < v.size(); ++i) v[i] = amplitude * rs.gaussian();
    return v;
}

} // namespace

double measure_lambda_sm(const TripleSpec& triple, double alpha,
                         const std::function<Field(const Field&)>& op, int samples,
                         std::uint64_t seed) {
    RandomStream rs(seed, 0xA25F);
    double lam = std::numeric_limits<double>::infinity();
    auto probe = [&](const Field& u, const Field& v) {
        Field du = op(u) - op(v);
        Field d = u - v;
        const double dn = triple.h_norm(d);
        if (dn < 1e-12) return;
        const double num = -2.0 * triple.dual_pair(du, d);
        lam = std::min(lam, num / std::pow(dn, alpha));
    };
    // random pairs, antipodal pairs (which realize the worst flux ratio), and
    // low-mode shapes across amplitude scales; the small smooth amplitudes
    // are where a linear perturbation overtakes the degenerate flux
    const double scales[] = {0.05, 0.3, 1.0, 3.0, 10.0};
    for (int s = 0; s < samples; ++s) {
        const double a = scales[s % 5];
        Field u = random_field(triple, rs, a);
        Field v = random_field(triple, rs, a);
        probe(u, v);
        probe(u, {u.mesh, -u.values});
    }
    const double sine_scales[] = {0.003, 0.01, 0.05, 0.3, 1.0, 3.0, 10.0};
    for (int k = 1; k <= 4; ++k) {
        Field e = triple.dirichlet_eigenvector(k);
        for (double a : sine_scales) {
            Field u{e.mesh, a * e.values};
            probe(u, {u.mesh, -u.values});
            Field w = random_field(triple, rs, 0.1 * a);
            probe(u, u + w);
        }
    }
    return lam;
}

AssumptionReport check_assumptions_op(const TripleSpec& triple, double alpha,
                                      const std::function<Field(double, const Field&)>& op,
                                      const std::function<double(double)>& f, double declared_C,
                                      int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("check_assumptions: samples must be >= 1");
    AssumptionReport rep;
    rep.samples = samples;
    RandomStream rs(seed, 0xC4E);
    auto f_at = [&](double t) { return f ? f(t) : 0.0; };

    double mono_C = -std::numeric_limits<double>::infinity();
    double sm_H = std::numeric_limits<double>::infinity();
    double sm_V = std::numeric_limits<double>::infinity();
    double coer = std::numeric_limits<double>::infinity();
    double growth_small = 0.0, growth_large = 0.0, growth_all = 0.0;
    double max_out = 0.0;

    const double scales[] = {0.1, 1.0, 5.0};
    for (int s = 0; s < samples; ++s) {
        const double t = rs.uniform(-2.0, 2.0);
        const double a = scales[s % 3];
        Field u = random_field(triple, rs, a);
        Field v = (s % 4 == 0) ? Field{u.mesh, -u.values} : random_field(triple, rs, a);
        Field Au = op(t, u), Av = op(t, v);
        max_out = std::max(max_out, Au.values.cwiseAbs().maxCoeff());

        Field d = u - v;
        const double dh = triple.h_norm(d);
        if (dh > 1e-12) {
            const double pair2 = 2.0 * triple.dual_pair(Au - Av, d);
            mono_C = std::max(mono_C, pair2 / (dh * dh));
            sm_H = std::min(sm_H, -pair2 / std::pow(dh, alpha));
            const double dv = triple.v_norm(d);
            if (dv > 1e-12) sm_V = std::min(sm_V, -pair2 / std::pow(dv, alpha));
        }

        const double vn = triple.v_norm(u);
        if (vn > 1e-12) {
            const double un = triple.h_norm(u);
            coer = std::min(coer, (declared_C * un * un + f_at(t) - 2.0 * triple.dual_pair(Au, u)) /
                                      std::pow(vn, alpha));
            const double g =
                std::max(0.0, std::pow(triple.v_star_norm(Au), alpha / (alpha - 1.0)) - f_at(t)) /
                std::pow(vn, alpha);
            growth_all = std::max(growth_all, g);
            if (a <= 1.0)
                growth_small = std::max(growth_small, g);
            else
                growth_large = std::max(growth_large, g);
        }
    }

    // hemicontinuity probe: s ↦ ⟨A(t, v1 + s v2), v3⟩ sampled on two grids;
    // adjacent jumps of a continuous map shrink with the grid
    {
        Field v1 = random_field(triple, rs, 1.0);
        Field v2 = random_field(triple, rs, 1.0);
        Field v3 = random_field(triple, rs, 1.0);
        auto max_jump = [&](int grid) {
            double prev = 0.0, mj = 0.0;
            for (int i = 0; i <= grid; ++i) {
                const double s = -1.0 + 2.0 * i / grid;
                Field arg{v1.mesh, v1.values + s * v2.values};
                const double val = triple.dual_pair(op(0.0, arg), v3);
                if (i > 0) mj = std::max(mj, std::abs(val - prev));
                prev = val;
            }
            return mj;
        };
        rep.hemicontinuity_jump_coarse = max_jump(16);
        rep.hemicontinuity_jump_fine = max_jump(128);
        rep.hemicontinuity_pass = rep.hemicontinuity_jump_fine <=
                                  0.5 * rep.hemicontinuity_jump_coarse +
                                      1e-9 * (1.0 + rep.hemicontinuity_jump_coarse);
    }

    rep.zero_drift = max_out == 0.0;
    rep.monotonicity_C = mono_C;
    rep.strong_monotonicity_H = sm_H;
    rep.strong_monotonicity_V = sm_V;
    rep.coercivity_c = coer;
    rep.growth_C = growth_all;
    rep.monotonicity_pass = mono_C <= declared_C + 1e-9;
    rep.coercivity_pass = coer > 0.0 || rep.zero_drift;
    rep.growth_pass = rep.zero_drift || growth_large <= 1.25 * growth_small + 1e-9;
    return rep;
}

AssumptionReport check_assumptions(const DriftSpec& drift, int samples, std::uint64_t seed) {
    auto op = [&](double t, const Field& v) { return drift_apply(t, v, drift); };
    AssumptionReport rep = check_assumptions_op(
        drift.triple, drift.triple.alpha(), op, drift.f, drift.C, samples, seed);
    if (drift.triple.kind() == TripleKind::RDE) {
        RandomStream rs(seed, 0x5DE);
        double cg = 0.0;
        for (int s = 0; s < samples; ++s) {
            const double t = rs.uniform(-2.0, 2.0);
            const double u = rs.uniform(-10.0, 10.0);
            if (std::abs(u) < 1e-9) continue;
            const double g = drift.reaction ? drift.reaction(t, u) : 0.0;
            cg = std::max(cg, std::max(0.0, g * g - drift.f_at(t)) / (u * u));
        }
        rep.reaction_growth_measured = cg;
        rep.l_coercivity = drift.triple.dirichlet_eigenvalue(1);
        rep.reaction_mixing_pass = std::sqrt(cg) < rep.l_coercivity;
    }
    return rep;
}

} // namespace attractorlab
