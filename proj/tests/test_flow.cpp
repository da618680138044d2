#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "attractorlab/flow.hpp"
#include "attractorlab/rng.hpp"

using namespace attractorlab;

namespace {

NoiseParams flow_noise(double mu, double sigma, int modes = 4, double dt = 1e-2) {
    NoiseParams np;
    np.modes = modes;
    np.sigma = sigma;
    np.mu = mu;
    np.t_min = -40.0;
    np.t_max = 3.0;
    np.dt = dt;
    return np;
}

Field gauss_field(const Mesh1D& mesh, RandomStream& rs) {
    Field v(mesh);
    for (int i = 0; i < v.size(); ++i) v[i] = rs.gaussian();
    return v;
}

} // namespace

TEST_CASE("conjugation roundtrip is the identity to 1e-12") {
    Mesh1D mesh(1.0, 32);
    TripleSpec triple = TripleSpec::make(TripleKind::PLaplace, 3.0, mesh);
    DriftSpec drift = make_p_laplace_drift(triple, 0.0, 0.5, 1.0);
    NoiseEnvironment env = NoiseEnvironment::make(21, triple, flow_noise(0.5, 1.0));
    StepperConfig cfg;
    FlowRun run = FlowRun::make(drift, env, -2.0, 2.0, 1e-6, cfg);
    ConjugationMap T = run.conjugation();
    RandomStream rs(1, 1);
    for (int i = 0; i < 1000; ++i) {
        Field y = gauss_field(mesh, rs);
        const double t = -2.0 + (i % 41) * 0.1;
        const double defect = triple.h_norm(T.inverse(t, T.forward(t, y)) - y);
        CHECK(defect <= 1e-12 * (1.0 + triple.h_norm(y)));
    }
}

TEST_CASE("trivial conjugation: mu = 0 and W = 0 reduce to the raw drift, bitwise") {
    Mesh1D mesh(1.0, 48);
    TripleSpec triple = TripleSpec::make(TripleKind::PLaplace, 3.0, mesh);
    DriftSpec drift = make_p_laplace_drift(triple, 0.0, 0.0, 0.0);
    NoiseEnvironment env = NoiseEnvironment::make(11, triple, flow_noise(0.0, 0.0, 0));
    StepperConfig cfg;
    FlowRun run = FlowRun::make(drift, env, -2.0, 3.0, 1e-6, cfg);
    RandomStream rs(2, 2);
    Field v = gauss_field(mesh, rs);
    Field a = run.transformed_drift(0.5, v);
    Field b = p_laplace_apply(v, drift);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);

    Field z = run.solve_Z(-1.0, 1.0, v);
    RandomPDEProblem prob;
    prob.triple = triple;
    prob.t_start = -1.0;
    prob.t_end = 1.0;
    prob.initial = v;
    prob.rhs = [&](double, const Field& f) { return p_laplace_apply(f, drift); };
    Trajectory direct = integrate(prob, cfg);
    CHECK(z.values == direct.back().values);
}

TEST_CASE("linearity probe: affine terms cancel when A is the Laplacian and mu = 0") {
    Mesh1D mesh(1.0, 32);
    TripleSpec triple = TripleSpec::make(TripleKind::RDE, 2.0, mesh);
    DriftSpec drift = make_rde_drift(triple, nullptr, 0.0, 0.0, 0.0, 1.0);
    NoiseEnvironment env = NoiseEnvironment::make(33, triple, flow_noise(0.0, 1.0));
    StepperConfig cfg;
    FlowRun run = FlowRun::make(drift, env, -2.0, 2.0, 1e-6, cfg);
    RandomStream rs(3, 3);
    for (int i = 0; i < 20; ++i) {
        Field v = gauss_field(mesh, rs);
        Field two{mesh, 2.0 * v.values};
        Field defect{mesh, run.transformed_drift(0.25, two).values -
                               2.0 * run.transformed_drift(0.25, v).values};
        CHECK(triple.h_norm(defect) < 1e-10);
    }
}

TEST_CASE("finite-difference consistency of the solved Z trajectory") {
    Mesh1D mesh(1.0, 32);
    TripleSpec triple = TripleSpec::make(TripleKind::PLaplace, 3.0, mesh);
    DriftSpec drift = make_p_laplace_drift(triple, 0.0, 0.5, 1.0);
    NoiseParams np = flow_noise(0.5, 1.0, 4, 2.5e-3);
    np.eigenvalue_decay = 3.0;
    NoiseEnvironment env = NoiseEnvironment::make(44, triple, np);
    Field x{mesh, 0.7 * triple.dirichlet_eigenvector(1).values};
    auto fd_resid = [&](double dt) {
        StepperConfig cfg;
        cfg.dt = dt;
        FlowRun run = FlowRun::make(drift, env, -1.0, 1.0, 1e-6, cfg);
        Trajectory z = run.solve_Z_trajectory(-1.0, 1.0, x, -1.0);
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < z.times.size(); ++i) {
            Field fd{mesh, (z.states[i + 1].values - z.states[i].values) / dt};
            Field rhs = run.transformed_drift(z.times[i + 1], z.states[i + 1]);
            worst = std::max(worst, triple.h_norm(fd - rhs));
        }
        return worst;
    };
    const double r1 = fd_resid(1e-2);
    const double r2 = fd_resid(5e-3);
    CHECK(r2 <= 0.7 * r1); // O(dt) decay
}

TEST_CASE("flow identities for Z and S") {
    Mesh1D mesh(1.0, 32);
    TripleSpec triple = TripleSpec::make(TripleKind::PLaplace, 3.0, mesh);
    DriftSpec drift = make_p_laplace_drift(triple, 0.0, 0.5, 1.0);
    NoiseEnvironment env = NoiseEnvironment::make(55, triple, flow_noise(0.5, 1.0));
    StepperConfig cfg;
    FlowRun run = FlowRun::make(drift, env, -3.0, 2.0, 1e-6, cfg);
    RandomStream rs(4, 4);
    Field x = gauss_field(mesh, rs);

    // Z(s,s) returns the datum unchanged; S(s,s) is a conjugation roundtrip
    CHECK(run.solve_Z(0.5, 0.5, x).values == x.values);
    CHECK(triple.h_norm(run.flow_S(0.5, 0.5, x) - x) <= 1e-12 * (1.0 + triple.h_norm(x)));

    const double s = -2.0, t = 1.0;
    Field z_one = run.solve_Z(s, t, x);
    Field s_one = run.flow_S(s, t, x);
    for (double frac : {0.31, 0.55, 0.83}) {
        const double r = s + frac * (t - s) + cfg.dt / 2.0; // off the one-shot grid
        Field z_two = run.solve_Z(r, t, run.solve_Z(s, r, x));
        Field s_two = run.flow_S(r, t, run.flow_S(s, r, x));
        const double budget = 5.0 * cfg.dt * (1.0 + run.last_rhs_scale());
        CHECK(triple.h_norm(z_one - z_two) <= budget);
        CHECK(triple.h_norm(s_one - s_two) <= budget);
    }
}

TEST_CASE("continuity in the initial datum with the pathwise factor") {
    Mesh1D mesh(1.0, 32);
    TripleSpec triple = TripleSpec::make(TripleKind::PLaplace, 3.0, mesh);
    DriftSpec drift = make_p_laplace_drift(triple, 0.0, 0.5, 1.0);
    NoiseEnvironment env = NoiseEnvironment::make(66, triple, flow_noise(0.5, 1.0));
    StepperConfig cfg;
    FlowRun run = FlowRun::make(drift, env, -2.0, 2.0, 1e-6, cfg);
    RandomStream rs(5, 5);
    const double s = -1.5, t = 1.0;
    for (int i = 0; i < 10; ++i) {
        Field x = gauss_field(mesh, rs);
        Field y = gauss_field(mesh, rs);
        // monotone part contracts; the zero-order term contributes k(s,t)^{-1}
        const double zfac = 1.0 / run.k(s, t);
        const double lhs_z = triple.h_norm(run.solve_Z(s, t, x) - run.solve_Z(s, t, y));
        CHECK(lhs_z <= zfac * triple.h_norm(x - y) * 1.05);
        const double lhs_s = triple.h_norm(run.flow_S(s, t, x) - run.flow_S(s, t, y));
        const double sfac = zfac * run.mu_at(s) / run.mu_at(t);
        CHECK(lhs_s <= sfac * triple.h_norm(x - y) * 1.05);
    }
}

TEST_CASE("right-continuity surrogate in the start time") {
    Mesh1D mesh(1.0, 32);
    TripleSpec triple = TripleSpec::make(TripleKind::PLaplace, 3.0, mesh);
    DriftSpec drift = make_p_laplace_drift(triple, 0.0, 0.5, 1.0);
    NoiseEnvironment env = NoiseEnvironment::make(77, triple, flow_noise(0.5, 1.0));
    StepperConfig cfg;
    FlowRun run = FlowRun::make(drift, env, -2.0, 2.0, 1e-6, cfg);
    // smooth datum and short horizon so the start-time memory stays above
    // the solver floor and is not swamped by the first-step transient
    Field x{mesh, 0.8 * triple.dirichlet_eigenvector(1).values +
                      0.3 * triple.dirichlet_eigenvector(2).values};
    const double s = -1.0, t = -0.75;
    Field base = run.solve_Z(s, t, x);
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {0.1, 0.05, 0.025}) {
        const double d = triple.h_norm(run.solve_Z(s + delta, t, x) - base);
        CHECK(d <= prev * (1.0 + 1e-9) + 1e-10);
        prev = d;
    }
}

TEST_CASE("cocycle property for the autonomous drift") {
    Mesh1D mesh(1.0, 32);
    TripleSpec triple = TripleSpec::make(TripleKind::PLaplace, 3.0, mesh);
    DriftSpec drift = make_p_laplace_drift(triple, 0.0, 0.5, 1.0);
    NoiseEnvironment env = NoiseEnvironment::make(88, triple, flow_noise(0.5, 1.0));
    StepperConfig cfg;
    const double tol = 1e-6;
    FlowRun run = FlowRun::make(drift, env, -3.0, 2.0, tol, cfg);
    RandomStream rs(7, 7);
    Field x = gauss_field(mesh, rs);
    CHECK(run.check_cocycle(0.0, 1.0, x) == 0.0); // identity shift is exact
    const double defect = run.check_cocycle(1.0, 2.0, x);
    CHECK(defect <= 5.0 * (tol + cfg.dt * (1.0 + run.last_rhs_scale())));
}

TEST_CASE("cocycle negative control: time-inhomogeneous reaction breaks the identity") {
    Mesh1D mesh(1.0, 32);
    TripleSpec triple = TripleSpec::make(TripleKind::RDE, 2.0, mesh);
    DriftSpec drift = make_rde_drift(
        triple, [](double t, double) { return 4.0 * std::sin(1.3 * t); }, 0.0, 16.0, 0.0, 1.0);
    NoiseEnvironment env = NoiseEnvironment::make(99, triple, flow_noise(0.0, 1.0));
    StepperConfig cfg;
    FlowRun run = FlowRun::make(drift, env, -3.0, 2.0, 1e-6, cfg);
    RandomStream rs(8, 8);
    Field x = gauss_field(mesh, rs);
    const double defect = run.check_cocycle(1.0, 2.0, x);
    // reported, not asserted small: the mismatch clearly exceeds the solver
    // tolerances, in contrast to the autonomous case
    CHECK(defect > 1e-3);
}

TEST_CASE("ito-form residual of the original equation decays with dt") {
    Mesh1D mesh(1.0, 48);
    TripleSpec triple = TripleSpec::make(TripleKind::PLaplace, 3.0, mesh);
    DriftSpec drift = make_p_laplace_drift(triple, 0.0, 0.5, 1.0);
    NoiseParams np = flow_noise(0.5, 1.0, 4, 2.5e-3);
    np.eigenvalue_decay = 3.0;
    NoiseEnvironment env = NoiseEnvironment::make(11, triple, np);
    Field x{mesh, 0.8 * triple.dirichlet_eigenvector(1).values +
                      0.3 * triple.dirichlet_eigenvector(2).values};
    std::vector<double> dts = {2e-2, 1e-2, 5e-3};
    std::vector<double> res;
    for (double dt : dts) {
        StepperConfig cfg;
        cfg.dt = dt;
        FlowRun run = FlowRun::make(drift, env, -2.0, 2.0, 1e-6, cfg);
        res.push_back(ito_residual(run, -1.0, 1.0, x));
    }
    const double order = std::log(res.front() / res.back()) / std::log(dts.front() / dts.back());
    CHECK(order >= 0.4);
    CHECK(res.back() < 1.0);
}
