#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "attractorlab/experiments.hpp"
#include "attractorlab/oracles.hpp"
#include "attractorlab/rng.hpp"

using namespace attractorlab;
using namespace attractorlab::oracles;

TEST_CASE("comparison closed form: frozen points") {
    CHECK(comparison_closed_form(1.0, 2.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(comparison_closed_form(3.7, 2.5, 0.0) == doctest::Approx(3.7).epsilon(1e-12));
    CHECK(comparison_closed_form(0.0, 2.0, 5.0) == 0.0);
    // initial-data-free limit
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(comparison_closed_form(inf, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(comparison_closed_form(1e12, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS(comparison_closed_form(1.0, 1.0, 1.0));
}

TEST_CASE("comparison closed form matches RK4 for constant h") {
    RandomStream rs(7, 1);
    for (int i = 0; i < 30; ++i) {
        const double q0 = rs.uniform(0.2, 3.0);
        const double beta = rs.uniform(1.3, 3.5);
        const double h = rs.uniform(0.2, 2.0);
        const double exact = comparison_closed_form(q0, beta, h * 1.0);
        const double rk = rk4_scalar(
            [&](double, double y) { return -h * std::pow(std::max(y, 0.0), beta); }, q0, 0.0, 1.0,
            200000);
        CHECK(std::abs(rk - exact) / exact < 1e-8);
    }
}

TEST_CASE("comparison bound is nonincreasing in the h integral and below q0") {
    RandomStream rs(8, 1);
    for (int i = 0; i < 200; ++i) {
        const double q0 = rs.uniform(0.01, 10.0);
        const double beta = rs.uniform(1.1, 4.0);
        const double h1 = rs.uniform(0.0, 3.0);
        const double h2 = h1 + rs.uniform(0.0, 3.0);
        const double b1 = comparison_closed_form(q0, beta, h1);
        const double b2 = comparison_closed_form(q0, beta, h2);
        CHECK(b1 <= q0 * (1.0 + 1e-12));
        CHECK(b2 <= b1 * (1.0 + 1e-12));
    }
}

TEST_CASE("apriori bound: constant coefficients") {
    const double R = apriori_bound([](double) { return 1.0; }, [](double) { return 1.0; }, 2.0,
                                   0.0, 60.0);
    CHECK(R == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

    // p ≡ 0 hits the delta floor
    const double R0 = apriori_bound([](double) { return 0.0; }, [](double) { return 1.0; }, 2.0,
                                    0.0, 1e9);
    CHECK(R0 == doctest::Approx(std::sqrt(2.0e-8)).epsilon(1e-6));

    // integrated subsolutions land below R from deep starts
    RandomStream rs(11, 0);
    for (int i = 0; i < 10; ++i) {
        const double beta = rs.uniform(1.5, 3.0);
        const double p = rs.uniform(0.5, 2.0);
        const double h = rs.uniform(0.5, 2.0);
        const double Rc = apriori_bound([p](double) { return p; }, [h](double) { return h; },
                                        beta, 0.0, 60.0);
        const double q = rs.uniform(0.0, 3.0 * Rc);
        const double y = rk4_scalar(
            [&](double, double yv) { return -h * std::pow(std::max(yv, 0.0), beta) + p; }, q,
            -50.0, 0.0, 100000);
        CHECK(y <= Rc * (1.0 + 1e-9));
    }
    CHECK_THROWS_AS(apriori_bound([](double) { return 1e-6; }, [](double) { return 1e-3; }, 1.05,
                                  0.0, 2.0),
                    WindowExhausted);
}

TEST_CASE("barenblatt parameters at alpha=3, d=1") {
    auto bp = BarenblattParams::make(3.0, 1, 1.0);
    CHECK(bp.k == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(bp.q == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    // closed-form normalization for alpha = 3: C(M) = (10 M / 9)^{3/8} q^{1/4}
    const double c_exact = std::pow(10.0 / 9.0, 3.0 / 8.0) * std::pow(bp.q, 0.25);
    CHECK(bp.c_mass == doctest::Approx(c_exact).epsilon(1e-6));
}

TEST_CASE("barenblatt: support cutoff and mass conservation") {
    auto bp = BarenblattParams::make(3.0, 1, 1.0);
    const double r1 = barenblatt_support_radius(1.0, bp);
    CHECK(barenblatt(1.0, r1 * 1.0001, bp) == 0.0);
    CHECK(barenblatt(1.0, -r1 * 1.2, bp) == 0.0);
    CHECK(barenblatt(1.0, 0.0, bp) > 0.0);
    for (double t : {1.0, 2.0, 4.0})
        CHECK(barenblatt_mass_quadrature(t, bp) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_THROWS(barenblatt(0.0, 0.1, bp));
}

TEST_CASE("barenblatt satisfies the p-Laplace equation weakly inside the bump") {
    const double alpha = 3.0;
    auto bp = BarenblattParams::make(alpha, 1, 1.0);
    const double r1 = barenblatt_support_radius(1.0, bp);
    const double L = 2.4 * r1;
    Mesh1D mesh(L, 4000);
    TripleSpec triple = TripleSpec::make(TripleKind::PLaplace, alpha, mesh);
    DriftSpec drift = make_p_laplace_drift(triple, 0.0, 0.0, 0.0);

    Field u = barenblatt_field(1.0, L / 2.0, mesh, bp);
    Field div_flux = p_laplace_apply(u, drift);
    // ∂_t U by centered differencing of the closed form
    const double dt = 1e-6;
    Field dudt(mesh);
    for (int i = 0; i < dudt.size(); ++i)
        dudt[i] = (barenblatt(1.0 + dt, mesh.node(i) - L / 2.0, bp) -
                   barenblatt(1.0 - dt, mesh.node(i) - L / 2.0, bp)) /
                  (2.0 * dt);
    // smooth test function supported well inside the bump
    Field phi(mesh);
    for (int i = 0; i < phi.size(); ++i) {
        const double xi = (mesh.node(i) - L / 2.0) / (0.6 * r1);
        phi[i] = std::abs(xi) < 1.0 ? std::exp(-1.0 / (1.0 - xi * xi)) : 0.0;
    }
    const double resid = triple.h_inner(dudt - div_flux, phi);
    const double scale = triple.h_norm(phi) * triple.h_norm(dudt);
    CHECK(std::abs(resid) / scale < 1e-3);
}

TEST_CASE("equilibrium rate bound: constant-integrand values and monotonicity") {
    BrownianPath beta = sample_brownian(3, -8.0, 1.0, 1e-3);
    CHECK(equil_rate_bound(1.0, 4.0, 0.0, beta, -1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(equil_rate_bound(1.0, 4.0, 0.0, beta, -4.0, 0.0) ==
          doctest::Approx(0.25).epsilon(1e-12));
    CHECK(equil_rate_bound(1.0, 4.0, 0.0, beta, 0.0, 0.0) ==
          std::numeric_limits<double>::infinity());
    double prev = std::numeric_limits<double>::infinity();
    for (double s : {-0.5, -1.0, -2.0, -4.0, -8.0}) {
        const double b = equil_rate_bound(0.7, 3.0, 0.5, beta, s, 0.0);
        CHECK(b <= prev * (1.0 + 1e-12));
        prev = b;
    }
}

TEST_CASE("linear SDE oracle: spectral decay without noise") {
    Mesh1D mesh(1.0, 32);
    TripleSpec triple = TripleSpec::make(TripleKind::RDE, 2.0, mesh);
    NoiseParams np;
    np.modes = 2;
    np.sigma = 0.0;
    np.t_min = -2.0;
    np.t_max = 1.0;
    NoiseEnvironment env = NoiseEnvironment::make(17, triple, np);
    const int k = 3;
    Field e = triple.dirichlet_eigenvector(k);
    Trajectory traj = linear_sde_exact(triple, env, 0.0, 1.0, e, 1e-2);
    Field expect{mesh, std::exp(-triple.dirichlet_eigenvalue(k) * 1.0) * e.values};
    CHECK(triple.h_norm(traj.back() - expect) < 1e-12);
}

TEST_CASE("linear SDE oracle: stationary mode variance") {
    Mesh1D mesh(1.0, 16);
    TripleSpec triple = TripleSpec::make(TripleKind::RDE, 2.0, mesh);
    NoiseParams np;
    np.modes = 1;
    np.q0 = 1.0;
    np.sigma = 1.0;
    np.t_min = -1.0;
    np.t_max = 6.0;
    np.dt = 1e-2;
    const double lam1 = triple.dirichlet_eigenvalue(1);
    const int seeds = 4000;
    double acc = 0.0;
    for (int s = 0; s < seeds; ++s) {
        NoiseEnvironment env = NoiseEnvironment::make(900 + s, triple, np);
        Trajectory traj = linear_sde_exact(triple, env, 0.0, 6.0, Field(mesh), 1e-2);
        Field e1 = triple.dirichlet_eigenvector(1);
        const double c = mesh.spacing() * e1.values.dot(traj.back().values);
        acc += c * c;
    }
    const double var = acc / seeds;
    CHECK(var == doctest::Approx(np.q0 / (2.0 * lam1)).epsilon(0.10));
}
