#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "attractorlab/gelfand.hpp"
#include "attractorlab/oracles.hpp"
#include "attractorlab/rng.hpp"

using namespace attractorlab;

namespace {
Field gauss_field(const Mesh1D& mesh, RandomStream& rs, double amp = 1.0) {
    Field v(mesh);
    for (int i = 0; i < v.size(); ++i) v[i] = amp * rs.gaussian();
    return v;
}
} // namespace

TEST_CASE("norms vanish only at zero; pairing is the H inner product") {
    Mesh1D mesh(2.0, 50);
    for (auto kind : {TripleKind::PLaplace, TripleKind::PME, TripleKind::RDE}) {
        const double alpha = kind == TripleKind::RDE ? 2.0 : 3.0;
        TripleSpec triple = TripleSpec::make(kind, alpha, mesh);
        Field zero(mesh);
        CHECK(triple.h_norm(zero) == 0.0);
        CHECK(triple.v_norm(zero) == 0.0);
        RandomStream rs(4, int(kind));
        Field v = gauss_field(mesh, rs);
        CHECK(triple.h_norm(v) > 0.0);
        CHECK(triple.v_norm(v) > 0.0);
        // bilinearity and h_norm² = dual_pair(v,v)
        Field w = gauss_field(mesh, rs);
        Field u = gauss_field(mesh, rs);
        const double lhs = triple.dual_pair(w, {mesh, 2.0 * v.values + u.values});
        const double rhs = 2.0 * triple.dual_pair(w, v) + triple.dual_pair(w, u);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        CHECK(triple.dual_pair(v, v) ==
              doctest::Approx(triple.h_norm(v) * triple.h_norm(v)).epsilon(1e-12));
    }
}

TEST_CASE("rayleigh quotient of the first eigenvector, with mesh refinement") {
    const double L = 2.0;
    auto rayleigh = [&](int N) {
        Mesh1D mesh(L, N);
        TripleSpec triple = TripleSpec::make(TripleKind::PLaplace, 2.0, mesh);
        Field e1 = triple.dirichlet_eigenvector(1);
        const double vn = triple.v_norm(e1), hn = triple.h_norm(e1);
        return vn * vn / (hn * hn);
    };
    const double target = M_PI * M_PI / (L * L);
    const double r200 = rayleigh(200);
    CHECK(r200 == doctest::Approx(target).epsilon(0.02));
    // first-order flux discretization: doubling N stays within the quoted tolerance
    CHECK(std::abs(rayleigh(400) - target) <= std::abs(r200 - target) + 1e-12);
}

TEST_CASE("embedding constant dominates the H/V ratio on random fields") {
    Mesh1D mesh(1.5, 64);
    RandomStream rs(21, 0);
    for (auto kind : {TripleKind::PLaplace, TripleKind::PME, TripleKind::RDE}) {
        const double alpha = kind == TripleKind::RDE ? 2.0 : 3.5;
        TripleSpec triple = TripleSpec::make(kind, alpha, mesh);
        for (int i = 0; i < 1000; ++i) {
            Field v = gauss_field(mesh, rs, i % 2 ? 0.1 : 10.0);
            const double hn = triple.h_norm(v), vn = triple.v_norm(v);
            CHECK(hn * hn <= triple.embedding_lambda() * vn * vn * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("p-laplace apply: zero field, p=2 reduction, barenblatt derivative") {
    Mesh1D mesh(1.0, 64);
    TripleSpec t2 = TripleSpec::make(TripleKind::PLaplace, 2.0, mesh);
    DriftSpec d2 = make_p_laplace_drift(t2, 0.0, 0.0, 0.0);
    CHECK(t2.h_norm(p_laplace_apply(Field(mesh), d2)) == 0.0);

    RandomStream rs(3, 9);
    Field v = gauss_field(mesh, rs);
    Field lap = t2.laplacian(v);
    Field pl = p_laplace_apply(v, d2);
    CHECK(t2.h_norm(pl - lap) < 1e-12 * t2.h_norm(lap));

    // profile derivative against the closed form at alpha = 3, N = 400
    auto bp = oracles::BarenblattParams::make(3.0, 1, 1.0);
    const double r1 = oracles::barenblatt_support_radius(1.0, bp);
    Mesh1D fine(2.4 * r1, 400);
    TripleSpec t3 = TripleSpec::make(TripleKind::PLaplace, 3.0, fine);
    DriftSpec d3 = make_p_laplace_drift(t3, 0.0, 0.0, 0.0);
    Field u = oracles::barenblatt_field(1.0, fine.length / 2.0, fine, bp);
    Field got = p_laplace_apply(u, d3);
    Field expect(fine);
    const double dt = 1e-6;
    for (int i = 0; i < expect.size(); ++i)
        expect[i] = (oracles::barenblatt(1.0 + dt, fine.node(i) - fine.length / 2.0, bp) -
                     oracles::barenblatt(1.0 - dt, fine.node(i) - fine.length / 2.0, bp)) /
                    (2.0 * dt);
    CHECK(t3.h_norm(got - expect) / t3.h_norm(expect) < 0.03);
}

TEST_CASE("pme apply: zero, heat limit, h^{-1} monotonicity sweep") {
    Mesh1D mesh(1.0, 48);
    TripleSpec tp = TripleSpec::make(TripleKind::PME, 3.0, mesh);
    DriftSpec dp = make_pme_drift(tp, 0.0, 0.0, 0.0);
    CHECK(tp.h_norm(pme_apply(Field(mesh), dp)) == 0.0);

    TripleSpec t2 = TripleSpec::make(TripleKind::PME, 2.0, mesh);
    DriftSpec d2 = make_pme_drift(t2, 0.0, 0.0, 0.0);
    RandomStream rs(31, 0);
    Field v = gauss_field(mesh, rs);
    Field heat = t2.laplacian(v);
    CHECK(t2.h_norm(pme_apply(v, d2) - heat) < 1e-12 * t2.h_norm(heat));

    for (int i = 0; i < 1000; ++i) {
        Field a = gauss_field(mesh, rs, i % 3 ? 1.0 : 5.0);
        Field b = gauss_field(mesh, rs, i % 3 ? 1.0 : 5.0);
        const double pair = tp.dual_pair(pme_apply(a, dp) - pme_apply(b, dp), a - b);
        CHECK(pair <= 1e-10);
    }
}

TEST_CASE("rde apply: eigenvector response and reaction sweep") {
    Mesh1D mesh(1.0, 40);
    TripleSpec triple = TripleSpec::make(TripleKind::RDE, 2.0, mesh);
    DriftSpec bare = make_rde_drift(triple, nullptr, 0.0, 0.0, 0.0, 0.0);
    for (int k : {1, 3, 7}) {
        Field e = triple.dirichlet_eigenvector(k);
        Field got = rde_apply(e, 0.0, bare);
        Field expect{mesh, -triple.dirichlet_eigenvalue(k) * e.values};
        CHECK(triple.h_norm(got - expect) < 1e-10);
    }
    CHECK(triple.h_norm(rde_apply(Field(mesh), 0.3, bare)) == 0.0);

    const double slope = 0.8;
    auto G = [slope](double, double u) { return slope * std::tanh(u); };
    RandomStream rs(5, 5);
    for (int i = 0; i < 1000; ++i) {
        const double u = rs.uniform(-10.0, 10.0), v = rs.uniform(-10.0, 10.0);
        CHECK((G(0, u) - G(0, v)) * (u - v) <= slope * (u - v) * (u - v) + 1e-12);
    }
}

TEST_CASE("aux monotone operator per kind") {
    Mesh1D mesh(1.0, 32);
    RandomStream rs(6, 0);

    TripleSpec rde = TripleSpec::make(TripleKind::RDE, 2.0, mesh);
    Field v = gauss_field(mesh, rs);
    CHECK(rde.h_norm(aux_monotone_M(v, rde) - rde.laplacian(v)) == 0.0);
    CHECK(rde.h_norm(aux_monotone_M(Field(mesh), rde)) == 0.0);

    for (auto kind : {TripleKind::PLaplace, TripleKind::PME}) {
        TripleSpec triple = TripleSpec::make(kind, 3.0, mesh);
        // strong monotonicity in the V-norm: 2⟨M(u)−M(v), u−v⟩ ≤ −c‖u−v‖_V^α, measured c > 0
        double c = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 1000; ++i) {
            Field a = gauss_field(mesh, rs);
            Field b = gauss_field(mesh, rs);
            Field d = a - b;
            const double dv = triple.v_norm(d);
            if (dv < 1e-12) continue;
            const double pair =
                2.0 * triple.dual_pair(aux_monotone_M(a, triple) - aux_monotone_M(b, triple), d);
            CHECK(pair <= 1e-10);
            c = std::min(c, -pair / std::pow(dv, triple.alpha()));
        }
        CHECK(c > 0.0);
    }
}

TEST_CASE("assumption checker: pass, deliberate violation, zero drift") {
    Mesh1D mesh(1.0, 32);
    TripleSpec tp = TripleSpec::make(TripleKind::PLaplace, 3.0, mesh);
    DriftSpec good = make_p_laplace_drift(tp, 0.0, 0.0, 0.0);
    AssumptionReport rep = check_assumptions(good, 300, 42);
    CHECK(rep.coercivity_pass);
    CHECK(rep.coercivity_c > 0.0);
    CHECK(rep.monotonicity_pass);
    CHECK(rep.growth_pass);
    CHECK(rep.hemicontinuity_pass);
    CHECK(rep.strong_monotonicity_H > 0.0);

    // reaction slope exceeding the L-coercivity constant must flag FAIL
    TripleSpec tr = TripleSpec::make(TripleKind::RDE, 2.0, mesh);
    const double lam1 = tr.dirichlet_eigenvalue(1);
    const double bad_slope = 1.5 * lam1;
    DriftSpec bad = make_rde_drift(
        tr, [bad_slope](double, double u) { return bad_slope * u; }, bad_slope,
        bad_slope * bad_slope, 0.0, 0.0);
    AssumptionReport rep_bad = check_assumptions(bad, 300, 43);
    CHECK_FALSE(rep_bad.reaction_mixing_pass);

    DriftSpec ok = make_rde_drift(
        tr, [lam1](double, double u) { return 0.2 * lam1 * std::tanh(u); }, 0.2 * lam1,
        0.04 * lam1 * lam1, 0.0, 0.0);
    CHECK(check_assumptions(ok, 300, 44).reaction_mixing_pass);

    AssumptionReport zero = check_assumptions_op(
        tp, 3.0, [](double, const Field& f) { return Field(f.mesh); }, nullptr, 0.0, 100, 45);
    CHECK(zero.zero_drift);
    CHECK(zero.coercivity_pass);
    CHECK(zero.monotonicity_pass);
    CHECK(zero.growth_pass);

    // with eta = 0 every kind is monotone with measured C ~ 0
    TripleSpec tpme = TripleSpec::make(TripleKind::PME, 3.0, mesh);
    AssumptionReport rpme = check_assumptions(make_pme_drift(tpme, 0.0, 0.0, 0.0), 300, 46);
    CHECK(rpme.coercivity_pass);
    CHECK(rpme.monotonicity_C <= 1e-9);
    CHECK(rpme.strong_monotonicity_H > 0.0);
    AssumptionReport rrde = check_assumptions(make_rde_drift(tr, nullptr, 0.0, 0.0, 0.0, 0.0),
                                              300, 47);
    CHECK(rrde.coercivity_pass);
    CHECK(rrde.monotonicity_C <= 1e-9);
}

TEST_CASE("mesh mismatch is rejected") {
    Mesh1D a(1.0, 16), b(1.0, 17);
    TripleSpec triple = TripleSpec::make(TripleKind::PLaplace, 3.0, a);
    Field v(b);
    CHECK_THROWS(triple.h_norm(v));
    Field u(a), w(b);
    CHECK_THROWS(u + w);
    DriftSpec d = make_p_laplace_drift(triple, 0.0, 0.0, 0.0);
    CHECK_THROWS(p_laplace_apply(Field(b), d));
    TripleSpec pme = TripleSpec::make(TripleKind::PME, 3.0, a);
    CHECK_THROWS(pme_apply(Field(a), d)); // kind mismatch
}
