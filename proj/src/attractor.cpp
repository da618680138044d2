#include "attractorlab/attractor.hpp"

#include <cmath>

#include "attractorlab/parallel.hpp"
#include "attractorlab/rng.hpp"

namespace attractorlab {

namespace {

Field random_unit_field(const TripleSpec& triple, RandomStream& rs, double norm) {
    Field v(triple.mesh());
    for (int i = 0; i < v.size(); ++i) v[i] = rs.gaussian();
    const double n = triple.h_norm(v);
    if (n > 0.0) v.values *= norm / n;
    return v;
}

} // namespace

AbsorptionReport absorption_radius(const FlowRun& run, double t,
                                   const std::vector<double>& probe_starts,
                                   int samples_per_start, std::uint64_t seed) {
    const DriftSpec& drift = run.drift();
    const TripleSpec& triple = drift.triple;
    const double alpha = triple.alpha();
    if (triple.kind() != TripleKind::PLaplace || drift.eta != 0.0 || alpha <= 2.0)
        throw std::invalid_argument(
            "absorption_radius: radius chain is derived for the pure p-Laplace drift, alpha > 2");
    AbsorptionReport rep;
    const double lambda = triple.embedding_lambda();
    const double mu = drift.mu;

    const bool unforced = (drift.additive_scale == 0.0 || run.noise().params().modes == 0);
    const bool trivial_multiplier = (mu == 0.0);
    double u_sup = 0.0;
    for (const auto& s : run.stationary().u.states)
        u_sup = std::max(u_sup, triple.h_norm(s));
    rep.comparison_mode = unforced && trivial_multiplier && u_sup < 1e-12;

    // quadrature grid: the stepper grid of the prepared flow window
    const double dt = run.cfg().dt;
    const double lo = run.s_min();
    const long n = std::lround((t - lo) / dt);

    if (rep.comparison_mode) {
        // d‖Z‖²/dt ≤ −2λ^{−α/2}(‖Z‖²)^{α/2}: data-free comparison decay, no
        // forcing terms at all. The bound at the latest admissible start
        // dominates every earlier one.
        const double beta = alpha / 2.0;
        const double s0 = probe_starts.empty()
                              ? lo
                              : *std::max_element(probe_starts.begin(), probe_starts.end());
        rep.eta = 0.0;
        rep.s0 = s0;
        rep.R = std::sqrt(oracles::comparison_closed_form(
            std::numeric_limits<double>::infinity(), beta,
            2.0 * std::pow(lambda, -alpha / 2.0) * (t - s0)));
    } else {
        // Young-split constants (see header): the dissipation scale a(t) and
        // the additive remainder f̃(t) in d‖Z‖²/dt ≤ g‖Z‖² + f̃
        const double K1 = (std::pow(2.0, alpha) / alpha) *
                          std::pow(2.0 * (alpha - 1.0) / alpha, alpha - 1.0);
        const double K2 = ((alpha - 1.0) / alpha) * std::pow(alpha / 2.0, -1.0 / (alpha - 1.0)) *
                          std::pow(2.0, alpha / (alpha - 1.0));
        std::vector<double> g(n + 1), f(n + 1), times(n + 1);
        for (long i = 0; i <= n; ++i) {
            const double r = lo + i * dt;
            times[i] = r;
            const double m = run.mu_at(r);
            const double z = run.z_at(r);
            Field u = run.u_at(r);
            const double uV = triple.v_norm(u);
            const double uH = triple.h_norm(u);
            const double a = std::pow(2.0, 1.0 - alpha) * std::pow(lambda, -alpha / 2.0) *
                             std::pow(m, 2.0 - alpha);
            const double eps3 = 0.25 * alpha * a;
            g[i] = -0.25 * alpha * a + 2.0 * mu * z;
            const double uVa = std::pow(uV, alpha);
            f[i] = (0.5 * alpha - 1.0) * a +
                   (K1 * std::pow(m, 2.0 - alpha) +
                    K2 * std::pow(m, (alpha - 2.0) / (alpha - 1.0)) + 2.0 +
                    std::pow(m, 2.0 - alpha)) *
                       uVa +
                   (mu * z * uH) * (mu * z * uH) / eps3;
        }
        // cumulative ∫ g
        std::vector<double> G(n + 1, 0.0);
        for (long i = 1; i <= n; ++i) G[i] = G[i - 1] + 0.5 * dt * (g[i - 1] + g[i]);
        const double avg_full = (G[n] - G[0]) / (t - lo);
        if (avg_full >= 0.0)
            throw ErgodicRateNotNegative("absorption_radius: averaged dissipation not negative");
        rep.eta = -0.5 * avg_full;
        // largest s ≤ 0 with (1/(t−s))∫ₛᵗ g ≤ −η for every earlier s
        long i_s0 = -1;
        bool valid_below = true;
        std::vector<bool> ok(n + 1, false);
        for (long i = 0; i <= n; ++i) {
            const double s = times[i];
            if (s >= t || s > 0.0) break;
            ok[i] = (G[n] - G[i]) / (t - s) <= -rep.eta;
        }
        for (long i = 0; i <= n; ++i) {
            const double s = times[i];
            if (s >= t || s > 0.0) break;
            if (!ok[i]) valid_below = false;
            if (valid_below) i_s0 = i;
        }
        if (i_s0 < 0)
            throw ErgodicRateNotNegative("absorption_radius: no valid absorption time in window");
        rep.s0 = times[i_s0];
        // R² = e^{G(s0,t)}(e^{η|s0|/2} + ∫_{lo}^{s0} e^{−η(s0−r)} f̃) + ∫_{s0}^t e^{G(r,t)} f̃
        double tail = 0.0;
        for (long i = 1; i <= i_s0; ++i)
            tail += 0.5 * dt *
                    (std::exp(-rep.eta * (rep.s0 - times[i - 1])) * f[i - 1] +
                     std::exp(-rep.eta * (rep.s0 - times[i])) * f[i]);
        double forced = 0.0;
        for (long i = i_s0 + 1; i <= n; ++i)
            forced += 0.5 * dt *
                      (std::exp(G[n] - G[i - 1]) * f[i - 1] + std::exp(G[n] - G[i]) * f[i]);
        const double head = std::exp(G[n] - G[i_s0]) * (std::exp(rep.eta * std::abs(rep.s0) / 2.0) + tail);
        rep.R = std::sqrt(head + forced);
    }

    // empirical: tempered data ‖x‖² ≤ e^{η|s|/2} pushed through Z
    RandomStream rs(seed, 0xAB50);
    double worst = 0.0;
    for (double s : probe_starts) {
        if (!rep.comparison_mode && s > rep.s0) continue;
        double station_max = 0.0;
        for (int j = 0; j < samples_per_start; ++j) {
            const double radius =
                rep.comparison_mode ? 1.0 : std::exp(rep.eta * std::abs(s) / 4.0);
            Field x = random_unit_field(triple, rs, radius * rs.uniform(0.5, 1.0));
            Field zimg = run.solve_Z(s, t, x);
            station_max = std::max(station_max, triple.h_norm(zimg));
        }
        rep.starts.push_back(s);
        rep.empirical.push_back(station_max);
        worst = std::max(worst, station_max);
    }
    rep.ratio = rep.R > 0.0 ? worst / rep.R : (worst == 0.0 ? 0.0 : 1e300);
    rep.pass = worst <= rep.R * (1.0 + 1e-6) + 1e-12;
    return rep;
}

double hausdorff_distance(const TripleSpec& triple, const std::vector<Field>& a,
                          const std::vector<Field>& b) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto one_sided = [&](const std::vector<Field>& p, const std::vector<Field>& q) {
        double worst = 0.0;
        for (const auto& x : p) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& y : q) best = std::min(best, triple.h_norm(x - y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

AttractorEstimate pullback_cloud(const FlowRun& run, double t, const std::vector<double>& starts,
                                 int seeds_of_initial, std::uint64_t seed, double ball_radius) {
    if (starts.empty()) throw std::invalid_argument("pullback_cloud: empty start list");
    for (std::size_t i = 1; i < starts.size(); ++i)
        if (starts[i] >= starts[i - 1])
            throw std::invalid_argument("pullback_cloud: starts must be decreasing");
    const TripleSpec& triple = run.drift().triple;
    AttractorEstimate est;
    est.t_eval = t;
    est.starts = starts;
    std::vector<Field> prev_sub;
    for (double s : starts) {
        RandomStream rs(seed, 0xC10D);
        std::vector<Field> sub;
        for (int j = 0; j < seeds_of_initial; ++j) {
            Field x = random_unit_field(triple, rs, ball_radius * rs.uniform(0.0, 1.0));
            try {
                sub.push_back(run.flow_S(s, t, x));
            } catch (const NewtonDiverged&) {
                ++est.failures;
            }
        }
        if (!prev_sub.empty() && !sub.empty())
            est.convergence_diagnostic =
                std::max(est.convergence_diagnostic, hausdorff_distance(triple, prev_sub, sub));
        for (auto& fpt : sub) est.cloud.push_back(fpt);
        prev_sub = std::move(sub);
    }
    return est;
}

CollapseReport collapse_rate_check(const FlowRun& run, const Field& x,
                                   const std::vector<double>& s_list, double t, double slack) {
    const DriftSpec& drift = run.drift();
    const double alpha = drift.triple.alpha();
    if (alpha <= 2.0)
        throw std::invalid_argument("collapse_rate_check: requires alpha > 2");
    CollapseReport rep;
    rep.t = t;
    rep.slack = slack;
    rep.lambda_sm = measure_lambda_sm(
        drift.triple, alpha, [&](const Field& v) { return drift_apply(0.0, v, drift); }, 400,
        991);
    if (rep.lambda_sm <= 0.0)
        throw std::invalid_argument("collapse_rate_check: drift is not strongly monotone");
    double s_min = *std::min_element(s_list.begin(), s_list.end());
    Field eta_proxy = run.flow_S(s_min, t, x);
    rep.pass = true;
    for (double s : s_list) {
        Field img = run.flow_S(s, t, x);
        const double d = drift.triple.h_norm(img - eta_proxy);
        rep.s.push_back(s);
        rep.observed_sq.push_back(d * d);
        const double b = oracles::equil_rate_bound(rep.lambda_sm, alpha, drift.mu,
                                                   run.noise().beta(), s, t);
        rep.bound.push_back(b);
        if (d * d > b * (1.0 + slack) + 1e-14) rep.pass = false;
    }
    return rep;
}

std::vector<SyncPoint> synchronization_mc(const DriftSpec& drift, const NoiseParams& noise_params,
                                          const Field& x, const Field& y,
                                          const std::vector<double>& t_list, int paths, double eps,
                                          std::uint64_t seed, const StepperConfig& cfg) {
    const TripleSpec& triple = drift.triple;
    triple.require_mesh(x);
    triple.require_mesh(y);
    for (int i = 0; i < x.size(); ++i)
        if (x[i] > y[i] + 1e-12)
            throw std::invalid_argument("synchronization_mc: interval requires x <= y nodewise");
    if (drift.mu != 0.0)
        throw std::invalid_argument("synchronization_mc: additive-noise experiment, mu must be 0");
    const double t_end = *std::max_element(t_list.begin(), t_list.end());
    const double order_tol = 100.0 * cfg.newton_tol + 1e-8;

    std::vector<std::vector<char>> exceed(t_list.size(), std::vector<char>(paths, 0));
    std::vector<long> violations(paths, 0);

    parallel_for(paths, [&](int p) {
        NoiseParams np = noise_params;
        np.mu = 0.0;
        NoiseEnvironment env = NoiseEnvironment::make(seed + 7919 * p, triple, np);
        Field mid{x.mesh, 0.5 * (x.values + y.values)};
        const Field* inits[3] = {&x, &mid, &y};
        std::vector<Trajectory> trajs(3);
        const double sigma = drift.additive_scale;
        for (int c = 0; c < 3; ++c) {
            RandomPDEProblem prob;
            prob.triple = triple;
            prob.t_start = 0.0;
            prob.t_end = t_end;
            prob.initial = *inits[c];
            prob.rhs = [&drift](double r, const Field& v) { return drift_apply(r, v, drift); };
            if (sigma != 0.0 && np.modes > 0) {
                const double dt = cfg.dt;
                prob.forcing = [&env, sigma, dt](double r) {
                    Field inc = env.w_increment(r, r + dt);
                    return Field{inc.mesh, (sigma / dt) * inc.values};
                };
            }
            StepperConfig c2 = cfg;
            c2.record_from = 0.0;
            trajs[c] = integrate(prob, c2);
        }
        for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
            const Field a = trajs[0].at_time(t_list[ti]);
            const Field m = trajs[1].at_time(t_list[ti]);
            const Field b = trajs[2].at_time(t_list[ti]);
            double diam = std::max({triple.h_norm(a - m), triple.h_norm(m - b),
                                    triple.h_norm(a - b)});
            exceed[ti][p] = diam > eps ? 1 : 0;
            for (int i = 0; i < a.size(); ++i)
                if (a[i] > b[i] + order_tol) {
                    ++violations[p];
                    break;
                }
        }
    });

    std::vector<SyncPoint> out;
    long viol_total = 0;
    for (long v : violations) viol_total += v;
    for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
        SyncPoint pt;
        pt.t = t_list[ti];
        long hits = 0;
        for (int p = 0; p < paths; ++p) hits += exceed[ti][p];
        pt.probability = double(hits) / paths;
        const WilsonInterval w = wilson_95(hits, paths);
        pt.wilson_lo = w.lo;
        pt.wilson_hi = w.hi;
        pt.order_violations = viol_total;
        out.push_back(pt);
    }
    return out;
}

std::vector<CoveringCount> covering_entropy(const TripleSpec& triple,
                                            const std::vector<Field>& cloud,
                                            const std::vector<double>& delta_grid) {
    if (cloud.empty()) throw std::invalid_argument("covering_entropy: empty cloud");
    std::vector<CoveringCount> out;
    for (double delta : delta_grid) {
        std::vector<char> covered(cloud.size(), 0);
        long count = 0;
        for (std::size_t p = 0; p < cloud.size(); ++p) {
            if (covered[p]) continue;
            // candidates near the pick; refine the center toward their 1-center
            std::vector<std::size_t> cand;
            for (std::size_t j = 0; j < cloud.size(); ++j)
                if (!covered[j] && triple.h_norm(cloud[j] - cloud[p]) <= 2.0 * delta)
                    cand.push_back(j);
            Field center = cloud[p];
            for (int it = 1; it <= 64; ++it) {
                double far_d = -1.0;
                std::size_t far_j = p;
                for (std::size_t j : cand) {
                    const double d = triple.h_norm(cloud[j] - center);
                    if (d > far_d) {
                        far_d = d;
                        far_j = j;
                    }
                }
                if (far_d <= delta * (1.0 + 1e-12)) break;
                center.values += (cloud[far_j].values - center.values) / (it + 1.0);
            }
            if (triple.h_norm(cloud[p] - center) > delta * (1.0 + 1e-12)) center = cloud[p];
            for (std::size_t j : cand)
                if (triple.h_norm(cloud[j] - center) <= delta * (1.0 + 1e-9)) covered[j] = 1;
            covered[p] = 1;
            ++count;
        }
        out.push_back({delta, count, std::log(double(count))});
    }
    return out;
}

EntropyLowerReport barenblatt_entropy_lower(double ball_radius, double alpha, int d,
                                            const Mesh1D& domain, double s0) {
    if (alpha <= 2.0)
        throw std::invalid_argument("barenblatt_entropy_lower: alpha must exceed 2");
    if (s0 >= 0.0) throw std::invalid_argument("barenblatt_entropy_lower: s0 must be negative");
    if (ball_radius <= 0.0)
        throw std::invalid_argument("barenblatt_entropy_lower: radius must be positive");
    const double L = domain.length;
    const double span = -s0;
    if (L < 2.0 * ball_radius) throw NoBumpFits("domain shorter than one bump support");

    EntropyLowerReport rep;
    rep.ball_radius = ball_radius;
    rep.span = span;
    const double k = 1.0 / (alpha - 2.0 + alpha / d);
    // support of U(span, ·) fits the ball: C(M) = q (ε span^{−k})^{α/(α−1)}
    const double q = (alpha - 2.0) / alpha * std::pow(k / d, 1.0 / (alpha - 1.0));
    const double c_target = q * std::pow(ball_radius * std::pow(span, -k), alpha / (alpha - 1.0));
    // invert the mass normalization at that cutoff constant
    oracles::BarenblattParams probe = oracles::BarenblattParams::make(alpha, d, 1.0);
    // mass scales monotonically with C; bisect on mass so that c_mass matches
    double lo = 1e-12, hi = 1.0;
    auto c_of_mass = [&](double m) { return oracles::BarenblattParams::make(alpha, d, m).c_mass; };
    while (c_of_mass(hi) < c_target) hi *= 2.0;
    while (c_of_mass(lo) > c_target) lo *= 0.5;
    for (int it = 0; it < 100; ++it) {
        const double mid = std::sqrt(lo * hi);
        (c_of_mass(mid) < c_target ? lo : hi) = mid;
    }
    rep.mass = std::sqrt(lo * hi);
    rep.params = oracles::BarenblattParams::make(alpha, d, rep.mass);
    (void)probe;

    const long count = long(std::floor((L - 2.0 * ball_radius) / (2.0 * ball_radius))) + 1;
    if (count < 1) throw NoBumpFits("domain shorter than one bump support");
    rep.count = count;
    const double spacing = L / double(count);
    for (long i = 0; i < count; ++i) rep.centers.push_back((i + 0.5) * spacing);

    // pairwise separation: differing combinations differ by at least one
    // disjointly supported bump, so the minimum distance is one bump's L² norm
    const int nq = 4000;
    const double r_sup = oracles::barenblatt_support_radius(span, rep.params);
    double acc = 0.0;
    for (int i = 0; i <= nq; ++i) {
        const double xi = -r_sup + 2.0 * r_sup * i / nq;
        const double u = oracles::barenblatt(span, xi, rep.params);
        acc += (i == 0 || i == nq ? 0.5 : 1.0) * u * u;
    }
    rep.separation = std::sqrt(acc * 2.0 * r_sup / nq);
    rep.exponent = d * (alpha - 2.0) / (d * (alpha - 2.0) + alpha);
    rep.entropy_lower = count * std::log(2.0);
    return rep;
}

std::vector<Field> bump_combination_cloud(const EntropyLowerReport& report, const Mesh1D& mesh,
                                          int m) {
    m = int(std::min<long>(m, report.count));
    if (m < 1 || m > 20) throw std::invalid_argument("bump_combination_cloud: m out of range");
    std::vector<Field> bumps;
    for (int i = 0; i < m; ++i) {
        Field b(mesh);
        for (int j = 0; j < b.size(); ++j)
            b[j] = oracles::barenblatt(report.span, mesh.node(j) - report.centers[i],
                                       report.params);
        bumps.push_back(std::move(b));
    }
    std::vector<Field> cloud;
    cloud.reserve(1u << m);
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        Field f(mesh);
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) f.values += bumps[i].values;
        cloud.push_back(std::move(f));
    }
    return cloud;
}

WilsonInterval wilson_95(long successes, long trials) {
    if (trials <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = double(trials);
    const double p = double(successes) / n;
    const double denom = 1.0 + z * z / n;
    const double center = (p + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

} // namespace attractorlab
