#include "attractorlab/oracles.hpp"

#include <cmath>

namespace attractorlab {
namespace oracles {

namespace {

// mass of the t = 1 profile with cutoff constant C (d = 1), Simpson rule
double profile_mass(double C, double alpha, double q, int intervals) {
    const double xi_max = std::pow(C / q, (alpha - 1.0) / alpha);
    const double expo = (alpha - 1.0) / (alpha - 2.0);
    auto f = [&](double xi) {
        const double b = C - q * std::pow(xi, alpha / (alpha - 1.0));
        return b > 0.0 ? std::pow(b, expo) : 0.0;
    };
    const int n = intervals + (intervals % 2); // even
    const double dx = xi_max / n;
    double s = f(0.0) + f(xi_max);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * dx);
    return 2.0 * s * dx / 3.0; // both half-lines
}

} // namespace

BarenblattParams BarenblattParams::make(double alpha, int d, double mass) {
    if (alpha <= 2.0) throw std::invalid_argument("BarenblattParams: alpha must exceed 2");
    if (d != 1) throw std::invalid_argument("BarenblattParams: only d = 1 is discretized");
    if (mass <= 0.0) throw std::invalid_argument("BarenblattParams: mass must be positive");
    BarenblattParams p;
    p.alpha = alpha;
    p.d = d;
    p.mass = mass;
    p.k = 1.0 / (alpha - 2.0 + alpha / d);
    p.q = (alpha - 2.0) / alpha * std::pow(p.k / d, 1.0 / (alpha - 1.0));
    // bisection on the monotone map C ↦ mass
    double lo = 1e-8, hi = 1.0;
    while (profile_mass(hi, alpha, p.q, 2000) < mass) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (profile_mass(mid, alpha, p.q, 2000) < mass ? lo : hi) = mid;
    }
    p.c_mass = 0.5 * (lo + hi);
    return p;
}

double barenblatt(double t, double xi, const BarenblattParams& params) {
    if (t <= 0.0) throw std::invalid_argument("barenblatt: t must be positive");
    const double a = params.alpha;
    const double scale = std::pow(t, -params.k);
    const double arg = params.c_mass -
                       params.q * std::pow(std::abs(xi), a / (a - 1.0)) *
                           std::pow(t, -params.k * a / (params.d * (a - 1.0)));
    if (arg <= 0.0) return 0.0;
    return scale * std::pow(arg, (a - 1.0) / (a - 2.0));
}

double barenblatt_support_radius(double t, const BarenblattParams& params) {
    if (t <= 0.0) throw std::invalid_argument("barenblatt_support_radius: t must be positive");
    return std::pow(t, params.k / params.d) *
           std::pow(params.c_mass / params.q, (params.alpha - 1.0) / params.alpha);
}

Field barenblatt_field(double t, double center, const Mesh1D& mesh,
                       const BarenblattParams& params) {
    Field out(mesh);
    for (int i = 0; i < out.size(); ++i) out[i] = barenblatt(t, mesh.node(i) - center, params);
    return out;
}

double barenblatt_mass_quadrature(double t, const BarenblattParams& params, int intervals) {
    const double r = barenblatt_support_radius(t, params);
    const int n = intervals + (intervals % 2);
    const double dx = 2.0 * r / n;
    double s = barenblatt(t, -r, params) + barenblatt(t, r, params);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * barenblatt(t, -r + i * dx, params);
    return s * dx / 3.0;
}

double comparison_closed_form(double q0, double beta, double h_integral) {
    if (beta <= 1.0) throw std::invalid_argument("comparison_closed_form: beta must exceed 1");
    if (q0 < 0.0 || h_integral < 0.0)
        throw std::invalid_argument("comparison_closed_form: negative input");
    if (q0 == 0.0) return 0.0;
    const double base = std::pow(q0, -(beta - 1.0)) + (beta - 1.0) * h_integral;
    return std::pow(base, -1.0 / (beta - 1.0));
}

double apriori_bound(const std::function<double(double)>& p,
                     const std::function<double(double)>& h, double beta, double t,
                     double search_window) {
    if (beta <= 1.0) throw std::invalid_argument("apriori_bound: beta must exceed 1");
    if (search_window <= 1.0)
        throw std::invalid_argument("apriori_bound: search window too short");
    constexpr double delta_floor = 1e-8;
    const int grid = 4000;
    const double a = t - search_window;
    auto theta = [&](double r) {
        const double hr = h(r);
        if (hr <= 0.0) throw std::invalid_argument("apriori_bound: h must be positive");
        return std::pow(2.0 * std::max(p(r), delta_floor) / hr, 1.0 / beta);
    };
    double theta_min = std::numeric_limits<double>::infinity();
    double h_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        const double r = a + search_window * i / grid;
        theta_min = std::min(theta_min, theta(r));
        h_min = std::min(h_min, h(r));
    }
    // time for the data-free comparison decay to reach the theta floor
    const double tau = 2.0 * std::pow(theta_min, -(beta - 1.0)) / ((beta - 1.0) * h_min);
    const double a1 = t - tau;
    if (a1 - 1.0 < a)
        throw WindowExhausted("apriori_bound: window too short to bracket a1");
    double R = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double r = (a1 - 1.0) + (t - (a1 - 1.0)) * i / grid;
        R = std::max(R, theta(r));
    }
    return R;
}

double equil_rate_bound(double lambda_sm, double alpha, double mu, const BrownianPath& beta,
                        double s, double t) {
    if (alpha <= 2.0) throw std::invalid_argument("equil_rate_bound: alpha must exceed 2");
    if (lambda_sm <= 0.0)
        throw std::invalid_argument("equil_rate_bound: lambda_sm must be positive");
    if (!(s <= t)) throw std::invalid_argument("equil_rate_bound: s must not exceed t");
    if (s == t) return std::numeric_limits<double>::infinity();
    const long i0 = beta.grid.index(s), i1 = beta.grid.index(t);
    const double bt = beta.values[i1];
    double integral = 0.0;
    double prev = std::exp((alpha - 2.0) * mu * (beta.values[i0] - bt));
    for (long i = i0 + 1; i <= i1; ++i) {
        const double cur = std::exp((alpha - 2.0) * mu * (beta.values[i] - bt));
        integral += 0.5 * beta.grid.dt * (prev + cur);
        prev = cur;
    }
    return std::pow((alpha / 2.0 - 1.0) * lambda_sm * integral, -2.0 / (alpha - 2.0));
}

Trajectory linear_sde_exact(const TripleSpec& triple, const NoiseEnvironment& noise,
                            double t_start, double t_end, const Field& initial, double dt) {
    if (triple.kind() != TripleKind::RDE)
        throw std::invalid_argument("linear_sde_exact: needs the RDE triple");
    triple.require_mesh(initial);
    const int n = triple.mesh().interior_nodes;
    const int K = noise.params().modes;
    const double h = triple.mesh().spacing();
    const double sigma = noise.sigma();

    // initial data in the full sine basis; noise lives in the first K modes
    Eigen::VectorXd coef(n);
    std::vector<Field> modes(n);
    for (int k = 1; k <= n; ++k) {
        modes[k - 1] = triple.dirichlet_eigenvector(k);
        coef[k - 1] = h * modes[k - 1].values.dot(initial.values);
    }
    std::vector<double> q = power_decay_eigenvalues(std::max(K, 1), noise.params().eigenvalue_decay,
                                                    noise.params().q0);

    Trajectory traj;
    auto record = [&](double t) {
        Field s(triple.mesh());
        for (int k = 0; k < n; ++k) s.values += coef[k] * modes[k].values;
        traj.times.push_back(t);
        traj.states.push_back(std::move(s));
        traj.newton_iters.push_back(0);
        traj.residuals.push_back(0.0);
    };
    record(t_start);
    const long steps = std::lround((t_end - t_start) / dt);
    for (long i = 0; i < steps; ++i) {
        const double t = t_start + i * dt;
        for (int k = 0; k < n; ++k) {
            const double lam = triple.dirichlet_eigenvalue(k + 1);
            const double decay = std::exp(-lam * dt);
            double force = 0.0;
            if (k < K && sigma != 0.0) {
                const double dW =
                    noise.wiener().mode_paths[k].at(t + dt) - noise.wiener().mode_paths[k].at(t);
                // exact response to the piecewise-constant rate √q_k dW/dt
                force = sigma * std::sqrt(q[k]) * dW * (1.0 - decay) / (lam * dt);
            }
            coef[k] = decay * coef[k] + force;
        }
        record(t + dt);
    }
    return traj;
}

Field heat_exact(const TripleSpec& triple, const Field& v, double t) {
    triple.require_mesh(v);
    const int n = triple.mesh().interior_nodes;
    const double h = triple.mesh().spacing();
    Field out(triple.mesh());
    for (int k = 1; k <= n; ++k) {
        Field e = triple.dirichlet_eigenvector(k);
        const double c = h * e.values.dot(v.values) * std::exp(-triple.dirichlet_eigenvalue(k) * t);
        out.values += c * e.values;
    }
    return out;
}

} // namespace oracles
} // namespace attractorlab
