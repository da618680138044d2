#include "attractorlab/flow.hpp"

#include <cmath>
#include <cstring>

#include "attractorlab/rng.hpp"

namespace attractorlab {

namespace {

// exact on grid points, linear in between (only half-step retries land there)
double grid_lookup(const TimeGrid& g, const Eigen::VectorXd& vals, double t) {
    const double x = (t - g.t_min) / g.dt;
    const long i = std::lround(x);
    if (std::abs(x - i) <= 1e-9) {
        if (i < 0 || i >= g.count) throw WindowExhausted("lookup outside sampled window");
        return vals[i];
    }
    const long lo = long(std::floor(x));
    if (lo < 0 || lo + 1 >= g.count) throw WindowExhausted("lookup outside sampled window");
    const double w = x - lo;
    return (1.0 - w) * vals[lo] + w * vals[lo + 1];
}

} // namespace

Field ConjugationMap::forward(double t, const Field& y) const {
    const double m = grid_lookup(noise->ou().grid, noise->ou().mu_values, t);
    return {y.mesh, m * y.values - u->u.at_time_interp(t).values};
}

Field ConjugationMap::inverse(double t, const Field& y) const {
    const double m = grid_lookup(noise->ou().grid, noise->ou().mu_values, t);
    return {y.mesh, (y.values + u->u.at_time_interp(t).values) / m};
}

FlowRun FlowRun::make(const DriftSpec& drift, const NoiseEnvironment& noise, double s_min,
                      double t_max, double pullback_tol, const StepperConfig& cfg) {
    if (drift.mu != noise.mu())
        throw std::invalid_argument("FlowRun: drift.mu and noise multiplier disagree");
    if (drift.additive_scale != noise.sigma())
        throw std::invalid_argument("FlowRun: additive scales disagree");
    FlowRun run;
    run.drift_ = drift;
    run.noise_ = noise;
    run.cfg_ = cfg;
    run.s_min_ = s_min;
    run.t_max_ = t_max;
    run.pullback_tol_ = pullback_tol;
    PullbackOptions opts;
    opts.t_eval_min = s_min;
    opts.t_max = t_max;
    run.stat_ = pullback_stationary(drift.triple, noise, pullback_tol, cfg, opts);
    return run;
}

double FlowRun::z_at(double t) const {
    return grid_lookup(noise_.ou().grid, noise_.ou().z_values, t);
}

double FlowRun::mu_at(double t) const {
    return grid_lookup(noise_.ou().grid, noise_.ou().mu_values, t);
}

Field FlowRun::u_at(double t) const {
    const auto& traj = stat_.u;
    // exact state on recorded grid times, interpolation only off-grid
    const double x = (t - traj.times.front()) / cfg_.dt;
    const long i = std::lround(x);
    if (std::abs(x - i) <= 1e-9 && i >= 0 && std::size_t(i) < traj.times.size())
        return traj.states[std::size_t(i)];
    return traj.at_time_interp(t);
}

double FlowRun::k(double s, double t) const {
    const auto& g = noise_.ou().grid;
    auto zint = [&](double r) {
        // cumulative trapezoid lookup with linear interpolation off-grid
        const double x = (r - g.t_min) / g.dt;
        const long i = std::lround(x);
        if (std::abs(x - i) <= 1e-9) return noise_.z_integral(g.time(i));
        const long lo = long(std::floor(x));
        const double w = x - lo;
        return (1.0 - w) * noise_.z_integral(g.time(lo)) + w * noise_.z_integral(g.time(lo + 1));
    };
    return std::exp(-drift_.mu * (zint(t) - zint(s)));
}

Field FlowRun::a_omega(double t, const Field& v) const {
    // on a finite mesh every state lies in V, so the stationary ingredient is
    // always folded in; no separate branch for inadmissible u_t exists here
    const double m = mu_at(t);
    const double z = z_at(t);
    Field u = u_at(t);
    Field arg{v.mesh, (v.values + u.values) / m};
    Field a = drift_apply(t, arg, drift_);
    Field mu_term = aux_monotone_M(u, drift_.triple);
    // u solves du = M(u)dt + σ μ dW, so the conjugated drift carries −M(u_t)
    return {v.mesh, m * a.values + (drift_.mu * z) * u.values - mu_term.values};
}

Field FlowRun::transformed_drift(double t, const Field& v) const {
    Field out = a_omega(t, v);
    out.values += (drift_.mu * z_at(t)) * v.values;
    return out;
}

Trajectory FlowRun::solve_Z_trajectory(double s, double t, const Field& x,
                                       double record_from) const {
    if (!(s <= t)) throw std::invalid_argument("solve_Z: need s <= t");
    if (s < s_min_ - 1e-9 || t > t_max_ + 1e-9)
        throw WindowExhausted("solve_Z: outside the prepared flow window");
    RandomPDEProblem prob;
    prob.triple = drift_.triple;
    prob.t_start = s;
    prob.t_end = t;
    prob.initial = x;
    prob.rhs = [this, s](double r, const Field& vt) {
        const double kk = k(s, r);
        Field w{vt.mesh, vt.values / kk};
        Field a = a_omega(r, w);
        return Field{vt.mesh, kk * a.values};
    };
    StepperConfig c = cfg_;
    c.record_from = record_from;
    Trajectory traj = integrate(prob, c);
    last_rhs_scale_ = std::max(last_rhs_scale_, traj.max_rhs_norm);
    // map the k-transformed states back to Z
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        traj.states[i].values /= k(s, traj.times[i]);
    return traj;
}

Field FlowRun::solve_Z(double s, double t, const Field& x) const {
    if (s == t) return x;
    std::uint64_t fp = 0x9E3779B97F4A7C15ULL;
    for (int i = 0; i < x.size(); ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &x.values[i], 8);
        fp = splitmix64(fp ^ bits);
    }
    const auto key = std::make_tuple(std::lround(s / cfg_.dt), std::lround(t / cfg_.dt), fp);
    const auto hit = endpoint_cache_.find(key);
    if (hit != endpoint_cache_.end()) return hit->second;
    Field out = solve_Z_trajectory(s, t, x, t).back();
    endpoint_cache_.emplace(key, out);
    return out;
}

Field FlowRun::flow_S(double s, double t, const Field& x) const {
    ConjugationMap T = conjugation();
    return T.inverse(t, solve_Z(s, t, T.forward(s, x)));
}

Trajectory FlowRun::flow_S_trajectory(double s, double t, const Field& x,
                                      double record_from) const {
    ConjugationMap T = conjugation();
    Trajectory traj = solve_Z_trajectory(s, t, T.forward(s, x), record_from);
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        traj.states[i] = T.inverse(traj.times[i], traj.states[i]);
    return traj;
}

double FlowRun::check_cocycle(double s, double t, const Field& x) const {
    Field lhs = flow_S(s, t, x);
    NoiseEnvironment shifted = noise_.shift(s);
    FlowRun other = FlowRun::make(drift_, shifted, s_min_ - s, t_max_ - s, pullback_tol_, cfg_);
    Field rhs = other.flow_S(0.0, t - s, x);
    return drift_.triple.h_norm(lhs - rhs);
}

double ito_residual(const FlowRun& run, double s, double t, const Field& x) {
    Trajectory S = run.flow_S_trajectory(s, t, x, s);
    const auto& drift = run.drift();
    const auto& noise = run.noise();
    const double mu = drift.mu;
    const double sigma = drift.additive_scale;
    Field acc(x.mesh);
    for (std::size_t i = 0; i + 1 < S.times.size(); ++i) {
        const double ti = S.times[i];
        const double dt = S.times[i + 1] - ti;
        Field a = drift_apply(ti, S.states[i], drift);
        const double dbeta = noise.beta().at(S.times[i + 1]) - noise.beta().at(ti);
        // Stratonovich μS∘dβ in Itô form: (μ²/2)S dt + μS dβ, left-point sums
        acc.values += dt * (a.values + 0.5 * mu * mu * S.states[i].values) +
                      (mu * dbeta) * S.states[i].values;
    }
    if (sigma != 0.0 && noise.params().modes > 0)
        acc.values += sigma * noise.w_increment(s, t).values;
    Field residual{x.mesh, S.back().values - x.values - acc.values};
    return drift.triple.h_norm(residual);
}

} // namespace attractorlab
