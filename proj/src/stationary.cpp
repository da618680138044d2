#include "attractorlab/stationary.hpp"

#include <cmath>

#include "attractorlab/parallel.hpp"

namespace attractorlab {

namespace {

void check_grid_alignment(double value, double dt, const char* what) {
    const double x = value / dt;
    if (std::abs(x - std::lround(x)) > 1e-6)
        throw std::invalid_argument(std::string(what) + " must lie on the noise grid");
}

} // namespace

Trajectory pullback_leg(const TripleSpec& triple, const NoiseEnvironment& noise, double start,
                        const Field& initial, double record_from, double t_max,
                        const StepperConfig& cfg) {
    RandomPDEProblem prob;
    prob.triple = triple;
    prob.t_start = start;
    prob.t_end = t_max;
    prob.initial = initial;
    prob.rhs = [&triple](double, const Field& v) { return aux_monotone_M(v, triple); };
    const double sigma = noise.sigma();
    if (sigma != 0.0 && noise.params().modes > 0) {
        const double dt = cfg.dt;
        prob.forcing = [&noise, sigma, dt](double t) {
            Field inc = noise.w_increment(t, t + dt);
            return Field{inc.mesh, (sigma * noise.mu_t(t) / dt) * inc.values};
        };
    }
    StepperConfig c = cfg;
    c.record_from = record_from;
    c.record_stride = 1;
    return integrate(prob, c);
}

StationarySolution pullback_stationary(const TripleSpec& triple, const NoiseEnvironment& noise,
                                       double tol, const StepperConfig& cfg,
                                       const PullbackOptions& opts) {
    if (tol <= 0.0) throw std::invalid_argument("pullback_stationary: tol must be positive");
    const double t_max = opts.t_max != 0.0 ? opts.t_max : noise.t_max();
    const double t_eval_min = opts.t_eval_min;
    if (t_max > noise.t_max() + 1e-12 || t_eval_min < noise.t_min())
        throw WindowExhausted("pullback_stationary: evaluation window outside noise window");
    check_grid_alignment(t_max - t_eval_min, cfg.dt, "evaluation window");
    check_grid_alignment(opts.base_horizon, cfg.dt, "base horizon");

    StationarySolution sol;
    sol.tol = tol;
    sol.t_eval_min = t_eval_min;
    sol.t_max = t_max;

    Field zero(triple.mesh());
    Trajectory prev;
    int rises = 0;
    const int max_runs = opts.forced_runs >= 0 ? opts.forced_runs : opts.max_doublings;
    for (int n = 0; n <= max_runs; ++n) {
        const double s = t_eval_min - std::ldexp(opts.base_horizon, n); // 2^n T0
        if (s < noise.t_min() - 1e-12)
            throw WindowExhausted("pullback_stationary: start precedes noise window");
        Trajectory cur = pullback_leg(triple, noise, s, zero, t_eval_min, t_max, cfg);
        sol.pullback_starts.push_back(s);
        if (n > 0) {
            double gap = 0.0;
            for (std::size_t i = 0; i < cur.states.size(); ++i)
                gap = std::max(gap, triple.h_norm(cur.states[i] - prev.states[i]));
            if (!sol.cauchy_gaps.empty() && gap > sol.cauchy_gaps.back()) {
                if (++rises >= 3)
                    throw PullbackNotCauchy(
                        "pullback gaps increased over 3 consecutive doublings");
            } else {
                rises = 0;
            }
            sol.cauchy_gaps.push_back(gap);
            if ((gap < tol && opts.forced_runs < 0) || (opts.forced_runs >= 0 && n == max_runs)) {
                sol.u = std::move(cur);
                return sol;
            }
        }
        prev = std::move(cur);
    }
    if (opts.forced_runs >= 0) {
        sol.u = std::move(prev);
        return sol;
    }
    throw WindowExhausted("pullback_stationary: gap did not reach tol within the window");
}

ContractionReport verify_contraction(const TripleSpec& triple, const NoiseEnvironment& noise,
                                     const Field& x, const Field& y, double s1, double s2,
                                     double t, const StepperConfig& cfg, double slack) {
    if (!(s1 <= s2 && s2 <= t)) throw std::invalid_argument("verify_contraction: need s1<=s2<=t");
    ContractionReport rep;
    rep.slack = slack;
    const double alpha = triple.alpha();
    Trajectory a = pullback_leg(triple, noise, s2, x, t, t, cfg);
    Trajectory b = pullback_leg(triple, noise, s1, y, s2, t, cfg);
    const double d_t = triple.h_norm(a.back() - b.back());
    rep.observed_sq = d_t * d_t;
    rep.c_hat = measure_lambda_sm(
        triple, alpha, [&](const Field& v) { return aux_monotone_M(v, triple); }, 400, 1234);
    if (alpha > 2.0) {
        const double beta = alpha / 2.0;
        rep.bound = (t > s2) ? std::pow((beta - 1.0) * rep.c_hat * (t - s2), -1.0 / (beta - 1.0))
                             : std::numeric_limits<double>::infinity();
    } else {
        const double d0 = triple.h_norm(x - b.at_time(s2));
        rep.bound = d0 * d0 * std::exp(-rep.c_hat * (t - s2));
    }
    rep.pass = rep.observed_sq <= rep.bound * (1.0 + slack) + 1e-14;
    return rep;
}

double stationarity_check(const TripleSpec& triple, const NoiseEnvironment& noise, double h,
                          double tol, const StepperConfig& cfg) {
    if (h == 0.0) return 0.0;
    PullbackOptions base;
    base.t_eval_min = std::min(0.0, h);
    base.t_max = std::max(0.0, h);
    StationarySolution u = pullback_stationary(triple, noise, tol, cfg, base);

    NoiseEnvironment shifted = noise.shift(h);
    PullbackOptions sh;
    sh.t_eval_min = base.t_eval_min - h;
    sh.t_max = base.t_max - h;
    StationarySolution u_shift = pullback_stationary(triple, shifted, tol, cfg, sh);

    return triple.h_norm(u.u.at_time(h) - u_shift.u.at_time(0.0));
}

BirkhoffReport birkhoff_average(const TripleSpec& triple, const StationarySolution& solution,
                                int k, const std::vector<double>& windows) {
    if (k < 1) throw std::invalid_argument("birkhoff_average: k must be >= 1");
    BirkhoffReport rep;
    rep.k = k;
    rep.windows = windows;
    const auto& u = solution.u;
    for (double T : windows) {
        double acc = 0.0;
        double prev_t = 0.0, prev_v = 0.0;
        bool started = false;
        for (std::size_t i = 0; i < u.times.size(); ++i) {
            const double t = u.times[i];
            if (t < -1e-12 || t > T + 1e-9) continue;
            const double val = std::pow(triple.h_norm(u.states[i]), k);
            if (started) acc += 0.5 * (t - prev_t) * (val + prev_v);
            prev_t = t;
            prev_v = val;
            started = true;
        }
        rep.time_averages.push_back(T > 0 ? acc / T : 0.0);
    }
    return rep;
}

double ensemble_moment(const TripleSpec& triple, const NoiseParams& params, std::uint64_t seed,
                       int n_seeds, int k, double tol, const StepperConfig& cfg) {
    std::vector<double> vals(n_seeds);
    parallel_for(n_seeds, [&](int i) {
        NoiseEnvironment env = NoiseEnvironment::make(seed + 1000 + i, triple, params);
        PullbackOptions opts;
        opts.t_max = std::min(1.0, env.t_max());
        StationarySolution u = pullback_stationary(triple, env, tol, cfg, opts);
        vals[i] = std::pow(triple.h_norm(u.u.at_time(0.0)), k);
    });
    double mean = 0.0;
    for (double v : vals) mean += v;
    return mean / n_seeds;
}

} // namespace attractorlab
