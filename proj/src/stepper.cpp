#include "attractorlab/stepper.hpp"

#include <cmath>

#include "attractorlab/tridiag.hpp"

namespace attractorlab {

long Trajectory::index_of(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-9 * (1.0 + std::abs(t))) return long(i);
    throw std::invalid_argument("Trajectory: time not recorded");
}

Field Trajectory::at_time_interp(double t) const {
    if (times.empty()) throw std::logic_error("Trajectory: empty");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    std::size_t lo = 0, hi = times.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (times[mid] <= t ? lo : hi) = mid;
    }
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return {states[lo].mesh, (1.0 - w) * states[lo].values + w * states[hi].values};
}

namespace {

// Tridiagonal Jacobian of a stencil-width-1 rhs by three colored evaluations.
struct TridiagJacobian {
    Eigen::VectorXd lower, diag, upper;
};

TridiagJacobian fd_jacobian(const std::function<Field(double, const Field&)>& rhs, double t,
                            const Field& w, const Field& base) {
    const int n = w.size();
    TridiagJacobian J;
    J.lower = Eigen::VectorXd::Zero(n);
    J.diag = Eigen::VectorXd::Zero(n);
    J.upper = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) eps[i] = 1.4901161193847656e-08 * (1.0 + std::abs(w[i]));
    for (int color = 0; color < 3; ++color) {
        Field wp = w;
        for (int i = color; i < n; i += 3) wp[i] += eps[i];
        Field rp = rhs(t, wp);
        for (int i = color; i < n; i += 3) {
            // perturbing column i touches rows i-1, i, i+1 only
            if (i > 0) J.upper[i - 1] = (rp[i - 1] - base[i - 1]) / eps[i];
            J.diag[i] = (rp[i] - base[i]) / eps[i];
            if (i + 1 < n) J.lower[i + 1] = (rp[i + 1] - base[i + 1]) / eps[i];
        }
    }
    return J;
}

} // namespace

Field step_backward_euler(const RandomPDEProblem& problem, const Field& v, double t, double dt,
                          const StepperConfig& cfg, int* iters_out, double* residual_out,
                          double* rhs_norm_out) {
    if (dt <= 0.0) throw std::invalid_argument("step_backward_euler: dt must be positive");
    const double t_new = t + dt;
    Field target = v;
    if (problem.forcing) {
        Field g = problem.forcing(t);
        target.values += dt * g.values;
    }
    const double tol = cfg.newton_tol * (1.0 + problem.triple.h_norm(v));

    Field w = v; // warm start from the previous state
    Field rhs_w = problem.rhs(t_new, w);
    Field res{w.mesh, w.values - dt * rhs_w.values - target.values};
    double res_norm = problem.triple.h_norm(res);
    int iters = 0;

    for (; iters < cfg.newton_max && res_norm > tol; ++iters) {
        TridiagJacobian J = fd_jacobian(problem.rhs, t_new, w, rhs_w);
        Eigen::VectorXd lower = -dt * J.lower;
        Eigen::VectorXd diag = Eigen::VectorXd::Ones(w.size()) - dt * J.diag;
        Eigen::VectorXd upper = -dt * J.upper;
        Eigen::VectorXd delta = solve_tridiagonal(lower, diag, upper, -res.values);

        double lambda = cfg.damping;
        bool accepted = false;
        while (lambda >= 1e-4) {
            Field w_try{w.mesh, w.values + lambda * delta};
            Field rhs_try = problem.rhs(t_new, w_try);
            Field res_try{w.mesh, w_try.values - dt * rhs_try.values - target.values};
            const double rn = problem.triple.h_norm(res_try);
            if (rn <= (1.0 - 0.25 * lambda) * res_norm || rn <= tol) {
                w = std::move(w_try);
                rhs_w = std::move(rhs_try);
                res = std::move(res_try);
                res_norm = rn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }

    if (res_norm > tol) {
        // fixed-point fallback for degenerate Jacobians
        double omega = 0.5;
        for (int k = 0; k < 400 && res_norm > tol; ++k) {
            Field w_try{w.mesh, w.values - omega * res.values};
            Field rhs_try = problem.rhs(t_new, w_try);
            Field res_try{w.mesh, w_try.values - dt * rhs_try.values - target.values};
            const double rn = problem.triple.h_norm(res_try);
            if (rn < res_norm) {
                w = std::move(w_try);
                rhs_w = std::move(rhs_try);
                res = std::move(res_try);
                res_norm = rn;
                omega = std::min(1.0, omega * 1.3);
            } else {
                omega *= 0.5;
                if (omega < 1e-6) break;
            }
            ++iters;
        }
    }

    if (res_norm > tol)
        throw NewtonDiverged("backward Euler solve did not reach tolerance", t_new);

    if (iters_out) *iters_out = iters;
    if (residual_out) *residual_out = res_norm;
    if (rhs_norm_out) *rhs_norm_out = problem.triple.h_norm(rhs_w);
    return w;
}

Trajectory integrate(const RandomPDEProblem& problem, const StepperConfig& cfg) {
    if (problem.t_end < problem.t_start)
        throw std::invalid_argument("integrate: t_end before t_start");
    problem.triple.require_mesh(problem.initial);

    Trajectory traj;
    auto record = [&](double t, const Field& s, int it, double res) {
        traj.times.push_back(t);
        traj.states.push_back(s);
        traj.newton_iters.push_back(it);
        traj.residuals.push_back(res);
    };

    Field state = problem.initial;
    double t = problem.t_start;
    if (t >= cfg.record_from) record(t, state, 0, 0.0);
    if (problem.t_end == problem.t_start) {
        if (traj.times.empty()) record(t, state, 0, 0.0);
        return traj;
    }

    const double span = problem.t_end - problem.t_start;
    const long n_steps = std::max(1L, std::lround(std::ceil(span / cfg.dt - 1e-9)));
    long step_index = 0;
    while (step_index < n_steps) {
        const double t_next = (step_index + 1 == n_steps)
                                  ? problem.t_end
                                  : problem.t_start + (step_index + 1) * cfg.dt;
        const double dt = t_next - t;
        int iters = 0;
        double res = 0.0, rhs_norm = 0.0;
        try {
            state = step_backward_euler(problem, state, t, dt, cfg, &iters, &res, &rhs_norm);
        } catch (const NewtonDiverged&) {
            if (!cfg.allow_halving) throw;
            // one halving retry; the forcing rate for [t, t+dt] is reused on
            // both halves so the net increment is unchanged
            ++traj.halvings;
            Field mid = step_backward_euler(problem, state, t, dt / 2.0, cfg, &iters, &res,
                                            &rhs_norm);
            StepperConfig strict = cfg;
            strict.allow_halving = false;
            RandomPDEProblem half = problem;
            double base_t = t;
            if (problem.forcing)
                half.forcing = [&problem, base_t](double) { return problem.forcing(base_t); };
            state = step_backward_euler(half, mid, t + dt / 2.0, dt / 2.0, strict, &iters, &res,
                                        &rhs_norm);
        }
        traj.max_rhs_norm = std::max(traj.max_rhs_norm, rhs_norm);
        t = t_next;
        ++step_index;
        const bool last = step_index == n_steps;
        if ((t >= cfg.record_from && step_index % cfg.record_stride == 0) || last)
            record(t, state, iters, res);
    }
    return traj;
}

} // namespace attractorlab
