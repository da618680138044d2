#include "attractorlab/experiments.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "attractorlab/io.hpp"
#include "attractorlab/parallel.hpp"
#include "attractorlab/rng.hpp"

namespace attractorlab {

namespace fs = std::filesystem;

TripleSpec triple_from_config(const RunConfig& cfg) {
    return TripleSpec::make(triple_kind_from_string(cfg.drift_kind), cfg.alpha,
                            Mesh1D(cfg.length, cfg.mesh_n));
}

DriftSpec drift_from_config(const RunConfig& cfg) {
    TripleSpec triple = triple_from_config(cfg);
    if (cfg.drift_kind == "plaplace")
        return make_p_laplace_drift(triple, cfg.eta, cfg.mu, cfg.sigma);
    if (cfg.drift_kind == "pme") return make_pme_drift(triple, cfg.eta, cfg.mu, cfg.sigma);
    const double slope = cfg.reaction_slope;
    auto reaction = [slope](double, double u) { return slope * std::tanh(u); };
    return make_rde_drift(triple, reaction, slope, slope * slope, cfg.mu, cfg.sigma);
}

NoiseParams noise_from_config(const RunConfig& cfg) {
    NoiseParams np;
    np.modes = cfg.modes;
    np.eigenvalue_decay = cfg.gamma;
    np.q0 = cfg.q0;
    np.t_min = cfg.t_min;
    np.t_max = cfg.t_max;
    np.dt = cfg.noise_dt;
    np.burn_in = cfg.burn_in;
    np.mu = cfg.mu;
    np.sigma = cfg.sigma;
    return np;
}

StepperConfig stepper_from_config(const RunConfig& cfg) {
    StepperConfig sc;
    sc.dt = cfg.solver_dt;
    sc.newton_tol = cfg.newton_tol;
    sc.newton_max = cfg.newton_max;
    return sc;
}

double rk4_scalar(const std::function<double(double, double)>& f, double y0, double t0, double t1,
                  long steps) {
    const double dt = (t1 - t0) / steps;
    double y = y0;
    for (long i = 0; i < steps; ++i) {
        const double t = t0 + i * dt;
        const double k1 = f(t, y);
        const double k2 = f(t + dt / 2, y + dt / 2 * k1);
        const double k3 = f(t + dt / 2, y + dt / 2 * k2);
        const double k4 = f(t + dt, y + dt * k3);
        y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (y < 0.0) y = 0.0;
    }
    return y;
}

namespace {

struct Manifest {
    const RunConfig& cfg;
    std::vector<std::string> outputs;

    void write(const fs::path& dir) const {
        nlohmann::ordered_json j;
        j["tool"] = "attractor-lab";
        j["version"] = "0.1.0";
        j["subcommand"] = cfg.kind;
        j["seed"] = cfg.seed;
        j["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
        j["outputs"] = outputs;
        std::ofstream out(dir / "manifest.json");
        out << j.dump(2) << "\n";
    }
};

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error("stage '" + name + "' failed: " + e.what());
    }
}

// ------------------------------------------------------------------ oracle

void run_oracle(const RunConfig& cfg, const fs::path& dir, Manifest& man) {
    CsvWriter csv(dir / "oracle_checks.csv",
                  {"check", "index", "value", "expected", "rel_err", "pass"});
    man.outputs.push_back("oracle_checks.csv");
    bool all_pass = true;
    auto emit = [&](const std::string& name, int idx, double value, double expected, double tol) {
        const double rel =
            std::abs(value - expected) / std::max(1e-300, std::abs(expected));
        const bool pass = rel <= tol;
        all_pass = all_pass && pass;
        csv.row_mixed({name, std::to_string(idx), CsvWriter::format(value),
                       CsvWriter::format(expected), CsvWriter::format(rel), pass ? "1" : "0"});
    };

    RandomStream rs(cfg.seed, 0x0AC1E);
    for (int i = 0; i < 100; ++i) {
        const double q0 = rs.uniform(0.1, 5.0);
        const double beta = rs.uniform(1.2, 4.0);
        const double h = rs.uniform(0.1, 2.0);
        const double got = rk4_scalar(
            [&](double, double y) { return -h * std::pow(std::max(y, 0.0), beta); }, q0, 0.0, 1.0,
            100000);
        emit("comparison_rk4", i, got, oracles::comparison_closed_form(q0, beta, h), 1e-6);
    }
    for (int i = 0; i < 20; ++i) {
        const double beta = rs.uniform(1.5, 3.0);
        const double p = rs.uniform(0.5, 2.0);
        const double h = rs.uniform(0.5, 2.0);
        const double R = oracles::apriori_bound([p](double) { return p; },
                                                [h](double) { return h; }, beta, 0.0, 60.0);
        for (double span : {10.0, 50.0}) {
            const double q = rs.uniform(0.0, 3.0 * R);
            const double y = rk4_scalar(
                [&](double, double yv) { return -h * std::pow(std::max(yv, 0.0), beta) + p; }, q,
                -span, 0.0, 200000);
            emit(span == 10.0 ? "apriori_s10" : "apriori_s50", i, std::min(y, R), R,
                 1e-12 + 1.0); // recorded; pass iff y ≤ R
            all_pass = all_pass && (y <= R * (1.0 + 1e-9));
        }
    }
    {
        auto bp = oracles::BarenblattParams::make(3.0, 1, 1.0);
        emit("barenblatt_k", 0, bp.k, 0.25, 1e-12);
        emit("barenblatt_q", 0, bp.q, 1.0 / 6.0, 1e-12);
        emit("barenblatt_cm", 0, bp.c_mass,
             std::pow(10.0 / 9.0, 3.0 / 8.0) * std::pow(bp.q, 0.25), 1e-6);
        int idx = 0;
        for (double t : {1.0, 2.0, 4.0})
            emit("barenblatt_mass", idx++, oracles::barenblatt_mass_quadrature(t, bp), 1.0, 1e-3);
    }
    {
        BrownianPath beta = sample_brownian(cfg.seed, -8.0, 1.0, 1e-3);
        emit("equil_rate_unit", 0, oracles::equil_rate_bound(1.0, 4.0, 0.0, beta, -1.0, 0.0), 1.0,
             1e-9);
        emit("equil_rate_quarter", 0, oracles::equil_rate_bound(1.0, 4.0, 0.0, beta, -4.0, 0.0),
             0.25, 1e-9);
    }
    if (!all_pass) throw std::runtime_error("oracle self-tests reported failures");
}

// -------------------------------------------------------------- stationary

void run_stationary(const RunConfig& cfg, const fs::path& dir, Manifest& man) {
    const TripleSpec triple = triple_from_config(cfg);
    const StepperConfig sc = stepper_from_config(cfg);
    NoiseEnvironment env = NoiseEnvironment::make(cfg.seed, triple, noise_from_config(cfg));

    PullbackOptions opts;
    opts.t_max = cfg.t_max;
    StationarySolution sol = stage("pullback", [&] {
        return pullback_stationary(triple, env, cfg.pullback_tol, sc, opts);
    });

    {
        CsvWriter csv(dir / "stationary_u.csv", {"t", "h_norm", "v_norm"});
        for (std::size_t i = 0; i < sol.u.times.size(); ++i)
            csv.row({sol.u.times[i], triple.h_norm(sol.u.states[i]),
                     triple.v_norm(sol.u.states[i])});
        man.outputs.push_back("stationary_u.csv");
    }
    write_brownian_csv(dir / "beta.csv", env.beta());
    man.outputs.push_back("beta.csv");
    {
        nlohmann::ordered_json j;
        j["starts"] = sol.pullback_starts;
        j["gaps"] = sol.cauchy_gaps;
        j["tol"] = sol.tol;
        std::ofstream out(dir / "convergence.json");
        out << j.dump(2) << "\n";
        man.outputs.push_back("convergence.json");
    }
    if (!cfg.h_grid.empty()) {
        CsvWriter csv(dir / "stationarity.csv", {"h", "defect", "budget", "pass"});
        for (double h : cfg.h_grid) {
            const double defect = stage("stationarity_check", [&] {
                return stationarity_check(triple, env, h, cfg.pullback_tol, sc);
            });
            const double budget = 3.0 * cfg.pullback_tol;
            csv.row({h, defect, budget, defect <= budget ? 1.0 : 0.0});
        }
        man.outputs.push_back("stationarity.csv");
    }
    if (!cfg.t_grid.empty()) {
        BirkhoffReport rep = birkhoff_average(triple, sol, cfg.moment_k, cfg.t_grid);
        rep.ensemble_mean = stage("ensemble", [&] {
            return ensemble_moment(triple, noise_from_config(cfg), cfg.seed, cfg.ensemble,
                                   cfg.moment_k, cfg.pullback_tol, sc);
        });
        CsvWriter csv(dir / "birkhoff.csv", {"T", "time_average", "ensemble_mean"});
        for (std::size_t i = 0; i < rep.windows.size(); ++i)
            csv.row({rep.windows[i], rep.time_averages[i], rep.ensemble_mean});
        man.outputs.push_back("birkhoff.csv");
    }
}

// -------------------------------------------------------------------- flow

void run_flow(const RunConfig& cfg, const fs::path& dir, Manifest& man) {
    const DriftSpec drift = drift_from_config(cfg);
    const TripleSpec& triple = drift.triple;
    const StepperConfig sc = stepper_from_config(cfg);
    NoiseEnvironment env = NoiseEnvironment::make(cfg.seed, triple, noise_from_config(cfg));
    const double s_min = cfg.starts.empty() ? -2.0
                                            : *std::min_element(cfg.starts.begin(),
                                                                cfg.starts.end());
    const double t_top = std::min(cfg.t_max, 2.0);
    FlowRun run = stage("flow_setup", [&] {
        return FlowRun::make(drift, env, s_min, t_top, cfg.pullback_tol, sc);
    });

    CsvWriter csv(dir / "flow_checks.csv", {"name", "value", "budget", "pass"});
    man.outputs.push_back("flow_checks.csv");
    auto emit = [&](const std::string& name, double value, double budget) {
        csv.row_mixed({name, CsvWriter::format(value), CsvWriter::format(budget),
                       value <= budget ? "1" : "0"});
        return value <= budget;
    };

    RandomStream rs(cfg.seed, 0xF10);
    Field x(triple.mesh());
    for (int i = 0; i < x.size(); ++i) x[i] = rs.gaussian();

    ConjugationMap T = run.conjugation();
    double round = 0.0;
    for (int probe = 0; probe < 100; ++probe) {
        Field y(triple.mesh());
        for (int i = 0; i < y.size(); ++i) y[i] = rs.gaussian();
        const double t = probe % 2 ? 0.0 : t_top;
        round = std::max(round, triple.h_norm(T.inverse(t, T.forward(t, y)) - y));
    }
    emit("conjugation_roundtrip", round, 1e-12 * (1.0 + triple.h_norm(x)));
    emit("identity_t_eq_s", triple.h_norm(run.flow_S(0.0, 0.0, x) - x),
         1e-12 * (1.0 + triple.h_norm(x)));

    const double s = s_min / 2.0, t = t_top / 2.0;
    Field one_shot = run.solve_Z(s, t, x);
    const double r_mid = s + 0.5 * (t - s) + sc.dt / 2.0;
    Field two_leg = run.solve_Z(r_mid, t, run.solve_Z(s, r_mid, x));
    const double budget = 5.0 * sc.dt * (1.0 + run.last_rhs_scale());
    emit("flow_midpoint_Z", triple.h_norm(one_shot - two_leg), budget);
    Field s_one = run.flow_S(s, t, x);
    Field s_two = run.flow_S(r_mid, t, run.flow_S(s, r_mid, x));
    emit("flow_midpoint_S", triple.h_norm(s_one - s_two), budget);

    emit("cocycle_s0_exact", run.check_cocycle(0.0, t_top / 2.0, x), 0.0);
    const double coc = stage("cocycle", [&] { return run.check_cocycle(1.0, t_top, x); });
    emit("cocycle_defect", coc, 5.0 * (cfg.pullback_tol + sc.dt * (1.0 + run.last_rhs_scale())));

    // smooth probes from here on: white-noise data put O(1/h) gradients under
    // the drift, and the resulting first-step transient swamps the small-δ
    // and Riemann-sum behavior these identities are about
    Field smooth{triple.mesh(), 0.8 * triple.dirichlet_eigenvector(1).values +
                                    0.3 * triple.dirichlet_eigenvector(2).values};

    // short horizon: the start-time memory must stay above the solver floor
    const double t_short = s + 0.25;
    Field base = run.solve_Z(s, t_short, smooth);
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (double delta : {0.1, 0.05, 0.025}) {
        const double d = triple.h_norm(run.solve_Z(s + delta, t_short, smooth) - base);
        monotone = monotone && d <= prev + 1e-10;
        prev = d;
    }
    csv.row_mixed({"right_continuity_monotone", CsvWriter::format(prev), "0",
                   monotone ? "1" : "0"});
    emit("ito_residual", ito_residual(run, s, t, smooth),
         5.0 * std::sqrt(sc.dt) * (1.0 + std::abs(drift.mu)) *
             (1.0 + drift.additive_scale + env.trace()) * (1.0 + triple.h_norm(smooth)));
}

// ------------------------------------------------------------------ absorb

void run_absorb(const RunConfig& cfg, const fs::path& dir, Manifest& man) {
    const DriftSpec drift = drift_from_config(cfg);
    const StepperConfig sc = stepper_from_config(cfg);
    NoiseEnvironment env = NoiseEnvironment::make(cfg.seed, drift.triple, noise_from_config(cfg));
    std::vector<double> starts = cfg.starts;
    if (starts.empty()) starts = {-2.0, -4.0, -8.0, -16.0};
    const double s_min = *std::min_element(starts.begin(), starts.end());
    FlowRun run = stage("flow_setup", [&] {
        return FlowRun::make(drift, env, s_min, 0.0, cfg.pullback_tol, sc);
    });
    AbsorptionReport rep = stage("absorption", [&] {
        return absorption_radius(run, 0.0, starts, cfg.samples, cfg.seed);
    });
    CsvWriter csv(dir / "absorb.csv", {"s", "empirical", "R", "pass"});
    for (std::size_t i = 0; i < rep.starts.size(); ++i)
        csv.row({rep.starts[i], rep.empirical[i], rep.R,
                 rep.empirical[i] <= rep.R ? 1.0 : 0.0});
    man.outputs.push_back("absorb.csv");
    nlohmann::ordered_json j;
    j["R"] = rep.R;
    j["eta"] = rep.eta;
    j["s0"] = rep.s0;
    j["comparison_mode"] = rep.comparison_mode;
    j["pass"] = rep.pass;
    j["ratio"] = rep.ratio;
    std::ofstream out(dir / "absorb.json");
    out << j.dump(2) << "\n";
    man.outputs.push_back("absorb.json");
    if (!rep.pass) throw std::runtime_error("absorption check failed");
}

// ---------------------------------------------------------------- collapse

void run_collapse(const RunConfig& cfg, const fs::path& dir, Manifest& man) {
    const DriftSpec drift = drift_from_config(cfg);
    const StepperConfig sc = stepper_from_config(cfg);
    NoiseEnvironment env = NoiseEnvironment::make(cfg.seed, drift.triple, noise_from_config(cfg));
    std::vector<double> starts = cfg.starts;
    if (starts.empty())
        for (int i = 1; i <= 10; ++i) starts.push_back(-1.2 * i);
    const double s_min = *std::min_element(starts.begin(), starts.end());
    FlowRun run = stage("flow_setup", [&] {
        return FlowRun::make(drift, env, s_min, 0.0, cfg.pullback_tol, sc);
    });
    RandomStream rs(cfg.seed, 0xC0);
    Field x(drift.triple.mesh());
    for (int i = 0; i < x.size(); ++i) x[i] = cfg.ball_radius * rs.gaussian();
    CollapseReport rep =
        stage("collapse", [&] { return collapse_rate_check(run, x, starts, 0.0); });
    CsvWriter csv(dir / "collapse.csv", {"s", "observed_sq", "bound", "pass"});
    for (std::size_t i = 0; i < rep.s.size(); ++i)
        csv.row({rep.s[i], rep.observed_sq[i], rep.bound[i],
                 rep.observed_sq[i] <= rep.bound[i] * (1.0 + rep.slack) ? 1.0 : 0.0});
    man.outputs.push_back("collapse.csv");
    if (!rep.pass) throw std::runtime_error("collapse rate bound violated");
}

// -------------------------------------------------------------------- sync

void run_sync(const RunConfig& cfg, const fs::path& dir, Manifest& man) {
    RunConfig c = cfg;
    c.mu = 0.0; // additive-noise experiment
    const DriftSpec drift = drift_from_config(c);
    const TripleSpec& triple = drift.triple;
    const StepperConfig sc = stepper_from_config(c);
    std::vector<double> t_list = cfg.t_grid;
    if (t_list.empty()) t_list = {10.0, 25.0, 50.0};

    // two concentrated early-time bumps with disjoint supports; ball_radius
    // doubles as the bump mass knob
    const double t_bump = 1e-3;
    auto bp = oracles::BarenblattParams::make(std::max(cfg.alpha, 2.5), 1, cfg.ball_radius);
    Field x(triple.mesh());
    Field y = x;
    const double L = triple.mesh().length;
    y.values += oracles::barenblatt_field(t_bump, L / 3.0, triple.mesh(), bp).values;
    y.values += oracles::barenblatt_field(t_bump, 2.0 * L / 3.0, triple.mesh(), bp).values;

    auto points = stage("sync_mc", [&] {
        return synchronization_mc(drift, noise_from_config(c), x, y, t_list, cfg.ensemble,
                                  cfg.eps, cfg.seed, sc);
    });
    CsvWriter csv(dir / "sync.csv",
                  {"t", "exceed_prob", "wilson_lo", "wilson_hi", "order_violations"});
    for (const auto& p : points)
        csv.row({p.t, p.probability, p.wilson_lo, p.wilson_hi, double(p.order_violations)});
    man.outputs.push_back("sync.csv");
}

// ----------------------------------------------------------------- entropy

void run_entropy(const RunConfig& cfg, const fs::path& dir, Manifest& man) {
    const Mesh1D mesh(cfg.length, cfg.mesh_n);
    std::vector<double> deltas = cfg.delta_grid;
    if (deltas.empty())
        for (int i = 0; i < 8; ++i) deltas.push_back(0.04 * std::pow(10.0, -i / 7.0));
    CsvWriter csv(dir / "entropy.csv",
                  {"delta", "count", "entropy_lower", "mass", "separation"});
    man.outputs.push_back("entropy.csv");
    std::vector<double> lx, ly;
    EntropyLowerReport last;
    for (double d : deltas) {
        EntropyLowerReport rep = stage("entropy_lower", [&] {
            return barenblatt_entropy_lower(d, cfg.alpha, 1, mesh, cfg.entropy_s0);
        });
        csv.row({d, double(rep.count), rep.entropy_lower, rep.mass, rep.separation});
        lx.push_back(std::log(1.0 / d));
        ly.push_back(std::log(double(rep.count)));
        last = rep;
    }
    // least-squares slope of log N vs log(1/δ)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double n = double(lx.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    const int m = int(std::min<long>(last.count, 10));
    auto cloud = bump_combination_cloud(last, mesh, m);
    const TripleSpec l2 = TripleSpec::make(TripleKind::PLaplace, std::max(cfg.alpha, 2.0), mesh);
    auto cover = stage("covering", [&] {
        return covering_entropy(l2, cloud, {last.separation / 3.0});
    });
    CsvWriter cc(dir / "cover.csv", {"delta_h", "count", "required"});
    cc.row({cover[0].delta, double(cover[0].count), std::pow(2.0, m - 1)});
    man.outputs.push_back("cover.csv");

    nlohmann::ordered_json j;
    j["slope"] = slope;
    j["exponent"] = last.exponent;
    j["cover_count"] = cover[0].count;
    j["cover_required"] = std::pow(2.0, m - 1);
    std::ofstream out(dir / "entropy.json");
    out << j.dump(2) << "\n";
    man.outputs.push_back("entropy.json");
    if (cover[0].count < std::pow(2.0, m - 1))
        throw std::runtime_error("covering count below the packing lower bound");
}

} // namespace

void run_experiment(const RunConfig& cfg) {
    validate(cfg);
    const fs::path dir(cfg.out);
    fs::create_directories(dir);
    Manifest man{cfg, {}};
    if (cfg.kind == "oracle")
        run_oracle(cfg, dir, man);
    else if (cfg.kind == "stationary")
        run_stationary(cfg, dir, man);
    else if (cfg.kind == "flow")
        run_flow(cfg, dir, man);
    else if (cfg.kind == "absorb")
        run_absorb(cfg, dir, man);
    else if (cfg.kind == "collapse")
        run_collapse(cfg, dir, man);
    else if (cfg.kind == "sync")
        run_sync(cfg, dir, man);
    else if (cfg.kind == "entropy")
        run_entropy(cfg, dir, man);
    else
        throw ConfigError("unknown experiment kind " + cfg.kind);
    man.write(dir);
}

} // namespace attractorlab
