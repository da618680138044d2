#include "attractorlab/noise.hpp"

#include <cmath>

#include "attractorlab/rng.hpp"

namespace attractorlab {

namespace {

long steps_between(double t_min, double t_max, double dt) {
    const double x = (t_max - t_min) / dt;
    const long n = std::lround(x);
    if (n < 1 || std::abs(x - n) > 1e-6)
        throw std::invalid_argument("dt does not divide the time window");
    return n;
}

} // namespace

BrownianPath sample_brownian_stream(std::uint64_t seed, std::uint64_t stream_id, double t_min,
                                    double t_max, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("sample_brownian: dt must be positive");
    if (!(t_min < t_max)) throw std::invalid_argument("sample_brownian: empty window");
    const long n = steps_between(t_min, t_max, dt);
    BrownianPath p;
    p.seed = seed;
    p.grid = TimeGrid{t_min, dt, n + 1};
    if (!p.grid.contains(0.0))
        throw std::invalid_argument("sample_brownian: grid must contain t = 0");
    RandomStream rs(seed, stream_id);
    p.values.resize(n + 1);
    p.values[0] = 0.0;
    const double sd = std::sqrt(dt);
    for (long i = 1; i <= n; ++i) p.values[i] = p.values[i - 1] + sd * rs.gaussian();
    // pin β_0 = 0 exactly
    const double at0 = p.values[p.grid.index(0.0)];
    for (long i = 0; i <= n; ++i) p.values[i] -= at0;
    return p;
}

BrownianPath sample_brownian(std::uint64_t seed, double t_min, double t_max, double dt) {
    return sample_brownian_stream(seed, 0, t_min, t_max, dt);
}

BrownianPath wiener_shift(const BrownianPath& path, double h) {
    if (h == 0.0) return path;
    if (!path.grid.contains(h))
        throw WindowExhausted("wiener_shift: shift outside sampled window");
    const double pivot = path.at(h);
    BrownianPath out;
    out.seed = path.seed;
    out.grid = TimeGrid{path.grid.t_min - h, path.grid.dt, path.grid.count};
    out.values = path.values.array() - pivot;
    return out;
}

Field HWienerPath::at(double t) const {
    if (basis.empty()) throw std::logic_error("HWienerPath: no modes");
    Field out(basis[0].mesh);
    for (std::size_t k = 0; k < basis.size(); ++k)
        out.values += std::sqrt(eigenvalues[k]) * mode_paths[k].at(t) * basis[k].values;
    return out;
}

Field HWienerPath::increment(double t1, double t2) const {
    if (basis.empty()) throw std::logic_error("HWienerPath: no modes");
    Field out(basis[0].mesh);
    for (std::size_t k = 0; k < basis.size(); ++k)
        out.values += std::sqrt(eigenvalues[k]) * (mode_paths[k].at(t2) - mode_paths[k].at(t1)) *
                      basis[k].values;
    return out;
}

TimeGrid HWienerPath::grid() const {
    if (mode_paths.empty()) throw std::logic_error("HWienerPath: no modes");
    return mode_paths[0].grid;
}

Mesh1D HWienerPath::mesh() const {
    if (basis.empty()) throw std::logic_error("HWienerPath: no modes");
    return basis[0].mesh;
}

HWienerPath sample_trace_class_wiener(std::uint64_t seed, const std::vector<double>& eigenvalues,
                                      const std::vector<Field>& basis, double t_min, double t_max,
                                      double dt) {
    if (eigenvalues.size() != basis.size())
        throw std::invalid_argument("sample_trace_class_wiener: basis/eigenvalue length mismatch");
    if (basis.empty())
        throw std::invalid_argument("sample_trace_class_wiener: need at least one mode");
    HWienerPath w;
    w.eigenvalues = eigenvalues;
    w.basis = basis;
    w.trace = 0.0;
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        if (eigenvalues[k] < 0.0)
            throw std::invalid_argument("sample_trace_class_wiener: negative eigenvalue");
        w.trace += eigenvalues[k];
        require_same_mesh(basis[k], basis[0]);
        // stream 0 is reserved for the scalar Brownian driver
        w.mode_paths.push_back(sample_brownian_stream(seed, k + 1, t_min, t_max, dt));
    }
    return w;
}

HWienerPath wiener_shift(const HWienerPath& path, double h) {
    HWienerPath out = path;
    for (auto& m : out.mode_paths) m = wiener_shift(m, h);
    return out;
}

OUPath ou_stationary(const BrownianPath& beta, double mu, double burn_in) {
    const double dt = beta.grid.dt;
    const long burn_steps = std::lround(burn_in / dt);
    if (std::abs(burn_steps * dt - burn_in) > 1e-6 * std::max(1.0, dt))
        throw std::invalid_argument("ou_stationary: burn_in must be a multiple of dt");
    if (burn_steps >= beta.grid.count - 1)
        throw WindowExhausted("ou_stationary: insufficient burn-in coverage");

    const double decay = std::exp(-dt);
    const double weight = std::exp(-dt / 2.0);
    const long n = beta.grid.count;
    Eigen::VectorXd z_full(n);
    z_full[0] = 0.0;
    for (long i = 1; i < n; ++i)
        z_full[i] = decay * z_full[i - 1] + weight * (beta.values[i] - beta.values[i - 1]);

    OUPath out;
    out.mu_exponent = mu;
    out.burn_in = burn_in;
    out.grid = TimeGrid{beta.grid.time(burn_steps), dt, n - burn_steps};
    out.z_values = z_full.tail(n - burn_steps);
    out.mu_values.resize(out.z_values.size());
    for (Eigen::Index i = 0; i < out.z_values.size(); ++i)
        out.mu_values[i] = std::exp(-mu * out.z_values[i]);
    return out;
}

NoiseEnvironment NoiseEnvironment::make(std::uint64_t seed, const TripleSpec& triple,
                                        const NoiseParams& params) {
    if (params.modes < 0) throw std::invalid_argument("NoiseEnvironment: modes must be >= 0");
    if (!(params.t_min < 0.0 && 0.0 < params.t_max))
        throw std::invalid_argument("NoiseEnvironment: window must contain 0");
    NoiseEnvironment env;
    env.triple_ = triple;
    env.params_ = params;
    env.seed_ = seed;
    env.beta_ = sample_brownian_stream(seed, 0, params.t_min - params.burn_in, params.t_max,
                                       params.dt);
    const int K = std::max(params.modes, 1);
    auto basis = dirichlet_basis(triple, K);
    auto q = power_decay_eigenvalues(K, params.eigenvalue_decay, params.q0);
    if (params.modes == 0)
        for (auto& qi : q) qi = 0.0; // degenerate covariance, W ≡ 0
    // basis is orthonormal in the triple's H by construction; verify anyway
    for (int i = 0; i < K; ++i)
        for (int j = i; j < K; ++j) {
            const double ip = triple.h_inner(basis[i], basis[j]);
            if (std::abs(ip - (i == j ? 1.0 : 0.0)) > 1e-8)
                throw std::invalid_argument("NoiseEnvironment: basis not H-orthonormal");
        }
    env.wiener_ =
        sample_trace_class_wiener(seed, q, basis, params.t_min, params.t_max, params.dt);
    env.ou_ = ou_stationary(env.beta_, params.mu, params.burn_in);
    const auto& g = env.ou_.grid;
    env.z_int_.resize(g.count);
    env.z_int_[0] = 0.0;
    for (long i = 1; i < g.count; ++i)
        env.z_int_[i] =
            env.z_int_[i - 1] + 0.5 * g.dt * (env.ou_.z_values[i - 1] + env.ou_.z_values[i]);
    return env;
}

NoiseEnvironment NoiseEnvironment::shift(double h) const {
    NoiseEnvironment env;
    env.triple_ = triple_;
    env.params_ = params_;
    env.params_.t_min = params_.t_min - h;
    env.params_.t_max = params_.t_max - h;
    env.seed_ = seed_;
    env.beta_ = attractorlab::wiener_shift(beta_, h);
    env.wiener_ = attractorlab::wiener_shift(wiener_, h);
    env.ou_ = ou_stationary(env.beta_, params_.mu, params_.burn_in);
    const auto& g = env.ou_.grid;
    env.z_int_.resize(g.count);
    env.z_int_[0] = 0.0;
    for (long i = 1; i < g.count; ++i)
        env.z_int_[i] =
            env.z_int_[i - 1] + 0.5 * g.dt * (env.ou_.z_values[i - 1] + env.ou_.z_values[i]);
    return env;
}

std::vector<Field> dirichlet_basis(const TripleSpec& triple, int modes) {
    std::vector<Field> basis;
    basis.reserve(modes);
    for (int k = 1; k <= modes; ++k) basis.push_back(triple.h_orthonormal_mode(k));
    return basis;
}

std::vector<double> power_decay_eigenvalues(int modes, double gamma, double q0) {
    if (gamma <= 1.0)
        throw std::invalid_argument("eigenvalue decay must exceed 1 for a trace-class Q");
    std::vector<double> q(modes);
    for (int k = 1; k <= modes; ++k) q[k - 1] = q0 * std::pow(double(k), -gamma);
    return q;
}

} // namespace attractorlab
