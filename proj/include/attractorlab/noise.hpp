#pragma once

#include <cstdint>
#include <vector>

#include "attractorlab/errors.hpp"
#include "attractorlab/gelfand.hpp"
#include "attractorlab/mesh.hpp"

namespace attractorlab {

/// Uniform time grid t_min + i*dt, i = 0..count-1. All path lookups go through
/// integer indices so that shifted paths reuse sampled values exactly.
struct TimeGrid {
    double t_min = 0.0;
    double dt = 0.0;
    long count = 0;

    double time(long i) const { return t_min + i * dt; }
    double t_max() const { return time(count - 1); }

    long index(double t) const {
        const double x = (t - t_min) / dt;
        const long i = std::lround(x);
        if (std::abs(x - i) > 1e-6)
            throw std::invalid_argument("time not on grid");
        if (i < 0 || i >= count) throw WindowExhausted("time outside sampled window");
        return i;
    }
    bool contains(double t) const {
        const double x = (t - t_min) / dt;
        const long i = std::lround(x);
        return std::abs(x - i) <= 1e-6 && i >= 0 && i < count;
    }
};

struct BrownianPath {
    TimeGrid grid;
    Eigen::VectorXd values;
    std::uint64_t seed = 0;

    double at(double t) const { return values[grid.index(t)]; }
};

/// Two-sided Brownian sample on [t_min, t_max]; β_0 = 0 exactly (the grid must
/// contain 0), increments N(0, dt) from a dedicated stream of `seed`.
BrownianPath sample_brownian(std::uint64_t seed, double t_min, double t_max, double dt);
BrownianPath sample_brownian_stream(std::uint64_t seed, std::uint64_t stream_id, double t_min,
                                    double t_max, double dt);

/// Wiener shift (θ_h ω)_t = ω_{t+h} − ω_h on the sampled grid.
BrownianPath wiener_shift(const BrownianPath& path, double h);

/// Trace-class Q-Wiener path: K independent mode paths against an
/// H-orthonormal basis, W_t = Σ √q_k · β^k_t · basis_k.
struct HWienerPath {
    std::vector<double> eigenvalues;
    std::vector<Field> basis;
    std::vector<BrownianPath> mode_paths;
    double trace = 0.0;

    Field at(double t) const;
    Field increment(double t1, double t2) const;
    TimeGrid grid() const;
    Mesh1D mesh() const;
};

HWienerPath sample_trace_class_wiener(std::uint64_t seed, const std::vector<double>& eigenvalues,
                                      const std::vector<Field>& basis, double t_min, double t_max,
                                      double dt);
HWienerPath wiener_shift(const HWienerPath& path, double h);

/// Stationary OU path z and multiplier μ_t = e^{−μ z_t} on the tail of the
/// driving Brownian grid; the leading `burn_in` stretch of β approximates the
/// t = −∞ initialization.
struct OUPath {
    TimeGrid grid;
    Eigen::VectorXd z_values;
    Eigen::VectorXd mu_values;
    double mu_exponent = 0.0;
    double burn_in = 0.0;

    double z_at(double t) const { return z_values[grid.index(t)]; }
    double mu_at(double t) const { return mu_values[grid.index(t)]; }
};

/// Exponential-Euler recursion z_{t+Δ} = e^{−Δ} z_t + e^{−Δ/2}(β_{t+Δ} − β_t)
/// started from 0 at the left end of β; values are exposed from
/// β.t_min + burn_in onward.
OUPath ou_stationary(const BrownianPath& beta, double mu, double burn_in);

struct NoiseParams {
    int modes = 4;
    double eigenvalue_decay = 2.0; // q_k = q0 * k^{-decay}
    double q0 = 1.0;
    double t_min = -8.0;
    double t_max = 2.0;
    double dt = 1e-2;
    double burn_in = 20.0;
    double mu = 0.0;    // multiplicative intensity in μ_t = e^{−μ z_t}
    double sigma = 1.0; // additive scale applied to W increments
};

/// One sampled driving environment: β, W, the OU pair (z, μ) and the cached
/// cumulative ∫z used by the k-transform. Immutable after construction.
class NoiseEnvironment {
  public:
    static NoiseEnvironment make(std::uint64_t seed, const TripleSpec& triple,
                                 const NoiseParams& params);

    /// Environment over the shifted path θ_h ω; the OU pair is rebuilt from
    /// the shifted β so strict stationarity holds by construction.
    NoiseEnvironment shift(double h) const;

    const TripleSpec& triple() const { return triple_; }
    const NoiseParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }
    double mu() const { return params_.mu; }
    double sigma() const { return params_.sigma; }
    double t_min() const { return params_.t_min; }
    double t_max() const { return params_.t_max; }
    double dt() const { return params_.dt; }
    double trace() const { return wiener_.trace; }

    const BrownianPath& beta() const { return beta_; }
    const HWienerPath& wiener() const { return wiener_; }
    const OUPath& ou() const { return ou_; }

    double z(double t) const { return ou_.z_at(t); }
    double mu_t(double t) const { return ou_.mu_at(t); }
    /// ∫_{t_min}^{t} z_r dr by cumulative trapezoid on the sampled grid.
    double z_integral(double t) const { return z_int_[ou_.grid.index(t)]; }
    /// Raw W increment (σ not applied).
    Field w_increment(double t1, double t2) const { return wiener_.increment(t1, t2); }

  private:
    TripleSpec triple_;
    NoiseParams params_;
    std::uint64_t seed_ = 0;
    BrownianPath beta_;
    HWienerPath wiener_;
    OUPath ou_;
    Eigen::VectorXd z_int_;
};

/// Dirichlet eigen-modes of the triple's H, q_k = q0 k^{-gamma}.
std::vector<Field> dirichlet_basis(const TripleSpec& triple, int modes);
std::vector<double> power_decay_eigenvalues(int modes, double gamma, double q0);

} // namespace attractorlab
