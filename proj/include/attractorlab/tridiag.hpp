#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace attractorlab {

/// Thomas solve of a general tridiagonal system. `lower[i]` multiplies x[i-1]
/// in row i (lower[0] unused), `upper[i]` multiplies x[i+1] (upper[n-1]
/// unused). No pivoting; callers must supply (column-)diagonally dominant
/// systems, which all solvers in this project produce.
inline Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& lower,
                                         const Eigen::VectorXd& diag,
                                         const Eigen::VectorXd& upper,
                                         const Eigen::VectorXd& rhs) {
    const auto n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n)
        throw std::invalid_argument("solve_tridiagonal: size mismatch");
    Eigen::VectorXd c(n), d(n);
    double piv = diag[0];
    if (piv == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for (Eigen::Index i = 1; i < n; ++i) {
        piv = diag[i] - lower[i] * c[i - 1];
        if (piv == 0.0) throw std::runtime_error("solve_tridiagonal: zero pivot");
        c[i] = upper[i] / piv;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    Eigen::VectorXd x(n);
    x[n - 1] = d[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

/// Prefactored solver for the constant-coefficient discrete Dirichlet
/// Laplacian system (-Δ_h)x = b on N interior nodes. The forward-elimination
/// multipliers are cached once per mesh.
class NegLaplaceSolver {
  public:
    NegLaplaceSolver() = default;
    NegLaplaceSolver(int n, double h) : n_(n), h2_(h * h), c_(n) {
        const double diag = 2.0 / h2_, off = -1.0 / h2_;
        double piv = diag;
        c_[0] = off / piv;
        pivots_.resize(n);
        pivots_[0] = piv;
        for (int i = 1; i < n; ++i) {
            piv = diag - off * c_[i - 1];
            c_[i] = off / piv;
            pivots_[i] = piv;
        }
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        if (b.size() != n_) throw std::invalid_argument("NegLaplaceSolver: size mismatch");
        const double off = -1.0 / h2_;
        Eigen::VectorXd d(n_);
        d[0] = b[0] / pivots_[0];
        for (int i = 1; i < n_; ++i) d[i] = (b[i] - off * d[i - 1]) / pivots_[i];
        Eigen::VectorXd x(n_);
        x[n_ - 1] = d[n_ - 1];
        for (int i = n_ - 2; i >= 0; --i) x[i] = d[i] - c_[i] * x[i + 1];
        return x;
    }

  private:
    int n_ = 0;
    double h2_ = 1.0;
    Eigen::VectorXd c_;
    Eigen::VectorXd pivots_;
};

} // namespace attractorlab
