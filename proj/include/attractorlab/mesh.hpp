#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace attractorlab {

/// Uniform 1-D grid on (0, L) with N interior nodes and homogeneous
/// Dirichlet boundary; node i sits at (i+1)*h, h = L/(N+1).
struct Mesh1D {
    double length = 1.0;
    int interior_nodes = 0;

    Mesh1D() = default;
    Mesh1D(double L, int N) : length(L), interior_nodes(N) {
        if (L <= 0.0) throw std::invalid_argument("Mesh1D: length must be positive");
        if (N < 2) throw std::invalid_argument("Mesh1D: need at least 2 interior nodes");
    }

    double spacing() const { return length / (interior_nodes + 1); }
    double node(int i) const { return (i + 1) * spacing(); }

    bool operator==(const Mesh1D& o) const {
        return length == o.length && interior_nodes == o.interior_nodes;
    }
    bool operator!=(const Mesh1D& o) const { return !(*this == o); }
};

/// Nodal values on a Mesh1D (an element of discretized H).
struct Field {
    Mesh1D mesh;
    Eigen::VectorXd values;

    Field() = default;
    explicit Field(const Mesh1D& m) : mesh(m), values(Eigen::VectorXd::Zero(m.interior_nodes)) {}
    Field(const Mesh1D& m, Eigen::VectorXd v) : mesh(m), values(std::move(v)) {
        if (values.size() != mesh.interior_nodes)
            throw std::invalid_argument("Field: value count does not match mesh");
    }

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }
};

inline void require_same_mesh(const Field& a, const Field& b) {
    if (a.mesh != b.mesh) throw std::invalid_argument("mesh mismatch between fields");
}

inline Field operator+(const Field& a, const Field& b) {
    require_same_mesh(a, b);
    return {a.mesh, a.values + b.values};
}
inline Field operator-(const Field& a, const Field& b) {
    require_same_mesh(a, b);
    return {a.mesh, a.values - b.values};
}
inline Field operator*(double c, const Field& a) { return {a.mesh, c * a.values}; }

} // namespace attractorlab
