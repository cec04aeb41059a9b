#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hyplyap/errors.hpp"

namespace hyplyap {

/// Grid-sampled vector field on the uniform grid x_j = j L/(nx-1),
/// values stored row-major: component i at node j is v[i*nx + j].
struct GridFunction {
    int n = 0;
    int nx = 0;
    double L = 0.0;
    std::vector<double> v;

    GridFunction() = default;
    GridFunction(int n_, int nx_, double L_)
        : n(n_), nx(nx_), L(L_), v(static_cast<std::size_t>(n_) * nx_, 0.0) {}

    double dx() const { return L / (nx - 1); }
    double x(int j) const { return L * j / (nx - 1); }
    double& at(int i, int j) { return v[static_cast<std::size_t>(i) * nx + j]; }
    double at(int i, int j) const { return v[static_cast<std::size_t>(i) * nx + j]; }

    double max_abs() const {
        double m = 0.0;
        for (double w : v) m = std::max(m, std::abs(w));
        return m;
    }
    bool all_finite() const {
        for (double w : v)
            if (!std::isfinite(w)) return false;
        return true;
    }
};

/// The linearized system u_t + Lambda(x) u_x + M(x) u = 0 with boundary
/// coupling (u_+(t,0), u_-(t,L)) = K (u_+(t,L), u_-(t,0)).
/// lambda: n x nx, source: n x n x nx (M_ik at node j is source[(i*n+k)*nx+j]),
/// K: n x n row-major. Indices 0-based; components 0..m_pos-1 have positive
/// speed, the rest negative. Immutable after construction/validation.
struct SystemSpec {
    int n = 0;
    int m_pos = 0;
    int nx = 0;
    double L = 0.0;
    std::vector<double> lambda;
    std::vector<double> source;
    std::vector<double> K;
    double mu = 0.0;

    double dx() const { return L / (nx - 1); }
    double x(int j) const { return L * j / (nx - 1); }

    double lam(int i, int j) const { return lambda[static_cast<std::size_t>(i) * nx + j]; }
    double& lam(int i, int j) { return lambda[static_cast<std::size_t>(i) * nx + j]; }
    double M(int i, int k, int j) const {
        return source[(static_cast<std::size_t>(i) * n + k) * nx + j];
    }
    double& M(int i, int k, int j) {
        return source[(static_cast<std::size_t>(i) * n + k) * nx + j];
    }
    double Kat(int i, int k) const { return K[static_cast<std::size_t>(i) * n + k]; }

    /// sign s_i of Lambda_i; +1 for i < m_pos, -1 otherwise
    int sgn(int i) const { return i < m_pos ? 1 : -1; }
    /// outflow endpoint d_i: L where the speed is positive, 0 otherwise
    double d_i(int i) const { return i < m_pos ? L : 0.0; }

    /// linear interpolation between nodes; xq clamped to [0, L]
    double lam_at(int i, double xq) const { return interp(&lambda[static_cast<std::size_t>(i) * nx], xq); }
    double M_at(int i, int k, double xq) const {
        return interp(&source[(static_cast<std::size_t>(i) * n + k) * nx], xq);
    }

    double max_abs_lambda() const {
        double m = 0.0;
        for (double w : lambda) m = std::max(m, std::abs(w));
        return m;
    }
    double max_abs_source() const {
        double m = 0.0;
        for (double w : source) m = std::max(m, std::abs(w));
        return m;
    }

  private:
    double interp(const double* row, double xq) const {
        double t = xq / L * (nx - 1);
        if (t <= 0.0) return row[0];
        if (t >= nx - 1) return row[nx - 1];
        int j = static_cast<int>(t);
        double w = t - j;
        return row[j] * (1.0 - w) + row[j + 1] * w;
    }
};

/// Lyapunov weight candidate: positive weights f_i(x_j) plus exponential
/// tilt mu and the strictification sigma it was verified against.
struct WeightProfile {
    int n = 0;
    int nx = 0;
    double L = 0.0;
    std::vector<double> f; // n x nx, row-major
    double mu = 0.0;
    double sigma = 0.0;

    WeightProfile() = default;
    WeightProfile(int n_, int nx_, double L_, double fill = 1.0)
        : n(n_), nx(nx_), L(L_), f(static_cast<std::size_t>(n_) * nx_, fill) {}

    double at(int i, int j) const { return f[static_cast<std::size_t>(i) * nx + j]; }
    double& at(int i, int j) { return f[static_cast<std::size_t>(i) * nx + j]; }

    double min_f() const {
        double m = f.empty() ? 0.0 : f[0];
        for (double w : f) m = std::min(m, w);
        return m;
    }
    double max_f() const {
        double m = f.empty() ? 0.0 : f[0];
        for (double w : f) m = std::max(m, w);
        return m;
    }
};

/// Throws ValidationError naming the offending field/node unless the spec
/// satisfies every invariant (shapes, finiteness, sign pattern, nx >= 3).
void validate(const SystemSpec& spec);

/// Shape check of u against spec; throws ValidationError on mismatch.
void require_shape(const SystemSpec& spec, const GridFunction& u, const char* what);

} // namespace hyplyap
