#pragma once

#include <functional>
#include <vector>

#include "hyplyap/types.hpp"

namespace hyplyap {

/// Physical system Y_t + F(Y) Y_x + D(Y) = 0 around a steady state Y*(x).
/// F and D are user-supplied evaluators (library/Python API only).
struct PhysicalSystem {
    int n = 0;
    int nx = 0;
    double L = 0.0;
    std::function<std::vector<double>(const std::vector<double>&)> F; // n x n row-major
    std::function<std::vector<double>(const std::vector<double>&)> D; // n-vector
    std::vector<double> ystar;                                        // n x nx

    double y_at(int i, int j) const { return ystar[static_cast<std::size_t>(i) * nx + j]; }
    double dx() const { return L / (nx - 1); }
};

double tol_steady(const PhysicalSystem& phys);

/// Steady-state residual max-norm of F(Y*) dY*/dx + D(Y*) over interior nodes.
double steady_state_residual(const PhysicalSystem& phys);

struct Diagonalization {
    int n = 0;
    int nx = 0;
    std::vector<double> N;     // per node, n x n row-major: N F N^{-1} = Lambda
    std::vector<double> N_inv; // per node
    std::vector<double> lambda; // n x nx, ordered by descending sign then magnitude
    int m_pos = 0;
    double max_offdiag_residual = 0.0;

    double n_at(int i, int k, int j) const {
        return N[(static_cast<std::size_t>(j) * n + i) * n + k];
    }
    double ninv_at(int i, int k, int j) const {
        return N_inv[(static_cast<std::size_t>(j) * n + i) * n + k];
    }
};

/// Per-node eigendecomposition of F(Y*(x_j)) with sign-aligned eigenvectors
/// (first node: unit max-entry, positive; later nodes aligned to the
/// previous column by least-squares scaling). Throws EigenFailure on complex
/// or repeated eigenvalues, OrderingBreak when the sign pattern drifts.
Diagonalization diagonalize(const PhysicalSystem& phys);

/// M(0,x_j) as the central finite-difference Jacobian of u -> B(u, x_j) at
/// u = 0, with B from the transformed source; asserts B(0,x) within
/// tol_steady. Step h = 1e-6 (1 + |Y*|).
std::vector<double> linearized_source(const PhysicalSystem& phys, const Diagonalization& diag);

/// Assemble the diagonal SystemSpec (K supplied by the caller).
SystemSpec to_system_spec(const PhysicalSystem& phys, const Diagonalization& diag,
                          const std::vector<double>& source, const std::vector<double>& K);

} // namespace hyplyap
