#pragma once

#include <cstdint>
#include <vector>

#include "hyplyap/types.hpp"

namespace hyplyap {

/// Scaled gain theta(K, Delta) = max_i sum_j |K_ij| Delta_i / Delta_j.
/// Throws DomainError on nonpositive delta. Invariant under Delta -> c Delta.
double theta(const std::vector<double>& K, const std::vector<double>& delta);

/// Spectral radius of the entrywise-absolute matrix by power iteration
/// (the independent oracle for rho_inf).
double power_iteration_abs(const std::vector<double>& K, int n, int iters = 200);

struct RhoResult {
    double rho = 0.0;            // optimizer value inf_Delta theta(K, Delta)
    double oracle = 0.0;         // Perron root of |K| by power iteration
    std::vector<double> delta;   // optimal diagonal scaling found
};

/// rho_inf(K) = inf(||Delta K Delta^{-1}||_inf) over positive diagonals,
/// minimized in log-space by subgradient descent seeded from the Perron
/// right eigenvector of |K|. Throws OracleMismatch if the optimizer ends up
/// more than 1e-5 away from the power-iteration oracle (a bug signal).
RhoResult rho_inf(const std::vector<double>& K, int n);

struct BoundaryCertificate {
    std::vector<double> delta; // positive diagonal entries
    double theta = 0.0;        // scaled gain at delta
    double ratio = 0.0;        // inf_i f_i(d_i)/Delta_i^2 / sup_i f_i(L-d_i)/Delta_i^2
    double margin = 0.0;       // ratio - theta
    bool satisfied = false;
};

struct BoundaryCheckOptions {
    int budget = 500;      // subgradient iterations per start
    std::uint64_t seed = 0;
    int random_starts = 8; // in addition to the Perron start
};

/// Strict inequality required: ties report unsatisfied (relative tolerance).
inline constexpr double kTolBoundary = 1e-9;

/// Optimizes J(delta) = log theta - log inf_i(f_i(d_i) e^{-2 delta_i})
///                    + log sup_i(f_i(L-d_i) e^{-2 delta_i})  (convex, gauge
/// delta_1 = 0) and reports the boundary-condition verdict for the profile.
BoundaryCertificate check_boundary(const SystemSpec& spec, const WeightProfile& profile,
                                   const BoundaryCheckOptions& opt = {});

} // namespace hyplyap
