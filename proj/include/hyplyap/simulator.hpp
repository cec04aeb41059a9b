#pragma once

#include <functional>
#include <vector>

#include "hyplyap/spec_io.hpp"
#include "hyplyap/types.hpp"

namespace hyplyap {

struct TrajectoryState {
    double t = 0.0;
    GridFunction u;
    double dt = 0.0;
    double cfl = 0.9;
};

/// u_t = -Lambda(x) u_x - M(x) u with second-order central differences
/// inside, one-sided at the endpoints.
GridFunction derived_ut(const SystemSpec& spec, const GridFunction& u);

/// One explicit-Euler upwind step. Space derivatives are one-sided against
/// the sign of Lambda_i; after the interior update the inflow boundary values
/// are set from the just-updated outgoing traces through G (linear: K).
/// Throws CflViolation / NonFinite.
TrajectoryState step(const SystemSpec& spec, const TrajectoryState& state,
                     const BoundaryMap& g);

struct RunOptions {
    double t_end = 1.0;
    double cfl = 0.9;
    double cadence = 0.1; // snapshot spacing; <= 0 means final state only
    BoundaryMap boundary; // defaults to the linear map G(v) = K v
};

struct RunResult {
    std::vector<TrajectoryState> snapshots;
    bool compat0_ok = false;
    bool compat1_ok = false; // warning only: first-order scheme tolerates it
    double compat0_residual = 0.0;
    double compat1_residual = 0.0;
};

/// Fixed dt from the CFL bound; snapshots at t = 0, k*cadence, t_end.
/// Deterministic. u0 must pass the order-0 compatibility check.
RunResult run(const SystemSpec& spec, const GridFunction& u0, const RunOptions& opt);

double cfl_dt(const SystemSpec& spec, double cfl);

} // namespace hyplyap
