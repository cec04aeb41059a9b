#pragma once

#include <cstdint>
#include <vector>

#include "hyplyap/types.hpp"

namespace hyplyap {

/// Right-hand side of the equality-form weight ODE
///   f_i' = -(2/Lambda_i(x)) (-M_ii(0,x) f_i + sum_{k!=i} |M_ik(0,x)| f_i^{3/2}/sqrt(f_k)),
/// coefficients linearly interpolated at node_x. f_point must be positive.
std::vector<double> interior_rhs(const SystemSpec& spec, const std::vector<double>& f_point,
                                 double node_x);

struct IntegrateOutcome {
    enum class Status { Complete, FloorHit, Blowup };
    Status status = Status::FloorHit; // Complete is set by a successful run only
    int component = -1;  // offending i for FloorHit
    double x_stop = 0.0; // where integration stopped (== L when complete)
    long steps = 0;        // accepted + rejected RK steps (diagnostic)
    WeightProfile profile; // valid only when complete
    bool ok() const { return status == Status::Complete; }
};

/// Integrate the sigma-perturbed weight ODE from x=0 to L with adaptive
/// step-doubling RK4 (local error tol 1e-9 per unit length), sampling the
/// result on the spec grid. Positivity floor 1e-12*max f0, blowup cap
/// 1e12*max f0.
IntegrateOutcome integrate_weights(const SystemSpec& spec, const std::vector<double>& f0,
                                   double sigma);

/// Pointwise margins of the strict interior condition
///   margin[i][j] = -Lambda_i f_i'/f_i - 2 sum_{k!=i} |M_ik| sqrt(f_i/f_k) + 2 M_ii
/// with f' by second-order node differences. Strict verdict iff min > 0.
std::vector<double> check_strict_interior(const SystemSpec& spec, const WeightProfile& profile);

struct InteriorCertificate {
    WeightProfile profile;       // canonical equality-ODE solution; profile.sigma
                                 // records the strictification used for the rerun
    std::vector<double> margins; // n x nx strict-interior margins of `profile`
    bool feasible = false;
    double min_f = 0.0;
    double min_margin = 0.0;
    double score = 0.0; // search score of the winning start (diagnostics)
};

struct InteriorSearchOptions {
    int budget = 64;            // number of multistart candidates
    std::uint64_t seed = 0;
    double sigma = -1.0;        // strictification; <0 means 1e-3 * max|M|
    double log_range = 6.0;     // log f0 spans [-log_range, log_range]
    double boundary_bias = 0.0; // reward on sum_i log(f_i(d_i)/f_i(L-d_i))
    int nm_iters = 60;          // Nelder-Mead refinement iterations per start
};

double sigma_default(const SystemSpec& spec);

/// Multistart feasibility search for the interior condition. Deterministic
/// for fixed seed and budget. Infeasibility is a verdict, not an error, and
/// is never claimed as a proof; the certificate carries the best min_f and
/// margin found.
InteriorCertificate search_feasible(const SystemSpec& spec, const InteriorSearchOptions& opt);

/// Default margin tolerance used by the feasible-certificate invariant
/// (discretization allowance for the equality solution's ~0 margins).
double tol_margin(const SystemSpec& spec);

} // namespace hyplyap
