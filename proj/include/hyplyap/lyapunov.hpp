#pragma once

#include <vector>

#include "hyplyap/simulator.hpp"
#include "hyplyap/types.hpp"

namespace hyplyap {

/// W_{1,p}(u) = (int_0^L sum_i f_i^p u_i^{2p} e^{-2 p mu s_i x} dx)^{1/2p},
/// trapezoidal quadrature, accumulated in log space (finite up to p = 512).
double w1p(const SystemSpec& spec, const WeightProfile& profile, const GridFunction& u, int p);

/// w1p applied to the derived time derivative -Lambda u_x - M u.
double w2p(const SystemSpec& spec, const WeightProfile& profile, const GridFunction& u, int p);

/// Basic C1 Lyapunov functional: weighted sup of u plus weighted sup of the
/// derived u_t, both with the tilt e^{-mu s_i x}.
double v_c1(const SystemSpec& spec, const WeightProfile& profile, const GridFunction& u);

struct LyapunovSeries {
    std::vector<double> times;
    std::vector<double> V;
    std::vector<double> W1p;
    std::vector<double> W2p;
    std::vector<double> sup_u;
    std::vector<double> sup_ut;
    double gamma_fit = 0.0;
    double r_squared = 0.0;
    int p_used = 64;
};

/// Evaluate the functionals along run snapshots (p_used defaults to 64).
LyapunovSeries build_series(const SystemSpec& spec, const WeightProfile& profile,
                            const std::vector<TrajectoryState>& snapshots, int p = 64);

struct GammaFit {
    double gamma = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

/// Least-squares slope of log V over [t_a, t_b]; gamma = -slope.
/// Throws DecayedToZero when V is nonpositive somewhere on the window.
GammaFit fit_gamma(const LyapunovSeries& series, double t_a, double t_b);

struct DecreaseVerdict {
    bool ok = false;
    double worst_violation = 0.0; // max over k of V_{k+1}/V_k - 1
    double worst_time = 0.0;
};

/// V(t_{k+1}) <= V(t_k) (1 + tol_growth) for all k.
DecreaseVerdict verify_decrease(const LyapunovSeries& series, double tol_growth);

void write_series_csv(const LyapunovSeries& series, const std::string& path);

} // namespace hyplyap
