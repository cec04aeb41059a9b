#pragma once

#include <array>
#include <vector>

#include "hyplyap/types.hpp"

namespace hyplyap {

/// Smallest positive integer n1 with e^{-n1/4+1}(1+2 n1) <= 1/3.
int min_n1();

/// Normalized Gaussian-times-cutoff bump: psi0 = chi(y) e^{-n1 y^2} / d with
/// chi the cubic-smoothstep cutoff (1 on [-1/2,1/2], 0 outside (-1,1),
/// |chi'| <= 3) and d the max of |psi1 - psi1'| e^{-y}. All derivatives are
/// analytic, not differenced.
struct Psi0 {
    int n1 = 0;
    double d = 0.0;  // normalizer
    double y1 = 0.0; // critical point (-1-sqrt(2 n1))/(2 n1), used as the shift c
    double y2 = 0.0; // -1/(2 n1), unique max of |psi0| e^{-y}

    explicit Psi0(int n1_);
    struct Eval {
        double v = 0.0;
        double d1 = 0.0;
        double d2 = 0.0;
    };
    Eval operator()(double y) const;

    /// signed nondegeneracy value psi0(y2) - psi0''(y2); the magnitude is the
    /// quantity that must stay away from zero
    double nondegeneracy_at_y2() const;
};

/// Parameters of the Theorem-3.2 initial data around the violation point x0.
struct BumpSpec {
    int n1 = 0;
    double y1 = 0.0;     // shift/offset c
    double d_norm = 0.0; // normalizer d
    int m = 200;         // sharpness
    double u1_0 = 1e-3;  // amplitude of the violated row
    int k = 10;          // amplitude factor (1 - 1/k)
    double x0 = 0.5;
    int i_star = 0;      // violated row (0-based)
};

/// Fill n1/y1/d from the psi0 construction and check the BumpSpec invariants
/// against the system (support strictly inside (0,L)).
BumpSpec make_bump(const SystemSpec& spec, double x0, int m = 200, int k = 10,
                   double u1_0 = 1e-3, int i_star = 0);

/// Amplitudes u_i^0 = -u1^0 (1-1/k) sgn(M_{i* i}(0, x0)) for i != i_star
/// (sgn(0) = 0), with the two-smallest-|lambda| tie-break redefinition when
/// both tied indices differ from i_star.
std::vector<double> bump_amplitudes(const SystemSpec& spec, const BumpSpec& bump);

/// Sample u_i(0,x) = (u_i^0/m) chi(x) e^{-sgn(lambda_i*) (m(x-x0)+c)} /
/// (lambda_i(x) sqrt(f_i(x))) on the spec grid, chi(x) = psi0(m(x-x0)+y1).
/// Throws ResolutionError when dx > 1/(10 m), SupportError when the bump
/// leaves (0,L). The data vanishes at both endpoints by construction.
GridFunction build_initial_data(const SystemSpec& spec, const WeightProfile& profile,
                                const BumpSpec& bump);

struct DvDtOptions {
    double cfl = 0.5;
    /// cap on the upwind-dissipation rate nu_num * 2 n1 m^2 (per unit time)
    /// used to pick the simulation dx; the module default dx = 1/(10 m) is
    /// far too coarse for slope extraction
    double dissipation_budget = 0.1;
    bool localize = true; // simulate on the bump's support + propagation cone
};

struct SlopeReport {
    double slope = 0.0;         // half-horizon Richardson estimate (reported)
    double slope_primary = 0.0; // full-horizon estimate
    double noise = 0.0;         // |slope_primary - slope|
    bool positive = false;      // slope > 10 * noise and slope > 0
    double delta = 0.0;         // horizon 0.02/m
    double dx_used = 0.0;
    int nx_used = 0;
    std::array<double, 5> v_samples{}; // V at k*delta/4 on the primary run
    double violation = 0.0;            // lemma1cont value at x0 (must be < 0)
};

/// Short-horizon simulation estimate of dV/dt(0) for the bump data.
/// Refuses (DomainError) unless the interior condition is violated at x0 for
/// the supplied profile. Throws InconclusiveError when the delta and delta/2
/// runs disagree in sign.
SlopeReport dv_dt_at_zero(const SystemSpec& spec, const WeightProfile& profile,
                          const BumpSpec& bump, const DvDtOptions& opt = {});

struct AnalyticDvDt {
    double term_w2 = 0.0; // sgn(u_t) sqrt(f) u_tt at the u_t-sup maximizer
    double term_w1 = 0.0; // s_a0 sqrt(f) u_t at the u-sup maximizer
    double total = 0.0;
    double x1 = 0.0;  // u_t-sup location
    double xa0 = 0.0; // u-sup location
    int i1 = 0;       // u_t-sup component
    int i0 = 0;       // u-sup component
};

/// Direct evaluation of the two sup-norm derivative terms on a fine local
/// grid; cross-check for the simulation route.
AnalyticDvDt analytic_dv_dt(const SystemSpec& spec, const WeightProfile& profile,
                            const BumpSpec& bump);

/// lemma1cont value at x0 for the violated row:
///   -sum_{k != i*} |M_{i*k}| sqrt(f_i*/f_k) - Lambda_i* f_i*'/(2 f_i*) + M_{i*i*},
/// negative iff the interior condition is violated there.
double interior_violation_at(const SystemSpec& spec, const WeightProfile& profile, double x0,
                             int i_star);

} // namespace hyplyap
