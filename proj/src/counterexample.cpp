#include "hyplyap/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyplyap/lyapunov.hpp"
#include "hyplyap/simulator.hpp"

namespace hyplyap {

int min_n1() {
    for (int n = 1;; ++n)
        if (std::exp(-n / 4.0 + 1.0) * (1.0 + 2.0 * n) <= 1.0 / 3.0) return n;
}

namespace {

// cubic smoothstep cutoff and its derivatives in |y|
struct Cut {
    double v, d1, d2;
};
Cut chi_cut(double y) {
    const double a = std::abs(y);
    if (a <= 0.5) return {1.0, 0.0, 0.0};
    if (a >= 1.0) return {0.0, 0.0, 0.0};
    const double t = 2.0 * (a - 0.5);
    const double s = y < 0.0 ? -1.0 : 1.0;
    Cut c;
    c.v = 1.0 - (3.0 * t * t - 2.0 * t * t * t);
    c.d1 = (-6.0 * t + 6.0 * t * t) * 2.0 * s;
    c.d2 = (-6.0 + 12.0 * t) * 4.0;
    return c;
}

} // namespace

Psi0::Psi0(int n1_) : n1(n1_) {
    if (std::exp(-n1 / 4.0 + 1.0) * (1.0 + 2.0 * n1) > 1.0 / 3.0)
        throw DomainError("Psi0: n1 violates the cutoff inequality (need n1 >= " +
                          std::to_string(min_n1()) + ")");
    const double s = std::sqrt(2.0 * n1);
    y1 = (-1.0 - s) / (2.0 * n1);
    y2 = -1.0 / (2.0 * n1);
    // max of |psi1 - psi1'| e^{-y}; both critical points (-1 +- sqrt(2 n1))/(2 n1)
    // give this same value (Vieta: the exponents coincide exactly)
    d = s * std::exp((1.0 - 2.0 * n1) / (4.0 * n1));
}

Psi0::Eval Psi0::operator()(double y) const {
    const Cut c = chi_cut(y);
    if (c.v == 0.0 && c.d1 == 0.0 && c.d2 == 0.0 && std::abs(y) >= 1.0) return {0.0, 0.0, 0.0};
    const double f = std::exp(-n1 * y * y);
    const double fp = -2.0 * n1 * y * f;
    const double fpp = (4.0 * static_cast<double>(n1) * n1 * y * y - 2.0 * n1) * f;
    Psi0::Eval e;
    e.v = c.v * f / d;
    e.d1 = (c.d1 * f + c.v * fp) / d;
    e.d2 = (c.d2 * f + 2.0 * c.d1 * fp + c.v * fpp) / d;
    return e;
}

double Psi0::nondegeneracy_at_y2() const {
    const Eval e = (*this)(y2);
    return e.v - e.d2;
}

BumpSpec make_bump(const SystemSpec& spec, double x0, int m, int k, double u1_0, int i_star) {
    if (m < 1) throw DomainError("make_bump: m must be positive");
    if (k < 2) throw DomainError("make_bump: k must be >= 2");
    if (i_star < 0 || i_star >= spec.n) throw DomainError("make_bump: i_star out of range");
    if (!(u1_0 > 0.0)) throw DomainError("make_bump: u1_0 must be positive");
    BumpSpec b;
    b.n1 = min_n1();
    const Psi0 psi(b.n1);
    b.y1 = psi.y1;
    b.d_norm = psi.d;
    b.m = m;
    b.k = k;
    b.u1_0 = u1_0;
    b.x0 = x0;
    b.i_star = i_star;
    const double half = (1.0 + std::abs(b.y1)) / m;
    if (!(x0 - half > 0.0) || !(x0 + half < spec.L))
        throw SupportError("make_bump: bump support [" + std::to_string(x0 - half) + ", " +
                           std::to_string(x0 + half) + "] leaves (0, " + std::to_string(spec.L) +
                           ")");
    return b;
}

std::vector<double> bump_amplitudes(const SystemSpec& spec, const BumpSpec& bump) {
    const int n = spec.n;
    auto sgn0 = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
    std::vector<double> amps(n, 0.0);
    amps[bump.i_star] = bump.u1_0;
    for (int i = 0; i < n; ++i) {
        if (i == bump.i_star) continue;
        amps[i] = -bump.u1_0 * (1.0 - 1.0 / bump.k) * sgn0(spec.M_at(bump.i_star, i, bump.x0));
    }
    // tie-break (redefine): when the two smallest |lambda(x0)| rows both differ
    // from i_star, sharpen one of them with k2 = 2k so the |u_i^0/lambda_i|
    // maximizer is unique
    if (n >= 2) {
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::abs(spec.lam_at(a, bump.x0)) < std::abs(spec.lam_at(b, bump.x0));
        });
        const double l0 = std::abs(spec.lam_at(order[0], bump.x0));
        const double l1 = std::abs(spec.lam_at(order[1], bump.x0));
        if (std::abs(l1 - l0) <= 1e-12 * std::max(l0, 1.0) && order[0] != bump.i_star &&
            order[1] != bump.i_star) {
            const int i0 = std::min(order[0], order[1]);
            const int k2 = 2 * bump.k;
            amps[i0] = -bump.u1_0 * (1.0 - 1.0 / k2) * sgn0(spec.M_at(bump.i_star, i0, bump.x0));
        }
    }
    return amps;
}

GridFunction build_initial_data(const SystemSpec& spec, const WeightProfile& profile,
                                const BumpSpec& bump) {
    if (profile.n != spec.n || profile.nx != spec.nx)
        throw DomainError("build_initial_data: profile shape mismatch");
    if (spec.dx() > 1.0 / (10.0 * bump.m) * (1.0 + 1e-12))
        throw ResolutionError("build_initial_data: dx = " + std::to_string(spec.dx()) +
                              " too coarse for m = " + std::to_string(bump.m) +
                              " (need dx <= 1/(10m))");
    const double half = (1.0 + std::abs(bump.y1)) / bump.m;
    if (!(bump.x0 - half > 0.0) || !(bump.x0 + half < spec.L))
        throw SupportError("build_initial_data: bump support leaves (0, L)");

    const Psi0 psi(bump.n1);
    const std::vector<double> amps = bump_amplitudes(spec, bump);
    const double sg = spec.lam_at(bump.i_star, bump.x0) > 0.0 ? 1.0 : -1.0;
    GridFunction u(spec.n, spec.nx, spec.L);
    for (int j = 0; j < spec.nx; ++j) {
        const double x = spec.x(j);
        const double y = bump.m * (x - bump.x0);
        const double chi = psi(y + bump.y1).v;
        if (chi == 0.0) continue;
        const double e = std::exp(-sg * (y + bump.y1));
        for (int i = 0; i < spec.n; ++i) {
            if (amps[i] == 0.0) continue;
            u.at(i, j) =
                amps[i] / bump.m * chi * e / (spec.lam(i, j) * std::sqrt(profile.at(i, j)));
        }
    }
    return u;
}

double interior_violation_at(const SystemSpec& spec, const WeightProfile& profile, double x0,
                             int i_star) {
    const int nx = spec.nx;
    const double h = spec.dx();
    // f' on the profile grid (2nd order), then linear interpolation at x0
    auto fprime = [&](int i, int j) {
        if (j == 0) return (-3.0 * profile.at(i, 0) + 4.0 * profile.at(i, 1) - profile.at(i, 2)) / (2.0 * h);
        if (j == nx - 1)
            return (3.0 * profile.at(i, nx - 1) - 4.0 * profile.at(i, nx - 2) + profile.at(i, nx - 3)) /
                   (2.0 * h);
        return (profile.at(i, j + 1) - profile.at(i, j - 1)) / (2.0 * h);
    };
    auto interp = [&](int i, double xq, bool deriv) {
        double t = xq / spec.L * (nx - 1);
        t = std::clamp(t, 0.0, static_cast<double>(nx - 1));
        const int j = std::min(static_cast<int>(t), nx - 2);
        const double w = t - j;
        const double va = deriv ? fprime(i, j) : profile.at(i, j);
        const double vb = deriv ? fprime(i, j + 1) : profile.at(i, j + 1);
        return va * (1.0 - w) + vb * w;
    };
    const double fi = interp(i_star, x0, false);
    const double fpi = interp(i_star, x0, true);
    double coupling = 0.0;
    for (int k = 0; k < spec.n; ++k) {
        if (k == i_star) continue;
        coupling += std::abs(spec.M_at(i_star, k, x0)) * std::sqrt(fi / interp(k, x0, false));
    }
    return -coupling - spec.lam_at(i_star, x0) * fpi / (2.0 * fi) + spec.M_at(i_star, i_star, x0);
}

namespace {

struct LocalSetup {
    SystemSpec sub;
    WeightProfile f_data; // true weights on the sub-grid (for the bump build)
    WeightProfile f_v;    // weights with the tilt offset folded in (for V)
    BumpSpec bump;
};

// Restrict the system to the bump's support plus the propagation cone; exact
// by finite propagation speed (the data never reaches the sub-boundary over
// the horizon), with K = 0 on the sub-domain.
LocalSetup localize(const SystemSpec& spec, const WeightProfile& profile, const BumpSpec& bump,
                    double delta, double dx_target, bool localize_domain) {
    const double lam_max = spec.max_abs_lambda();
    double a = 0.0, b = spec.L;
    if (localize_domain) {
        const double w =
            (1.0 + std::abs(bump.y1)) / bump.m + 20.0 * delta * lam_max + 50.0 * dx_target;
        a = std::max(0.0, bump.x0 - w);
        b = std::min(spec.L, bump.x0 + w);
    }
    LocalSetup ls;
    SystemSpec& s = ls.sub;
    s.n = spec.n;
    s.m_pos = spec.m_pos;
    s.L = b - a;
    s.nx = std::max(static_cast<int>(std::ceil((b - a) / dx_target)) + 1, 11);
    s.mu = 0.0;
    s.lambda.resize(static_cast<std::size_t>(s.n) * s.nx);
    s.source.resize(static_cast<std::size_t>(s.n) * s.n * s.nx);
    s.K.assign(static_cast<std::size_t>(s.n) * s.n, 0.0);
    ls.f_data = WeightProfile(s.n, s.nx, s.L);
    ls.f_v = WeightProfile(s.n, s.nx, s.L);
    ls.f_v.mu = profile.mu;
    const double hq = s.L / (s.nx - 1);
    for (int j = 0; j < s.nx; ++j) {
        const double x = a + j * hq;
        for (int i = 0; i < s.n; ++i) {
            s.lam(i, j) = spec.lam_at(i, x);
            for (int k = 0; k < s.n; ++k) s.M(i, k, j) = spec.M_at(i, k, x);
            // profile interp (linear on its own grid)
            double t = x / spec.L * (spec.nx - 1);
            t = std::clamp(t, 0.0, static_cast<double>(spec.nx - 1));
            const int jj = std::min(static_cast<int>(t), spec.nx - 2);
            const double wgt = t - jj;
            const double f = profile.at(i, jj) * (1.0 - wgt) + profile.at(i, jj + 1) * wgt;
            ls.f_data.at(i, j) = f;
            // fold e^{-mu s_i a} into the V weights so V on the sub-grid equals
            // V of the embedded field
            ls.f_v.at(i, j) = f * std::exp(-2.0 * profile.mu * spec.sgn(i) * a);
        }
    }
    ls.bump = bump;
    ls.bump.x0 = bump.x0 - a;
    return ls;
}

// V at the five sample times 0, h, 2h, 3h, 4h with h = horizon/4
std::array<double, 5> sample_v(const LocalSetup& ls, double horizon, double cfl) {
    const SystemSpec& s = ls.sub;
    GridFunction u0 = build_initial_data(s, ls.f_data, ls.bump);
    const double h = horizon / 4.0;
    const double dt_bound = cfl_dt(s, cfl);
    const int r = std::max(1, static_cast<int>(std::ceil(h / dt_bound)));
    TrajectoryState st;
    st.u = u0;
    st.cfl = cfl;
    st.dt = h / r;
    const BoundaryMap g = linear_boundary_map(s);
    std::array<double, 5> v{};
    v[0] = v_c1(s, ls.f_v, st.u);
    for (int kk = 1; kk <= 4; ++kk) {
        for (int q = 0; q < r; ++q) st = step(s, st, g);
        v[kk] = v_c1(s, ls.f_v, st.u);
    }
    return v;
}

double richardson_slope(const std::array<double, 5>& v, double horizon) {
    const double h = horizon / 4.0;
    const double d1 = (v[1] - v[0]) / h;
    const double d2 = (v[2] - v[0]) / (2.0 * h);
    return 2.0 * d1 - d2;
}

} // namespace

SlopeReport dv_dt_at_zero(const SystemSpec& spec, const WeightProfile& profile,
                          const BumpSpec& bump, const DvDtOptions& opt) {
    SlopeReport rep;
    rep.violation = interior_violation_at(spec, profile, bump.x0, bump.i_star);
    if (!(rep.violation < 0.0))
        throw DomainError("dv_dt_at_zero: no interior violation at x0 = " +
                          std::to_string(bump.x0) + " (lemma value " +
                          std::to_string(rep.violation) + " >= 0); refusing");

    rep.delta = 0.02 / bump.m;
    const double n1 = bump.n1;
    const double lam_max = spec.max_abs_lambda();
    const double dx_budget = 2.0 * opt.dissipation_budget /
                             ((1.0 - opt.cfl) * lam_max * 2.0 * n1 * bump.m * bump.m);
    const double dx_target = std::min(1.0 / (10.0 * bump.m), dx_budget);

    const LocalSetup ls = localize(spec, profile, bump, rep.delta, dx_target, opt.localize);
    rep.dx_used = ls.sub.dx();
    rep.nx_used = ls.sub.nx;

    rep.v_samples = sample_v(ls, rep.delta, opt.cfl);
    rep.slope_primary = richardson_slope(rep.v_samples, rep.delta);
    const std::array<double, 5> v_half = sample_v(ls, rep.delta / 2.0, opt.cfl);
    rep.slope = richardson_slope(v_half, rep.delta / 2.0);

    if (rep.slope * rep.slope_primary < 0.0)
        throw InconclusiveError("dv_dt_at_zero: the two horizons disagree in sign (" +
                                std::to_string(rep.slope_primary) + " vs " +
                                std::to_string(rep.slope) + ")");
    rep.noise = std::abs(rep.slope - rep.slope_primary);
    rep.positive = rep.slope > 0.0 && rep.slope > 10.0 * rep.noise;
    return rep;
}

AnalyticDvDt analytic_dv_dt(const SystemSpec& spec, const WeightProfile& profile,
                            const BumpSpec& bump) {
    // fine local grid, no time stepping: u_t from the PDE operator
    const double dx_target = std::min(1.0 / (40.0 * bump.m), spec.dx());
    const LocalSetup ls = localize(spec, profile, bump, 0.0, dx_target, true);
    const SystemSpec& s = ls.sub;
    const GridFunction u0 = build_initial_data(s, ls.f_data, ls.bump);
    const GridFunction ut = derived_ut(s, u0);

    AnalyticDvDt out;
    double best1 = -1.0, best0 = -1.0;
    int j1 = 0, j0 = 0;
    for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.nx; ++j) {
            const double w = std::sqrt(ls.f_v.at(i, j)) *
                             std::exp(-ls.f_v.mu * s.sgn(i) * s.x(j));
            const double a1 = w * std::abs(ut.at(i, j));
            const double a0 = w * std::abs(u0.at(i, j));
            if (a1 > best1) {
                best1 = a1;
                out.i1 = i;
                j1 = j;
            }
            if (a0 > best0) {
                best0 = a0;
                out.i0 = i;
                j0 = j;
            }
        }
    }
    // the tracked-maximum derivative substitutes the stationarity of the
    // weighted sup at x1: d_x(w u_t)(x1) = 0 turns  -w u_tt  into
    //   s2 w (lambda (f'/2f - mu s) u_t - sum_j M_j u_t_j)
    const int i1 = out.i1;
    const double w1 = std::sqrt(ls.f_v.at(i1, j1)) * std::exp(-ls.f_v.mu * s.sgn(i1) * s.x(j1));
    const double w0 =
        std::sqrt(ls.f_v.at(out.i0, j0)) * std::exp(-ls.f_v.mu * s.sgn(out.i0) * s.x(j0));
    const double s2 = ut.at(i1, j1) >= 0.0 ? 1.0 : -1.0;
    const double sa0 = u0.at(out.i0, j0) >= 0.0 ? 1.0 : -1.0;
    const double h = s.dx();
    double fp;
    if (j1 == 0)
        fp = (-3.0 * ls.f_data.at(i1, 0) + 4.0 * ls.f_data.at(i1, 1) - ls.f_data.at(i1, 2)) /
             (2.0 * h);
    else if (j1 == s.nx - 1)
        fp = (3.0 * ls.f_data.at(i1, j1) - 4.0 * ls.f_data.at(i1, j1 - 1) +
              ls.f_data.at(i1, j1 - 2)) /
             (2.0 * h);
    else
        fp = (ls.f_data.at(i1, j1 + 1) - ls.f_data.at(i1, j1 - 1)) / (2.0 * h);
    const double wlog = fp / (2.0 * ls.f_data.at(i1, j1)) - ls.f_v.mu * s.sgn(i1);
    double coupling = 0.0;
    for (int k = 0; k < s.n; ++k) coupling += s.M(i1, k, j1) * ut.at(k, j1);
    out.term_w2 = s2 * w1 * (s.lam(i1, j1) * wlog * ut.at(i1, j1) - coupling);
    out.term_w1 = sa0 * w0 * ut.at(out.i0, j0);
    out.total = out.term_w2 + out.term_w1;
    out.x1 = s.x(j1) + (bump.x0 - ls.bump.x0);
    out.xa0 = s.x(j0) + (bump.x0 - ls.bump.x0);
    return out;
}

} // namespace hyplyap
