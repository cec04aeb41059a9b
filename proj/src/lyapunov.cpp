#include "hyplyap/lyapunov.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace hyplyap {

namespace {

void check_profile(const SystemSpec& spec, const WeightProfile& profile) {
    if (profile.n != spec.n || profile.nx != spec.nx)
        throw DomainError("lyapunov: profile shape mismatch");
    if (!(profile.min_f() > 0.0)) throw DomainError("lyapunov: profile must be positive");
}

// (int sum_i f^p g_i^{2p} e^{-2p mu s_i x})^{1/2p} in log space
double lp_norm(const SystemSpec& spec, const WeightProfile& profile, const GridFunction& g,
               int p) {
    const int n = spec.n, nx = spec.nx;
    const double h = spec.dx();
    const double mu = profile.mu;
    double lmax = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(static_cast<std::size_t>(n) * nx,
                             -std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i) {
        const double si = spec.sgn(i);
        for (int j = 0; j < nx; ++j) {
            const double gij = std::abs(g.at(i, j));
            if (gij == 0.0) continue;
            const double l = p * std::log(profile.at(i, j)) + 2.0 * p * std::log(gij) -
                             2.0 * p * mu * si * spec.x(j);
            logs[static_cast<std::size_t>(i) * nx + j] = l;
            lmax = std::max(lmax, l);
        }
    }
    if (!std::isfinite(lmax)) return 0.0; // g identically zero
    double acc = 0.0;
    for (int j = 0; j < nx; ++j) {
        const double w = (j == 0 || j == nx - 1) ? 0.5 * h : h;
        for (int i = 0; i < n; ++i) {
            const double l = logs[static_cast<std::size_t>(i) * nx + j];
            if (std::isfinite(l)) acc += w * std::exp(l - lmax);
        }
    }
    return std::exp((lmax + std::log(acc)) / (2.0 * p));
}

} // namespace

double w1p(const SystemSpec& spec, const WeightProfile& profile, const GridFunction& u, int p) {
    if (p < 1) throw DomainError("w1p: p must be >= 1");
    check_profile(spec, profile);
    require_shape(spec, u, "u");
    return lp_norm(spec, profile, u, p);
}

double w2p(const SystemSpec& spec, const WeightProfile& profile, const GridFunction& u, int p) {
    if (p < 1) throw DomainError("w2p: p must be >= 1");
    check_profile(spec, profile);
    require_shape(spec, u, "u");
    return lp_norm(spec, profile, derived_ut(spec, u), p);
}

double v_c1(const SystemSpec& spec, const WeightProfile& profile, const GridFunction& u) {
    check_profile(spec, profile);
    require_shape(spec, u, "u");
    const GridFunction ut = derived_ut(spec, u);
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < spec.n; ++i) {
        const double si = spec.sgn(i);
        for (int j = 0; j < spec.nx; ++j) {
            const double tilt = std::exp(-profile.mu * si * spec.x(j));
            const double w = std::sqrt(profile.at(i, j)) * tilt;
            s1 = std::max(s1, w * std::abs(u.at(i, j)));
            s2 = std::max(s2, w * std::abs(ut.at(i, j)));
        }
    }
    return s1 + s2;
}

LyapunovSeries build_series(const SystemSpec& spec, const WeightProfile& profile,
                            const std::vector<TrajectoryState>& snapshots, int p) {
    LyapunovSeries s;
    s.p_used = p;
    for (const TrajectoryState& st : snapshots) {
        const GridFunction ut = derived_ut(spec, st.u);
        s.times.push_back(st.t);
        s.W1p.push_back(w1p(spec, profile, st.u, p));
        s.W2p.push_back(lp_norm(spec, profile, ut, p));
        s.V.push_back(v_c1(spec, profile, st.u));
        s.sup_u.push_back(st.u.max_abs());
        s.sup_ut.push_back(ut.max_abs());
    }
    return s;
}

GammaFit fit_gamma(const LyapunovSeries& series, double t_a, double t_b) {
    std::vector<double> ts, ys;
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        const double t = series.times[k];
        if (t < t_a || t > t_b) continue;
        if (!(series.V[k] > 0.0))
            throw DecayedToZero("fit_gamma: V is nonpositive at t = " + std::to_string(t));
        ts.push_back(t);
        ys.push_back(std::log(series.V[k]));
    }
    if (ts.size() < 2) throw DomainError("fit_gamma: fewer than two samples in the window");
    const double m = static_cast<double>(ts.size());
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        st += ts[k];
        sy += ys[k];
        stt += ts[k] * ts[k];
        sty += ts[k] * ys[k];
        syy += ys[k] * ys[k];
    }
    const double denom = m * stt - st * st;
    const double slope = (m * sty - st * sy) / denom;
    GammaFit fit;
    fit.gamma = -slope;
    fit.points = static_cast<int>(ts.size());
    const double ss_tot = syy - sy * sy / m;
    double ss_res = 0.0;
    const double intercept = (sy - slope * st) / m;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double r = ys[k] - (intercept + slope * ts[k]);
        ss_res += r * r;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

DecreaseVerdict verify_decrease(const LyapunovSeries& series, double tol_growth) {
    DecreaseVerdict v;
    v.ok = true;
    for (std::size_t k = 0; k + 1 < series.V.size(); ++k) {
        if (series.V[k] <= 0.0) continue;
        const double growth = series.V[k + 1] / series.V[k] - 1.0;
        if (growth > v.worst_violation) {
            v.worst_violation = growth;
            v.worst_time = series.times[k + 1];
        }
        if (growth > tol_growth) v.ok = false;
    }
    return v;
}

void write_series_csv(const LyapunovSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "t,V,W1p,W2p,sup_u,sup_ut\n";
    out.precision(17);
    for (std::size_t k = 0; k < series.times.size(); ++k)
        out << series.times[k] << ',' << series.V[k] << ',' << series.W1p[k] << ',' << series.W2p[k]
            << ',' << series.sup_u[k] << ',' << series.sup_ut[k] << '\n';
    if (!out) throw IoError("write failed: " + path);
}

} // namespace hyplyap
