#include "hyplyap/interior.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace hyplyap {

std::vector<double> interior_rhs(const SystemSpec& spec, const std::vector<double>& f_point,
                                 double node_x) {
    const int n = spec.n;
    if (static_cast<int>(f_point.size()) != n) throw DomainError("interior_rhs: f has wrong size");
    for (int i = 0; i < n; ++i)
        if (!(f_point[i] > 0.0))
            throw DomainError("interior_rhs: f must be positive, component " + std::to_string(i + 1));
    std::vector<double> rhs(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double fi = f_point[i];
        double coupling = -spec.M_at(i, i, node_x) * fi;
        const double fi32 = fi * std::sqrt(fi);
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            coupling += std::abs(spec.M_at(i, k, node_x)) * fi32 / std::sqrt(f_point[k]);
        }
        rhs[i] = -2.0 / spec.lam_at(i, node_x) * coupling;
    }
    return rhs;
}

namespace {

struct OdeFailure {
    bool failed = false;
    IntegrateOutcome::Status status = IntegrateOutcome::Status::FloorHit;
    int component = -1;
    double x = 0.0;
};

// rhs of the sigma-perturbed system: -Lambda_i f' = (equality RHS)*(-Lambda_i) + sigma,
// i.e. f_i' = interior_rhs_i - sigma/Lambda_i.
void perturbed_rhs(const SystemSpec& spec, const double* f, double x, double sigma, double* out) {
    const int n = spec.n;
    for (int i = 0; i < n; ++i) {
        const double fi = f[i];
        double coupling = -spec.M_at(i, i, x) * fi;
        const double fi32 = fi * std::sqrt(fi);
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            coupling += std::abs(spec.M_at(i, k, x)) * fi32 / std::sqrt(f[k]);
        }
        const double lam = spec.lam_at(i, x);
        out[i] = -2.0 / lam * coupling - sigma / lam;
    }
}

enum class StageResult { Ok, Floor, Cap };

StageResult rk4_stage_check(const double* f, int n, double floor, double cap) {
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(f[i]) || f[i] >= cap) return StageResult::Cap;
        if (!(f[i] > floor)) return StageResult::Floor;
    }
    return StageResult::Ok;
}

// One classical RK4 step; Floor means an intermediate stage left the positive
// cone (caller shrinks the step), Cap means the solution is past the blowup
// threshold already.
StageResult rk4_step(const SystemSpec& spec, const double* f, double x, double h, double sigma,
                     double floor, double cap, double* out, std::vector<double>& scratch) {
    const int n = spec.n;
    double* k1 = scratch.data();
    double* k2 = k1 + n;
    double* k3 = k2 + n;
    double* k4 = k3 + n;
    double* tmp = k4 + n;
    perturbed_rhs(spec, f, x, sigma, k1);
    for (int i = 0; i < n; ++i) tmp[i] = f[i] + 0.5 * h * k1[i];
    if (auto r = rk4_stage_check(tmp, n, floor, cap); r != StageResult::Ok) return r;
    perturbed_rhs(spec, tmp, x + 0.5 * h, sigma, k2);
    for (int i = 0; i < n; ++i) tmp[i] = f[i] + 0.5 * h * k2[i];
    if (auto r = rk4_stage_check(tmp, n, floor, cap); r != StageResult::Ok) return r;
    perturbed_rhs(spec, tmp, x + 0.5 * h, sigma, k3);
    for (int i = 0; i < n; ++i) tmp[i] = f[i] + h * k3[i];
    if (auto r = rk4_stage_check(tmp, n, floor, cap); r != StageResult::Ok) return r;
    perturbed_rhs(spec, tmp, x + h, sigma, k4);
    for (int i = 0; i < n; ++i)
        out[i] = f[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return StageResult::Ok;
}

} // namespace

IntegrateOutcome integrate_weights(const SystemSpec& spec, const std::vector<double>& f0,
                                   double sigma) {
    const int n = spec.n;
    if (static_cast<int>(f0.size()) != n) throw DomainError("integrate_weights: f0 has wrong size");
    double f0max = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(f0[i] > 0.0)) throw DomainError("integrate_weights: f0 must be positive");
        f0max = std::max(f0max, f0[i]);
    }
    if (sigma < 0.0) throw DomainError("integrate_weights: sigma must be nonnegative");

    const double floor = 1e-12 * f0max;
    const double cap = 1e12 * f0max;
    const double tol_per_unit = 1e-9;

    IntegrateOutcome res;
    res.profile = WeightProfile(n, spec.nx, spec.L);
    res.profile.sigma = sigma;

    std::vector<double> f(f0), fbig(n), fa(n), fb(n), scratch(5 * n);
    for (int i = 0; i < n; ++i) res.profile.at(i, 0) = f[i];

    long steps = 0;
    auto fail = [&](IntegrateOutcome::Status st, int comp, double x) {
        res.status = st;
        res.component = comp;
        res.x_stop = x;
        res.steps = steps;
        return res;
    };
    auto guard = [&](const double* fv) -> int {
        for (int i = 0; i < n; ++i) {
            if (!std::isfinite(fv[i]) || fv[i] >= cap) return n + i; // blowup marker
            if (fv[i] <= floor) return i;                            // floor marker
        }
        return -1;
    };

    // Integrate node interval by interval so the grid sampling is exact.
    double h = spec.dx(); // initial step guess
    const long max_steps = 4'000'000;
    for (int j = 0; j + 1 < spec.nx; ++j) {
        double x = spec.x(j);
        const double x_end = spec.x(j + 1);
        while (x < x_end) {
            if (++steps > max_steps)
                return fail(IntegrateOutcome::Status::Blowup, -1, x); // step-limit: treat as failure
            double hs = std::min(h, x_end - x);
            if (hs < 1e-12 * spec.L) {
                // the continuation demands steps below any resolvable feature
                // scale: a finite-x singularity; classify by where it points
                int gmax = 0, gmin = 0;
                for (int i = 1; i < n; ++i) {
                    if (f[i] > f[gmax]) gmax = i;
                    if (f[i] < f[gmin]) gmin = i;
                }
                if (f[gmax] > 10.0 * f0max)
                    return fail(IntegrateOutcome::Status::Blowup, -1, x);
                return fail(IntegrateOutcome::Status::FloorHit, gmin, x);
            }
            // step doubling: one step of h vs two of h/2, 4th-order pair
            StageResult sr = rk4_step(spec, f.data(), x, hs, sigma, floor, cap, fbig.data(), scratch);
            if (sr == StageResult::Ok)
                sr = rk4_step(spec, f.data(), x, 0.5 * hs, sigma, floor, cap, fa.data(), scratch);
            if (sr == StageResult::Ok)
                sr = rk4_step(spec, fa.data(), x + 0.5 * hs, 0.5 * hs, sigma, floor, cap, fb.data(),
                              scratch);
            if (sr == StageResult::Cap) return fail(IntegrateOutcome::Status::Blowup, -1, x);
            if (sr == StageResult::Floor) {
                h = 0.25 * hs; // resolve the floor crossing; the progress guard
                continue;      // above reports it once h collapses
            }
            double err = 0.0, scale = 1.0;
            for (int i = 0; i < n; ++i) {
                err = std::max(err, std::abs(fb[i] - fbig[i]) / 15.0);
                scale = std::max(scale, std::abs(fb[i]));
            }
            // per-unit-length control; once the run is far above its initial
            // scale only the blowup location matters, so error-per-step keeps
            // the climb to the cap at O(log) cost
            const double tol_local =
                scale > 1e3 * f0max ? tol_per_unit * scale : tol_per_unit * hs * scale;
            if (err <= tol_local) {
                // accept, with local extrapolation
                for (int i = 0; i < n; ++i) f[i] = fb[i] + (fb[i] - fbig[i]) / 15.0;
                x += hs;
                int g = guard(f.data());
                if (g >= n) return fail(IntegrateOutcome::Status::Blowup, -1, x);
                if (g >= 0) return fail(IntegrateOutcome::Status::FloorHit, g, x);
                const double grow = err > 0.0 ? 0.9 * std::pow(tol_local / err, 0.2) : 5.0;
                h = hs * std::clamp(grow, 0.2, 5.0);
            } else {
                h = hs * std::clamp(0.9 * std::pow(tol_local / err, 0.2), 0.2, 0.9);
            }
        }
        for (int i = 0; i < n; ++i) res.profile.at(i, j + 1) = f[i];
    }
    res.status = IntegrateOutcome::Status::Complete;
    res.x_stop = spec.L;
    res.steps = steps;
    return res;
}

std::vector<double> check_strict_interior(const SystemSpec& spec, const WeightProfile& profile) {
    const int n = spec.n, nx = spec.nx;
    if (profile.n != n || profile.nx != nx)
        throw DomainError("check_strict_interior: profile shape mismatch");
    const double h = spec.dx();
    std::vector<double> margins(static_cast<std::size_t>(n) * nx, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < nx; ++j) {
            const double fi = profile.at(i, j);
            if (!(fi > 0.0)) throw DomainError("check_strict_interior: profile must be positive");
            double fp;
            if (j == 0)
                fp = (-3.0 * profile.at(i, 0) + 4.0 * profile.at(i, 1) - profile.at(i, 2)) / (2.0 * h);
            else if (j == nx - 1)
                fp = (3.0 * profile.at(i, nx - 1) - 4.0 * profile.at(i, nx - 2) + profile.at(i, nx - 3)) /
                     (2.0 * h);
            else
                fp = (profile.at(i, j + 1) - profile.at(i, j - 1)) / (2.0 * h);
            double coupling = 0.0;
            for (int k = 0; k < n; ++k) {
                if (k == i) continue;
                coupling += std::abs(spec.M(i, k, j)) * std::sqrt(fi / profile.at(k, j));
            }
            margins[static_cast<std::size_t>(i) * nx + j] =
                -spec.lam(i, j) * fp / fi - 2.0 * coupling + 2.0 * spec.M(i, i, j);
        }
    }
    return margins;
}

double sigma_default(const SystemSpec& spec) { return 1e-3 * spec.max_abs_source(); }

double tol_margin(const SystemSpec& spec) {
    // second-order-difference error of the equality profile's ~0 margins:
    // f ~ e^{2Mx} has |f'''/f| up to (2 max|M|)^3, one-sided stencils double it
    const double curv = 1.0 + 2.0 * spec.max_abs_source();
    return 1e-9 + 3.0 * spec.dx() * spec.dx() * curv * curv * curv;
}

namespace {

double min_of(const std::vector<double>& v) {
    double m = v.empty() ? 0.0 : v[0];
    for (double w : v) m = std::min(m, w);
    return m;
}

struct StartEval {
    double score = -3.0;
    IntegrateOutcome eq;   // sigma = 0 run
    IntegrateOutcome pert; // sigma = sigma_opt run
    bool feasible = false;
};

// Score landscape for the multistart/Nelder-Mead search (maximized):
//   equality run fails at x:          (x - L)/L - 1        in [-2,-1)
//   perturbed run fails at x:         (x - L)/L            in [-1, 0)
//   both complete:                    min strict margin of the perturbed
//                                     profile (+ optional boundary bias)
StartEval evaluate_start(const SystemSpec& spec, const std::vector<double>& logf0, double sigma,
                         double boundary_bias) {
    StartEval ev;
    std::vector<double> f0(logf0.size());
    for (std::size_t i = 0; i < logf0.size(); ++i) f0[i] = std::exp(std::clamp(logf0[i], -60.0, 60.0));
    ev.eq = integrate_weights(spec, f0, 0.0);
    if (!ev.eq.ok()) {
        ev.score = (ev.eq.x_stop - spec.L) / spec.L - 1.0;
        return ev;
    }
    ev.pert = integrate_weights(spec, f0, sigma);
    if (!ev.pert.ok()) {
        ev.score = (ev.pert.x_stop - spec.L) / spec.L;
        return ev;
    }
    ev.feasible = true;
    ev.score = min_of(check_strict_interior(spec, ev.pert.profile));
    if (boundary_bias > 0.0) {
        double reward = 0.0;
        for (int i = 0; i < spec.n; ++i) {
            const int jd = i < spec.m_pos ? spec.nx - 1 : 0;
            const int jo = spec.nx - 1 - jd;
            reward += std::log(ev.eq.profile.at(i, jd) / ev.eq.profile.at(i, jo));
        }
        ev.score += boundary_bias * reward;
    }
    return ev;
}

} // namespace

InteriorCertificate search_feasible(const SystemSpec& spec, const InteriorSearchOptions& opt) {
    const int n = spec.n;
    const int budget = std::max(1, opt.budget);
    const double sigma = opt.sigma >= 0.0 ? opt.sigma : sigma_default(spec);

    // Latin-hypercube starts over log f0 in [-log_range, log_range]^n
    std::mt19937_64 rng(opt.seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::vector<int>> perms(n, std::vector<int>(budget));
    for (int d = 0; d < n; ++d) {
        auto& p = perms[d];
        for (int b = 0; b < budget; ++b) p[b] = b;
        std::shuffle(p.begin(), p.end(), rng);
    }
    std::vector<std::vector<double>> starts(budget, std::vector<double>(n));
    for (int b = 0; b < budget; ++b)
        for (int d = 0; d < n; ++d)
            starts[b][d] = -opt.log_range + (perms[d][b] + unif(rng)) * (2.0 * opt.log_range / budget);
    if (budget >= 1) starts[0].assign(n, 0.0); // f0 = 1 first: canonical for M = 0

    auto score_of = [&](const std::vector<double>& p) {
        return evaluate_start(spec, p, sigma, opt.boundary_bias).score;
    };

    std::vector<double> best_pt = starts[0];
    double best_score = score_of(best_pt);
    for (int b = 1; b < budget; ++b) {
        const double s = score_of(starts[b]);
        if (s > best_score) {
            best_score = s;
            best_pt = starts[b];
        }
    }

    // Nelder-Mead refinement from the best start (maximize score)
    {
        const int m = n + 1;
        std::vector<std::vector<double>> simplex(m, best_pt);
        std::vector<double> fs(m);
        for (int i = 1; i < m; ++i) simplex[i][i - 1] += 0.5;
        for (int i = 0; i < m; ++i) fs[i] = score_of(simplex[i]);
        for (int it = 0; it < opt.nm_iters; ++it) {
            // order descending (best first)
            std::vector<int> idx(m);
            for (int i = 0; i < m; ++i) idx[i] = i;
            std::sort(idx.begin(), idx.end(), [&](int a, int b2) { return fs[a] > fs[b2]; });
            std::vector<std::vector<double>> sx(m);
            std::vector<double> sf(m);
            for (int i = 0; i < m; ++i) {
                sx[i] = simplex[idx[i]];
                sf[i] = fs[idx[i]];
            }
            simplex = sx;
            fs = sf;
            double spread = 0.0;
            for (int d = 0; d < n; ++d)
                spread = std::max(spread, std::abs(simplex[0][d] - simplex[m - 1][d]));
            if (spread < 1e-3) break;
            std::vector<double> centroid(n, 0.0);
            for (int i = 0; i < m - 1; ++i)
                for (int d = 0; d < n; ++d) centroid[d] += simplex[i][d] / (m - 1);
            auto blend = [&](double c) {
                std::vector<double> p(n);
                for (int d = 0; d < n; ++d)
                    p[d] = std::clamp(centroid[d] + c * (centroid[d] - simplex[m - 1][d]),
                                      -opt.log_range, opt.log_range);
                return p;
            };
            std::vector<double> xr = blend(1.0);
            double fr = score_of(xr);
            if (fr > fs[0]) {
                std::vector<double> xe = blend(2.0);
                double fe = score_of(xe);
                if (fe > fr) {
                    simplex[m - 1] = xe;
                    fs[m - 1] = fe;
                } else {
                    simplex[m - 1] = xr;
                    fs[m - 1] = fr;
                }
            } else if (fr > fs[m - 2]) {
                simplex[m - 1] = xr;
                fs[m - 1] = fr;
            } else {
                std::vector<double> xc = blend(-0.5);
                double fc = score_of(xc);
                if (fc > fs[m - 1]) {
                    simplex[m - 1] = xc;
                    fs[m - 1] = fc;
                } else {
                    for (int i = 1; i < m; ++i) {
                        for (int d = 0; d < n; ++d)
                            simplex[i][d] = 0.5 * (simplex[i][d] + simplex[0][d]);
                        fs[i] = score_of(simplex[i]);
                    }
                }
            }
        }
        for (int i = 0; i < m; ++i)
            if (fs[i] > best_score) {
                best_score = fs[i];
                best_pt = simplex[i];
            }
    }

    StartEval best = evaluate_start(spec, best_pt, sigma, opt.boundary_bias);
    InteriorCertificate cert;
    cert.score = best.score;
    cert.feasible = best.feasible;
    if (best.eq.ok()) {
        cert.profile = best.eq.profile;
    } else if (best.pert.ok()) {
        cert.profile = best.pert.profile; // equality run failed, perturbed succeeded
    } else {
        // infeasible: report the (possibly partial) equality attempt as a flat
        // profile from the start point so the report stays well-formed
        cert.profile = WeightProfile(n, spec.nx, spec.L);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < spec.nx; ++j) cert.profile.at(i, j) = std::exp(best_pt[i]);
        cert.feasible = false;
    }
    cert.profile.sigma = sigma;
    cert.profile.mu = 0.0;
    cert.margins = check_strict_interior(spec, cert.profile);
    cert.min_f = cert.profile.min_f();
    cert.min_margin = min_of(cert.margins);
    return cert;
}

} // namespace hyplyap
