#include "hyplyap/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hyplyap {

double theta(const std::vector<double>& K, const std::vector<double>& delta) {
    const int n = static_cast<int>(delta.size());
    for (double d : delta)
        if (!(d > 0.0)) throw DomainError("theta: delta must be positive componentwise");
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j)
            row += std::abs(K[static_cast<std::size_t>(i) * n + j]) * delta[i] / delta[j];
        worst = std::max(worst, row);
    }
    return worst;
}

namespace {

// Power iteration on |K| + cI: the diagonal shift makes the chain aperiodic
// so the max-norm estimate converges for imprimitive (e.g. bipartite)
// patterns too; rho(|K| + cI) = rho(|K|) + c for nonnegative matrices.
double shifted_power(const std::vector<double>& K, int n, int iters, std::vector<double>* vec) {
    double shift = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::abs(K[static_cast<std::size_t>(i) * n + j]);
        shift = std::max(shift, row);
    }
    std::vector<double> v(n, 1.0), w(n, 0.0);
    if (shift == 0.0) {
        if (vec) *vec = v;
        return 0.0;
    }
    double norm = shift, half_norm = shift;
    for (int it = 0; it < iters; ++it) {
        norm = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = shift * v[i];
            for (int j = 0; j < n; ++j) s += std::abs(K[static_cast<std::size_t>(i) * n + j]) * v[j];
            w[i] = s;
            norm = std::max(norm, s);
        }
        for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
        if (it == iters / 2 - 1) half_norm = norm;
    }
    if (vec) *vec = v;
    // reducible |K| makes the shifted matrix defective and the estimate
    // converges like rho (1 + c/k); Richardson in 1/k removes that term
    const double extrapolated = 2.0 * norm - half_norm;
    return std::max(extrapolated - shift, 0.0);
}

} // namespace

double power_iteration_abs(const std::vector<double>& K, int n, int iters) {
    return shifted_power(K, n, iters, nullptr);
}

namespace {

std::vector<double> perron_vector_abs(const std::vector<double>& K, int n, int iters = 200) {
    std::vector<double> v;
    shifted_power(K, n, iters, &v);
    return v;
}

// subgradient of log theta(K, e^dlt) at dlt, written into g (not cleared)
void add_theta_subgrad(const std::vector<double>& K, const std::vector<double>& dlt,
                       std::vector<double>& g) {
    const int n = static_cast<int>(dlt.size());
    int istar = 0;
    double best = -1.0, rs_best = 0.0;
    std::vector<double> terms(n, 0.0);
    std::vector<double> best_terms(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            terms[j] = std::abs(K[static_cast<std::size_t>(i) * n + j]) * std::exp(dlt[i] - dlt[j]);
            row += terms[j];
        }
        if (row > best) {
            best = row;
            istar = i;
            rs_best = row;
            best_terms = terms;
        }
    }
    if (rs_best <= 0.0) return; // theta = 0: flat
    for (int j = 0; j < n; ++j) {
        const double w = best_terms[j] / rs_best;
        g[istar] += w;
        g[j] -= w;
    }
}

} // namespace

RhoResult rho_inf(const std::vector<double>& K, int n) {
    for (double k : K)
        if (!std::isfinite(k)) throw DomainError("rho_inf: K must be finite");
    RhoResult out;
    out.oracle = power_iteration_abs(K, n, 200);

    // Perron-seeded candidates: Delta_i = 1/max(v_i, eps) over an eps ladder,
    // which also reaches the (unattained) infimum of reducible |K|.
    const std::vector<double> v = perron_vector_abs(K, n);
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, x);
    if (vmax <= 0.0) vmax = 1.0;
    std::vector<double> best_dlt(n, 0.0);
    double best_theta = theta(K, std::vector<double>(n, 1.0));
    for (double eps : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
        std::vector<double> dlt(n);
        for (int i = 0; i < n; ++i) dlt[i] = -std::log(std::max(v[i], eps * vmax));
        const double d0 = dlt[0];
        for (int i = 0; i < n; ++i) dlt[i] -= d0; // gauge
        std::vector<double> delta(n);
        for (int i = 0; i < n; ++i) delta[i] = std::exp(dlt[i]);
        const double t = theta(K, delta);
        if (t < best_theta) {
            best_theta = t;
            best_dlt = dlt;
        }
    }

    // subgradient polish, diminishing steps a/(1+k)
    std::vector<double> dlt = best_dlt, g(n, 0.0);
    for (int it = 0; it < 500; ++it) {
        std::fill(g.begin(), g.end(), 0.0);
        add_theta_subgrad(K, dlt, g);
        const double step = 1.0 / (1.0 + it);
        for (int i = 0; i < n; ++i) dlt[i] -= step * g[i];
        const double d0 = dlt[0];
        for (int i = 0; i < n; ++i) dlt[i] = std::clamp(dlt[i] - d0, -60.0, 60.0);
        std::vector<double> delta(n);
        for (int i = 0; i < n; ++i) delta[i] = std::exp(dlt[i]);
        const double t = theta(K, delta);
        if (t < best_theta) {
            best_theta = t;
            best_dlt = dlt;
        }
    }

    out.rho = best_theta;
    out.delta.resize(n);
    for (int i = 0; i < n; ++i) out.delta[i] = std::exp(best_dlt[i]);
    if (std::abs(out.rho - out.oracle) > 1e-5 * std::max(1.0, out.oracle))
        throw OracleMismatch("rho_inf: optimizer " + std::to_string(out.rho) +
                             " vs power-iteration oracle " + std::to_string(out.oracle));
    return out;
}

BoundaryCertificate check_boundary(const SystemSpec& spec, const WeightProfile& profile,
                                   const BoundaryCheckOptions& opt) {
    const int n = spec.n;
    if (profile.n != n || profile.nx != spec.nx)
        throw DomainError("check_boundary: profile shape mismatch");
    std::vector<double> f_d(n), f_ld(n); // f_i(d_i), f_i(L-d_i)
    for (int i = 0; i < n; ++i) {
        const int jd = i < spec.m_pos ? spec.nx - 1 : 0;
        f_d[i] = profile.at(i, jd);
        f_ld[i] = profile.at(i, spec.nx - 1 - jd);
        if (!(f_d[i] > 0.0) || !(f_ld[i] > 0.0))
            throw DomainError("check_boundary: profile must be positive at the endpoints");
    }

    auto eval = [&](const std::vector<double>& dlt, std::vector<double>* grad) {
        // J = log theta - log min_i(f_d e^{-2 dlt}) + log max_i(f_ld e^{-2 dlt})
        std::vector<double> delta(n);
        for (int i = 0; i < n; ++i) delta[i] = std::exp(dlt[i]);
        const double th = theta(spec.K, delta);
        int imin = 0, imax = 0;
        double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
        for (int i = 0; i < n; ++i) {
            const double a = std::log(f_d[i]) - 2.0 * dlt[i];
            const double b = std::log(f_ld[i]) - 2.0 * dlt[i];
            if (a < lmin) {
                lmin = a;
                imin = i;
            }
            if (b > lmax) {
                lmax = b;
                imax = i;
            }
        }
        if (grad) {
            std::fill(grad->begin(), grad->end(), 0.0);
            add_theta_subgrad(spec.K, dlt, *grad);
            (*grad)[imin] += 2.0;
            (*grad)[imax] -= 2.0;
        }
        const double logth = th > 0.0 ? std::log(th) : -std::numeric_limits<double>::infinity();
        return logth - lmin + lmax;
    };

    // starts: Perron of |K|, plus seeded random points
    std::vector<std::vector<double>> starts;
    {
        std::vector<double> v = perron_vector_abs(spec.K, n);
        double vmax = 0.0;
        for (double x : v) vmax = std::max(vmax, x);
        if (vmax <= 0.0) vmax = 1.0;
        std::vector<double> dlt(n);
        for (int i = 0; i < n; ++i) dlt[i] = -std::log(std::max(v[i], 1e-6 * vmax));
        const double d0 = dlt[0];
        for (int i = 0; i < n; ++i) dlt[i] -= d0;
        starts.push_back(dlt);
        // f_i = Delta_i^2 start: optimal when f is constant in x
        std::vector<double> dl2(n);
        for (int i = 0; i < n; ++i) dl2[i] = 0.5 * std::log(f_d[i]) - 0.5 * std::log(f_d[0]);
        starts.push_back(dl2);
    }
    std::mt19937_64 rng(opt.seed * 0x9e3779b97f4a7c15ULL + 1234567ULL);
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    for (int s = 0; s < opt.random_starts; ++s) {
        std::vector<double> dlt(n, 0.0);
        for (int i = 1; i < n; ++i) dlt[i] = unif(rng);
        starts.push_back(dlt);
    }

    std::vector<double> best_dlt = starts[0];
    double best_J = eval(best_dlt, nullptr);
    std::vector<double> g(n, 0.0);
    for (const auto& start : starts) {
        std::vector<double> dlt = start;
        for (int it = 0; it < opt.budget; ++it) {
            const double J = eval(dlt, &g);
            if (J < best_J) {
                best_J = J;
                best_dlt = dlt;
            }
            if (!std::isfinite(J)) break; // theta == 0: any delta witnesses
            const double step = 1.0 / (1.0 + it);
            for (int i = 0; i < n; ++i) dlt[i] -= step * g[i];
            const double d0 = dlt[0];
            for (int i = 0; i < n; ++i) dlt[i] = std::clamp(dlt[i] - d0, -60.0, 60.0);
        }
        const double J = eval(dlt, nullptr);
        if (J < best_J) {
            best_J = J;
            best_dlt = dlt;
        }
    }

    BoundaryCertificate cert;
    cert.delta.resize(n);
    for (int i = 0; i < n; ++i) cert.delta[i] = std::exp(best_dlt[i]);
    cert.theta = theta(spec.K, cert.delta);
    double num = std::numeric_limits<double>::infinity(), den = 0.0;
    for (int i = 0; i < n; ++i) {
        num = std::min(num, f_d[i] / (cert.delta[i] * cert.delta[i]));
        den = std::max(den, f_ld[i] / (cert.delta[i] * cert.delta[i]));
    }
    cert.ratio = num / den;
    cert.margin = cert.ratio - cert.theta;
    cert.satisfied = cert.margin > kTolBoundary * std::max(cert.ratio, cert.theta);
    return cert;
}

} // namespace hyplyap
