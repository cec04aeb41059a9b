#pragma once

#include <vector>

#include "hyplyap/types.hpp"

namespace hyplyap::testing {

/// Spec with x-constant coefficients. lambda_c has n entries (signs must
/// match m_pos ordering), M_c and K are n x n row-major.
inline SystemSpec const_spec(int n, int m_pos, double L, int nx,
                             const std::vector<double>& lambda_c,
                             const std::vector<double>& M_c, const std::vector<double>& K) {
    SystemSpec s;
    s.n = n;
    s.m_pos = m_pos;
    s.L = L;
    s.nx = nx;
    s.lambda.assign(static_cast<std::size_t>(n) * nx, 0.0);
    s.source.assign(static_cast<std::size_t>(n) * n * nx, 0.0);
    s.K = K;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < nx; ++j) s.lam(i, j) = lambda_c[i];
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < nx; ++j) s.M(i, k, j) = M_c[static_cast<std::size_t>(i) * n + k];
    validate(s);
    return s;
}

/// 2x2 transport with speeds (1,-1), source M_c, boundary K.
inline SystemSpec two_by_two(double L, int nx, const std::vector<double>& M_c,
                             const std::vector<double>& K) {
    return const_spec(2, 1, L, nx, {1.0, -1.0}, M_c, K);
}

/// C-infinity bump exp(-1/(1-z^2)) supported on |x - c| < w, sampled.
inline GridFunction bump(const SystemSpec& spec, int comp, double c, double w, double amp) {
    GridFunction u(spec.n, spec.nx, spec.L);
    for (int j = 0; j < spec.nx; ++j) {
        const double z = (spec.x(j) - c) / w;
        if (std::abs(z) < 1.0) u.at(comp, j) = amp * std::exp(-1.0 / (1.0 - z * z) + 1.0);
    }
    return u;
}

inline WeightProfile unit_profile(const SystemSpec& spec) {
    return WeightProfile(spec.n, spec.nx, spec.L);
}

} // namespace hyplyap::testing
