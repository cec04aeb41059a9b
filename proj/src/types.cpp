#include "hyplyap/types.hpp"

#include <string>

namespace hyplyap {

void validate(const SystemSpec& spec) {
    if (spec.n <= 0) throw ValidationError("n must be a positive integer");
    if (spec.m_pos < 0 || spec.m_pos > spec.n)
        throw ValidationError("m_pos must lie in [0, n], got " + std::to_string(spec.m_pos));
    if (!(spec.L > 0.0) || !std::isfinite(spec.L))
        throw ValidationError("L must be a positive real");
    if (spec.nx < 3) throw ValidationError("nx must be >= 3, got " + std::to_string(spec.nx));
    const std::size_t n = spec.n, nx = spec.nx;
    if (spec.lambda.size() != n * nx)
        throw ValidationError("lambda: expected shape " + std::to_string(spec.n) + "x" +
                              std::to_string(spec.nx));
    if (spec.source.size() != n * n * nx)
        throw ValidationError("source: expected shape " + std::to_string(spec.n) + "x" +
                              std::to_string(spec.n) + "x" + std::to_string(spec.nx));
    if (spec.K.size() != n * n)
        throw ValidationError("K: expected shape " + std::to_string(spec.n) + "x" +
                              std::to_string(spec.n));
    if (!std::isfinite(spec.mu) || spec.mu < 0.0)
        throw ValidationError("mu must be a finite nonnegative real");

    for (int i = 0; i < spec.n; ++i) {
        const int want = spec.sgn(i);
        for (int j = 0; j < spec.nx; ++j) {
            const double l = spec.lam(i, j);
            if (!std::isfinite(l))
                throw ValidationError("lambda: non-finite entry at component " +
                                      std::to_string(i + 1) + ", node " + std::to_string(j + 1));
            if (l == 0.0)
                throw ValidationError("lambda: non-vanishing eigenvalues required, component " +
                                      std::to_string(i + 1) + " vanishes at node " +
                                      std::to_string(j + 1));
            if ((l > 0.0 ? 1 : -1) != want)
                throw ValidationError(
                    "lambda: sign pattern violation at component " + std::to_string(i + 1) +
                    ", node " + std::to_string(j + 1) +
                    " (non-vanishing eigenvalues with constant sign: components 1.." +
                    std::to_string(spec.m_pos) + " positive, the rest negative)");
        }
    }
    for (std::size_t idx = 0; idx < spec.source.size(); ++idx)
        if (!std::isfinite(spec.source[idx]))
            throw ValidationError("source: non-finite entry at flat index " + std::to_string(idx));
    for (std::size_t idx = 0; idx < spec.K.size(); ++idx)
        if (!std::isfinite(spec.K[idx]))
            throw ValidationError("K: non-finite entry at flat index " + std::to_string(idx));
}

void require_shape(const SystemSpec& spec, const GridFunction& u, const char* what) {
    if (u.n != spec.n || u.nx != spec.nx)
        throw ValidationError(std::string(what) + ": shape mismatch, expected " +
                              std::to_string(spec.n) + "x" + std::to_string(spec.nx) + ", got " +
                              std::to_string(u.n) + "x" + std::to_string(u.nx));
    if (!u.all_finite()) throw ValidationError(std::string(what) + ": non-finite entry");
}

} // namespace hyplyap
