#include "hyplyap/lemma.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace hyplyap {

namespace {

PointwiseVerdict pointwise(const LemmaInstance& inst, double tol) {
    PointwiseVerdict v;
    v.margins.assign(static_cast<std::size_t>(inst.n) * inst.nx, 0.0);
    v.min_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < inst.n; ++i) {
        for (int j = 0; j < inst.nx; ++j) {
            double off = 0.0;
            for (int k = 0; k < inst.n; ++k)
                if (k != i) off += std::abs(inst.b_at(i, k, j));
            const double m = inst.a_at(i, j) - off + inst.b_at(i, i, j);
            v.margins[static_cast<std::size_t>(i) * inst.nx + j] = m;
            v.min_margin = std::min(v.min_margin, m);
        }
    }
    v.holds = v.min_margin > tol;
    return v;
}

} // namespace

PointwiseVerdict check_iii(const LemmaInstance& inst) { return pointwise(inst, 0.0); }
PointwiseVerdict check_ii(const LemmaInstance& inst, double tol) { return pointwise(inst, -tol); }

BruteForceResult brute_force_i(const LemmaInstance& inst, int p, int resolution) {
    if (p < 1) throw DomainError("brute_force_i: p must be >= 1");
    if (resolution < 3) throw DomainError("brute_force_i: resolution must be >= 3");
    if (inst.n > 6 && resolution >= 201)
        throw CombinatorialLimit("brute_force_i: n > 6 at the default resolution");

    const int n = inst.n, nx = inst.nx;
    // The form is even in y (2p even, 2p-1+1 even), so fixing the
    // max-attaining coordinate to +1 covers both signs; the grid on the free
    // coordinates supplies the remaining sign patterns. |y|<1 powers underflow
    // to 0 gracefully, which is the correct limit for p up to 512.
    std::vector<double> grid(resolution);
    for (int g = 0; g < resolution; ++g) grid[g] = -1.0 + 2.0 * g / (resolution - 1);

    BruteForceResult best;
    best.min_value = std::numeric_limits<double>::infinity();

    std::vector<double> y(n, 0.0), y2p(n, 0.0), y2pm1(n, 0.0);
    std::vector<int> digits(std::max(0, n - 1), 0);
    const long combos = static_cast<long>(std::pow(static_cast<double>(resolution), n - 1));

    for (int istar = 0; istar < n; ++istar) {
        for (long c = 0; c < combos; ++c) {
            long rem = c;
            bool valid = true;
            for (int d = 0, pos = 0; d < n; ++d) {
                if (d == istar) {
                    y[d] = 1.0;
                    continue;
                }
                const int gi = static_cast<int>(rem % resolution);
                rem /= resolution;
                y[d] = grid[gi];
                (void)pos;
            }
            // skip duplicated sphere patches: require |y_d| < 1 strictly for
            // d < istar so each max-pattern is enumerated once
            for (int d = 0; d < istar && valid; ++d)
                if (std::abs(y[d]) >= 1.0) valid = false;
            if (!valid) continue;
            for (int d = 0; d < n; ++d) {
                const double ad = std::abs(y[d]);
                y2pm1[d] = std::pow(ad, 2 * p - 1) * (y[d] < 0.0 ? -1.0 : 1.0);
                y2p[d] = y2pm1[d] * y[d];
            }
            for (int j = 0; j < nx; ++j) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) {
                    double row = 0.0;
                    for (int k = 0; k < n; ++k) row += inst.b_at(i, k, j) * y[k];
                    s += inst.a_at(i, j) * y2p[i] + y2pm1[i] * row;
                }
                if (s < best.min_value) {
                    best.min_value = s;
                    best.argmin_y = y;
                    best.argmin_node = j;
                }
            }
        }
    }
    best.exact_negative = best.min_value < 0.0;
    return best;
}

FindP1Result find_p1(const LemmaInstance& inst, int p_max, int resolution) {
    const PointwiseVerdict iii = check_iii(inst);
    if (!iii.holds)
        throw DomainError("find_p1: strict condition (iii) does not hold (min margin " +
                          std::to_string(iii.min_margin) + ")");
    FindP1Result out;
    // analytic bound: with b_ii folded into a_i, d_i = a_i + b_ii - sum_{k!=i}|b_ik|,
    // p_analytic = ceil(sum_{i,k}|b_ik|_0 / (2 min_i inf_x d_i))
    double min_d = std::numeric_limits<double>::infinity();
    for (double m : iii.margins) min_d = std::min(min_d, m);
    double sum_b = 0.0;
    for (int i = 0; i < inst.n; ++i)
        for (int k = 0; k < inst.n; ++k) {
            if (k == i) continue; // b_ii := 0 after the fold
            double sup = 0.0;
            for (int j = 0; j < inst.nx; ++j) sup = std::max(sup, std::abs(inst.b_at(i, k, j)));
            sum_b += sup;
        }
    out.p_analytic = std::max(1, static_cast<int>(std::ceil(sum_b / (2.0 * min_d))));

    for (int p = 1; p <= p_max; p *= 2) {
        const BruteForceResult r = brute_force_i(inst, p, resolution);
        out.last_min = r.min_value;
        if (r.min_value > 0.0) {
            out.p_found = p;
            return out;
        }
    }
    return out; // NotFound(p_max)
}

LemmaInstance load_lemma_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed lemma instance: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("a") || !doc.contains("b"))
        throw ParseError("lemma instance: expected object with keys a, b");
    const auto& a = doc["a"];
    const auto& b = doc["b"];
    LemmaInstance inst;
    inst.n = static_cast<int>(a.size());
    if (inst.n < 1) throw ParseError("lemma instance: a must be nonempty");
    inst.nx = a[0].is_array() ? static_cast<int>(a[0].size()) : 1;
    inst.a.assign(static_cast<std::size_t>(inst.n) * inst.nx, 0.0);
    inst.b.assign(static_cast<std::size_t>(inst.n) * inst.n * inst.nx, 0.0);
    for (int i = 0; i < inst.n; ++i) {
        if (a[i].is_number()) {
            for (int j = 0; j < inst.nx; ++j) inst.a_at(i, j) = a[i].get<double>();
        } else {
            if (static_cast<int>(a[i].size()) != inst.nx) throw ParseError("lemma instance: ragged a");
            for (int j = 0; j < inst.nx; ++j) inst.a_at(i, j) = a[i][j].get<double>();
        }
    }
    if (static_cast<int>(b.size()) != inst.n) throw ParseError("lemma instance: b must have n rows");
    for (int i = 0; i < inst.n; ++i) {
        if (static_cast<int>(b[i].size()) != inst.n)
            throw ParseError("lemma instance: b must be n x n (x nx)");
        for (int k = 0; k < inst.n; ++k) {
            const auto& cell = b[i][k];
            if (cell.is_number()) {
                for (int j = 0; j < inst.nx; ++j) inst.b_at(i, k, j) = cell.get<double>();
            } else {
                if (static_cast<int>(cell.size()) != inst.nx)
                    throw ParseError("lemma instance: ragged b");
                for (int j = 0; j < inst.nx; ++j) inst.b_at(i, k, j) = cell[j].get<double>();
            }
        }
    }
    return inst;
}

} // namespace hyplyap
