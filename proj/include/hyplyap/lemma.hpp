#pragma once

#include <optional>
#include <vector>

#include "hyplyap/types.hpp"

namespace hyplyap {

/// Coefficient family (a_i, b_ij) sampled on a grid; carrier for the
/// positivity form sum_i (a_i y_i^{2p} + sum_j b_ij y_i^{2p-1} y_j).
struct LemmaInstance {
    int n = 0;
    int nx = 1;
    std::vector<double> a; // n x nx
    std::vector<double> b; // n x n x nx

    double a_at(int i, int j) const { return a[static_cast<std::size_t>(i) * nx + j]; }
    double& a_at(int i, int j) { return a[static_cast<std::size_t>(i) * nx + j]; }
    double b_at(int i, int k, int j) const {
        return b[(static_cast<std::size_t>(i) * n + k) * nx + j];
    }
    double& b_at(int i, int k, int j) { return b[(static_cast<std::size_t>(i) * n + k) * nx + j]; }
};

struct PointwiseVerdict {
    bool holds = false;
    std::vector<double> margins; // n x nx: a_i - sum_{k!=i}|b_ik| + b_ii
    double min_margin = 0.0;
};

/// Strict row-dominance condition (iii): margins all > 0.
PointwiseVerdict check_iii(const LemmaInstance& inst);
/// Non-strict variant (ii): margins all >= -tol.
PointwiseVerdict check_ii(const LemmaInstance& inst, double tol = 1e-12);

struct BruteForceResult {
    double min_value = 0.0;
    std::vector<double> argmin_y;
    int argmin_node = 0;
    /// negative minima are exact counterexamples; positive minima are
    /// conditional on the grid resolution
    bool exact_negative = false;
};

/// Brute-force the form over the unit sup-norm sphere (degree-2p homogeneity):
/// enumerate the max-attaining index, grid the free coordinates over [-1,1].
/// Throws CombinatorialLimit for n > 6 at the default resolution.
BruteForceResult brute_force_i(const LemmaInstance& inst, int p, int resolution = 201);

struct FindP1Result {
    std::optional<int> p_found; // smallest p in the doubling ladder with min > 0
    int p_analytic = 1;         // ceil(sum|b|_0 / (2 min_i d_i^(0))), clamped >= 1
    double last_min = 0.0;
};

/// Doubling search p in {1,2,4,...,p_max} for a positive brute-force minimum.
/// Requires strict (iii); also reports the analytic bound from the proof's
/// d_i estimate. NotFound is expressed by an empty p_found.
FindP1Result find_p1(const LemmaInstance& inst, int p_max, int resolution = 201);

LemmaInstance load_lemma_instance(const std::string& path);

} // namespace hyplyap
