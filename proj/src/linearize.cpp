#include "hyplyap/linearize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace hyplyap {

double tol_steady(const PhysicalSystem& phys) {
    double dmax = 0.0;
    for (int j = 0; j < phys.nx; ++j) {
        std::vector<double> y(phys.n);
        for (int i = 0; i < phys.n; ++i) y[i] = phys.y_at(i, j);
        const std::vector<double> d = phys.D(y);
        for (double v : d) dmax = std::max(dmax, std::abs(v));
    }
    return 1e-6 * (1.0 + dmax);
}

double steady_state_residual(const PhysicalSystem& phys) {
    const int n = phys.n, nx = phys.nx;
    const double h = phys.dx();
    double worst = 0.0;
    for (int j = 1; j + 1 < nx; ++j) {
        std::vector<double> y(n), yx(n);
        for (int i = 0; i < n; ++i) {
            y[i] = phys.y_at(i, j);
            yx[i] = (phys.y_at(i, j + 1) - phys.y_at(i, j - 1)) / (2.0 * h);
        }
        const std::vector<double> Fm = phys.F(y);
        const std::vector<double> Dv = phys.D(y);
        for (int i = 0; i < n; ++i) {
            double r = Dv[i];
            for (int k = 0; k < n; ++k) r += Fm[static_cast<std::size_t>(i) * n + k] * yx[k];
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

Diagonalization diagonalize(const PhysicalSystem& phys) {
    const int n = phys.n, nx = phys.nx;
    if (!(phys.F && phys.D)) throw DomainError("diagonalize: F and D evaluators required");
    if (static_cast<int>(phys.ystar.size()) != n * nx)
        throw DomainError("diagonalize: ystar has wrong shape");

    Diagonalization out;
    out.n = n;
    out.nx = nx;
    out.N.resize(static_cast<std::size_t>(nx) * n * n);
    out.N_inv.resize(static_cast<std::size_t>(nx) * n * n);
    out.lambda.resize(static_cast<std::size_t>(n) * nx);

    Eigen::MatrixXd prev_cols; // aligned eigenvector columns of the previous node
    std::vector<int> sign_pattern(n, 0);

    for (int j = 0; j < nx; ++j) {
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) y[i] = phys.y_at(i, j);
        const std::vector<double> Fv = phys.F(y);
        Eigen::MatrixXd Fm(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) Fm(i, k) = Fv[static_cast<std::size_t>(i) * n + k];

        Eigen::EigenSolver<Eigen::MatrixXd> es(Fm);
        if (es.info() != Eigen::Success)
            throw EigenFailure("diagonalize: eigensolver failed at node " + std::to_string(j + 1));
        Eigen::VectorXcd ev = es.eigenvalues();
        const double scale = std::max(Fm.cwiseAbs().maxCoeff(), 1.0);
        for (int i = 0; i < n; ++i) {
            if (std::abs(ev(i).imag()) > 1e-9 * scale)
                throw EigenFailure("diagonalize: complex eigenvalue at node " + std::to_string(j + 1));
            if (std::abs(ev(i).real()) <= 1e-12 * scale)
                throw EigenFailure("diagonalize: vanishing eigenvalue at node " + std::to_string(j + 1));
        }
        std::vector<double> lam(n);
        for (int i = 0; i < n; ++i) lam[i] = ev(i).real();
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (std::abs(lam[a] - lam[b]) <= 1e-9 * scale)
                    throw EigenFailure("diagonalize: repeated eigenvalues at node " +
                                       std::to_string(j + 1));

        // order: positives first (descending magnitude), then negatives
        // (descending magnitude)
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const bool pa = lam[a] > 0.0, pb = lam[b] > 0.0;
            if (pa != pb) return pa;
            return std::abs(lam[a]) > std::abs(lam[b]);
        });

        Eigen::MatrixXd cols(n, n);
        for (int c = 0; c < n; ++c) {
            Eigen::VectorXcd vc = es.eigenvectors().col(order[c]);
            Eigen::VectorXd vr(n);
            for (int i = 0; i < n; ++i) vr(i) = vc(i).real();
            if (vr.norm() <= 1e-14) // purely imaginary representative; rotate
                for (int i = 0; i < n; ++i) vr(i) = vc(i).imag();
            cols.col(c) = vr;
        }

        int mp = 0;
        for (int c = 0; c < n; ++c)
            if (lam[order[c]] > 0.0) ++mp;
        if (j == 0) {
            out.m_pos = mp;
            for (int c = 0; c < n; ++c) sign_pattern[c] = lam[order[c]] > 0.0 ? 1 : -1;
        } else {
            for (int c = 0; c < n; ++c)
                if ((lam[order[c]] > 0.0 ? 1 : -1) != sign_pattern[c])
                    throw OrderingBreak("diagonalize: eigenvalue sign pattern changed at node " +
                                        std::to_string(j + 1));
        }

        // column alignment: first node unit max-entry positive, later nodes
        // least-squares scaled against the previous node's column
        for (int c = 0; c < n; ++c) {
            Eigen::VectorXd v = cols.col(c);
            if (j == 0) {
                int imax = 0;
                for (int i = 1; i < n; ++i)
                    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
                v /= v(imax);
            } else {
                const Eigen::VectorXd p = prev_cols.col(c);
                const double denom = v.squaredNorm();
                const double a = p.dot(v) / denom;
                if (std::abs(a) <= 1e-12)
                    throw OrderingBreak("diagonalize: eigenvector direction flipped at node " +
                                        std::to_string(j + 1));
                v *= a;
            }
            cols.col(c) = v;
        }
        prev_cols = cols;

        const Eigen::MatrixXd Ninv = cols; // columns are right eigenvectors
        const Eigen::MatrixXd N = cols.inverse();
        const Eigen::MatrixXd D = N * Fm * Ninv;
        for (int c = 0; c < n; ++c) out.lambda[static_cast<std::size_t>(c) * nx + j] = D(c, c);
        double offdiag = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b) offdiag = std::max(offdiag, std::abs(D(a, b)));
        const double lam_scale = D.diagonal().cwiseAbs().maxCoeff();
        if (offdiag > 1e-10 * lam_scale)
            throw EigenFailure("diagonalize: off-diagonal residual " + std::to_string(offdiag) +
                               " at node " + std::to_string(j + 1));
        out.max_offdiag_residual = std::max(out.max_offdiag_residual, offdiag);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                out.N[(static_cast<std::size_t>(j) * n + a) * n + b] = N(a, b);
                out.N_inv[(static_cast<std::size_t>(j) * n + a) * n + b] = Ninv(a, b);
            }
    }
    return out;
}

namespace {

// d/dx of the per-node matrix array (second-order node differences)
std::vector<double> matrix_ddx(const std::vector<double>& A, int n, int nx, double h) {
    std::vector<double> out(A.size());
    const std::size_t blk = static_cast<std::size_t>(n) * n;
    for (std::size_t e = 0; e < blk; ++e) {
        for (int j = 0; j < nx; ++j) {
            double d;
            if (j == 0)
                d = (-3.0 * A[e] + 4.0 * A[blk + e] - A[2 * blk + e]) / (2.0 * h);
            else if (j == nx - 1)
                d = (3.0 * A[static_cast<std::size_t>(j) * blk + e] -
                     4.0 * A[static_cast<std::size_t>(j - 1) * blk + e] +
                     A[static_cast<std::size_t>(j - 2) * blk + e]) /
                    (2.0 * h);
            else
                d = (A[static_cast<std::size_t>(j + 1) * blk + e] -
                     A[static_cast<std::size_t>(j - 1) * blk + e]) /
                    (2.0 * h);
            out[static_cast<std::size_t>(j) * blk + e] = d;
        }
    }
    return out;
}

} // namespace

std::vector<double> linearized_source(const PhysicalSystem& phys, const Diagonalization& diag) {
    const int n = phys.n, nx = phys.nx;
    const double h = phys.dx();
    const double tol = tol_steady(phys);
    const std::vector<double> dNinv = matrix_ddx(diag.N_inv, n, nx, h);

    // ystar_x by second-order node differences
    std::vector<double> ysx(static_cast<std::size_t>(n) * nx);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < nx; ++j) {
            double d;
            if (j == 0)
                d = (-3.0 * phys.y_at(i, 0) + 4.0 * phys.y_at(i, 1) - phys.y_at(i, 2)) / (2.0 * h);
            else if (j == nx - 1)
                d = (3.0 * phys.y_at(i, nx - 1) - 4.0 * phys.y_at(i, nx - 2) +
                     phys.y_at(i, nx - 3)) /
                    (2.0 * h);
            else
                d = (phys.y_at(i, j + 1) - phys.y_at(i, j - 1)) / (2.0 * h);
            ysx[static_cast<std::size_t>(i) * nx + j] = d;
        }

    double ymax = 0.0;
    for (double v : phys.ystar) ymax = std::max(ymax, std::abs(v));
    const double step = 1e-6 * (1.0 + ymax);

    // B(u, x_j) = N (F(Y)(Y*_x + (N^{-1})' u) + D(Y)), Y = N^{-1} u + Y*
    auto B_eval = [&](const std::vector<double>& u, int j) {
        std::vector<double> y(n), w(n);
        for (int i = 0; i < n; ++i) {
            double yi = phys.y_at(i, j);
            double wi = ysx[static_cast<std::size_t>(i) * nx + j];
            for (int k = 0; k < n; ++k) {
                yi += diag.ninv_at(i, k, j) * u[k];
                wi += dNinv[(static_cast<std::size_t>(j) * n + i) * n + k] * u[k];
            }
            y[i] = yi;
            w[i] = wi;
        }
        const std::vector<double> Fm = phys.F(y);
        const std::vector<double> Dv = phys.D(y);
        std::vector<double> inner(n), out(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double s = Dv[i];
            for (int k = 0; k < n; ++k) s += Fm[static_cast<std::size_t>(i) * n + k] * w[k];
            inner[i] = s;
        }
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) out[i] += diag.n_at(i, k, j) * inner[k];
        return out;
    };

    std::vector<double> M(static_cast<std::size_t>(n) * n * nx, 0.0);
    std::vector<double> zero(n, 0.0);
    for (int j = 0; j < nx; ++j) {
        const std::vector<double> B0 = B_eval(zero, j);
        for (double v : B0)
            if (std::abs(v) > tol)
                throw SteadyStateViolation("linearized_source: B(0,x) residual " +
                                           std::to_string(std::abs(v)) + " at node " +
                                           std::to_string(j + 1) + " exceeds " + std::to_string(tol));
        for (int k = 0; k < n; ++k) {
            std::vector<double> up(n, 0.0), um(n, 0.0);
            up[k] = step;
            um[k] = -step;
            const std::vector<double> Bp = B_eval(up, j);
            const std::vector<double> Bm = B_eval(um, j);
            for (int i = 0; i < n; ++i)
                M[(static_cast<std::size_t>(i) * n + k) * nx + j] = (Bp[i] - Bm[i]) / (2.0 * step);
        }
    }
    return M;
}

SystemSpec to_system_spec(const PhysicalSystem& phys, const Diagonalization& diag,
                          const std::vector<double>& source, const std::vector<double>& K) {
    SystemSpec s;
    s.n = phys.n;
    s.m_pos = diag.m_pos;
    s.nx = phys.nx;
    s.L = phys.L;
    s.lambda = diag.lambda;
    s.source = source;
    s.K = K;
    validate(s);
    return s;
}

} // namespace hyplyap
