#include "hyplyap/simulator.hpp"

#include <cmath>
#include <string>

namespace hyplyap {

GridFunction derived_ut(const SystemSpec& spec, const GridFunction& u) {
    require_shape(spec, u, "u");
    const int n = spec.n, nx = spec.nx;
    const double h = spec.dx();
    GridFunction ut(n, nx, spec.L);
    for (int i = 0; i < n; ++i) {
        const double* ui = &u.v[static_cast<std::size_t>(i) * nx];
        double* outi = &ut.v[static_cast<std::size_t>(i) * nx];
        for (int j = 0; j < nx; ++j) {
            double ux;
            if (j == 0)
                ux = (-3.0 * ui[0] + 4.0 * ui[1] - ui[2]) / (2.0 * h);
            else if (j == nx - 1)
                ux = (3.0 * ui[nx - 1] - 4.0 * ui[nx - 2] + ui[nx - 3]) / (2.0 * h);
            else
                ux = (ui[j + 1] - ui[j - 1]) / (2.0 * h);
            outi[j] = -spec.lam(i, j) * ux;
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < nx; ++j) {
            double mu_sum = 0.0;
            for (int k = 0; k < n; ++k) mu_sum += spec.M(i, k, j) * u.at(k, j);
            ut.at(i, j) -= mu_sum;
        }
    return ut;
}

double cfl_dt(const SystemSpec& spec, double cfl) {
    return cfl * spec.dx() / spec.max_abs_lambda();
}

TrajectoryState step(const SystemSpec& spec, const TrajectoryState& state, const BoundaryMap& g) {
    const int n = spec.n, nx = spec.nx;
    const double h = spec.dx();
    const double bound = state.cfl * h / spec.max_abs_lambda();
    if (state.dt > bound * (1.0 + 1e-12))
        throw CflViolation("dt " + std::to_string(state.dt) + " exceeds CFL bound " +
                           std::to_string(bound));

    TrajectoryState next = state;
    next.t = state.t + state.dt;
    const GridFunction& u = state.u;
    GridFunction& un = next.u;
    const double dt = state.dt;

    for (int i = 0; i < n; ++i) {
        const double* ui = &u.v[static_cast<std::size_t>(i) * nx];
        double* uo = &un.v[static_cast<std::size_t>(i) * nx];
        const double* lam = &spec.lambda[static_cast<std::size_t>(i) * nx];
        if (i < spec.m_pos) {
            for (int j = 1; j < nx; ++j) uo[j] = ui[j] - dt * lam[j] * (ui[j] - ui[j - 1]) / h;
        } else {
            for (int j = 0; j < nx - 1; ++j) uo[j] = ui[j] - dt * lam[j] * (ui[j + 1] - ui[j]) / h;
        }
    }
    // source update (separate pass keeps the upwind loop tight)
    for (int i = 0; i < n; ++i) {
        const int j0 = i < spec.m_pos ? 1 : 0;
        const int j1 = i < spec.m_pos ? nx : nx - 1;
        for (int j = j0; j < j1; ++j) {
            double mu_sum = 0.0;
            for (int k = 0; k < n; ++k) mu_sum += spec.M(i, k, j) * u.at(k, j);
            un.at(i, j) -= dt * mu_sum;
        }
    }
    // inflow from the fresh outgoing traces
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = un.at(i, i < spec.m_pos ? nx - 1 : 0);
    const std::vector<double> in = g(out);
    for (int i = 0; i < n; ++i) un.at(i, i < spec.m_pos ? 0 : nx - 1) = in[i];

    for (double w : un.v)
        if (!std::isfinite(w)) throw NonFinite("simulator state overflowed at t = " + std::to_string(next.t));
    return next;
}

RunResult run(const SystemSpec& spec, const GridFunction& u0, const RunOptions& opt) {
    require_shape(spec, u0, "u0");
    if (!(opt.cfl > 0.0) || opt.cfl > 1.0) throw DomainError("run: cfl must lie in (0, 1]");
    if (opt.t_end < 0.0) throw DomainError("run: t_end must be nonnegative");
    const BoundaryMap g = opt.boundary ? opt.boundary : linear_boundary_map(spec);

    RunResult res;
    const CompatResult c0 = check_compat_order0(spec, u0, g);
    res.compat0_ok = c0.ok;
    res.compat0_residual = c0.residual;
    if (!c0.ok)
        throw ValidationError("run: initial data violates order-0 compatibility (residual " +
                              std::to_string(c0.residual) + ")");
    const CompatResult c1 = check_compat_order1(spec, u0);
    res.compat1_ok = c1.ok;
    res.compat1_residual = c1.residual;

    TrajectoryState st;
    st.t = 0.0;
    st.u = u0;
    st.cfl = opt.cfl;
    st.dt = cfl_dt(spec, opt.cfl);
    res.snapshots.push_back(st);
    if (opt.t_end == 0.0) return res;

    double next_emit = opt.cadence > 0.0 ? opt.cadence : opt.t_end;
    const double teps = 1e-12 * std::max(1.0, opt.t_end);
    while (st.t < opt.t_end - teps) {
        TrajectoryState stepped = st;
        stepped.dt = std::min(st.dt, opt.t_end - st.t);
        st = step(spec, stepped, g);
        while (st.t >= next_emit - teps && next_emit <= opt.t_end + teps) {
            res.snapshots.push_back(st);
            next_emit += opt.cadence > 0.0 ? opt.cadence : opt.t_end;
            if (opt.cadence <= 0.0) break;
        }
    }
    if (res.snapshots.back().t < opt.t_end - teps) res.snapshots.push_back(st);
    return res;
}

} // namespace hyplyap
