#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyplyap/certify.hpp"
#include "hyplyap/counterexample.hpp"
#include "hyplyap/lemma.hpp"
#include "hyplyap/lyapunov.hpp"
#include "hyplyap/simulator.hpp"
#include "hyplyap/spec_io.hpp"
#include "hyplyap/version.hpp"

using namespace hyplyap;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<double> load_matrix(const std::string& path, int& n) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(slurp(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed matrix file: ") + e.what());
    }
    const nlohmann::json& m = doc.is_object() && doc.contains("K") ? doc["K"] : doc;
    n = static_cast<int>(m.size());
    std::vector<double> K(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(m[i].size()) != n) throw ParseError("matrix file: expected n x n");
        for (int j = 0; j < n; ++j) K[static_cast<std::size_t>(i) * n + j] = m[i][j].get<double>();
    }
    return K;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lyapunov certification and simulation toolkit for 1-D hyperbolic balance laws"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    bool verbose = false;
    app.add_option("--seed", seed, "seed for all randomized searches")->capture_default_str();
    app.add_flag("--verbose", verbose, "chatty diagnostics");

    // check-interior
    auto* ci = app.add_subcommand("check-interior", "search interior-condition weights");
    std::string ci_spec, ci_out;
    int ci_budget = 64;
    double ci_sigma = -1.0;
    ci->add_option("spec", ci_spec, "system spec JSON")->required();
    ci->add_option("--budget", ci_budget, "multistart budget")->capture_default_str();
    ci->add_option("--sigma", ci_sigma, "strictification (default 1e-3 max|M|)");
    ci->add_option("--out", ci_out, "certificate output path");

    // check-boundary
    auto* cb = app.add_subcommand("check-boundary", "boundary condition for given weights");
    std::string cb_spec, cb_weights, cb_out;
    int cb_budget = 500;
    cb->add_option("spec", cb_spec, "system spec JSON")->required();
    cb->add_option("--weights", cb_weights, "interior certificate JSON")->required();
    cb->add_option("--budget", cb_budget, "subgradient iterations")->capture_default_str();
    cb->add_option("--out", cb_out, "certificate output path");

    // rho
    auto* rh = app.add_subcommand("rho", "rho_inf of a boundary matrix");
    std::string rh_file;
    rh->add_option("K", rh_file, "JSON n x n matrix (or object with key K)")->required();

    // lemma
    auto* lm = app.add_subcommand("lemma", "brute-force the positivity form");
    std::string lm_file;
    int lm_p = 8, lm_res = 201;
    lm->add_option("inst", lm_file, "JSON instance with keys a, b")->required();
    lm->add_option("--p", lm_p, "exponent p")->capture_default_str();
    lm->add_option("--resolution", lm_res, "grid per free coordinate")->capture_default_str();

    // simulate
    auto* sm = app.add_subcommand("simulate", "evolve the system and record functionals");
    std::string sm_spec, sm_u0, sm_series, sm_weights;
    double sm_tend = 1.0, sm_cfl = 0.9, sm_cadence = 0.1;
    int sm_p = 64;
    sm->add_option("spec", sm_spec, "system spec JSON")->required();
    sm->add_option("--u0", sm_u0, "initial data JSON (key u)")->required();
    sm->add_option("--t-end", sm_tend, "final time")->capture_default_str();
    sm->add_option("--cfl", sm_cfl, "CFL number in (0,1]")->capture_default_str();
    sm->add_option("--cadence", sm_cadence, "snapshot spacing")->capture_default_str();
    sm->add_option("--series", sm_series, "CSV output path")->required();
    sm->add_option("--weights", sm_weights, "interior certificate (default f = 1)");
    sm->add_option("--p", sm_p, "exponent for W1p/W2p")->capture_default_str();

    // counterexample
    auto* cx = app.add_subcommand("counterexample", "necessity construction at a violation point");
    std::string cx_spec, cx_weights, cx_report;
    double cx_x0 = 0.5;
    int cx_m = 200, cx_k = 10;
    double cx_u10 = 1e-3;
    cx->add_option("spec", cx_spec, "system spec JSON")->required();
    cx->add_option("--weights", cx_weights, "interior certificate (default f = 1)");
    cx->add_option("--x0", cx_x0, "violation point")->capture_default_str();
    cx->add_option("--m", cx_m, "bump sharpness")->capture_default_str();
    cx->add_option("--k", cx_k, "amplitude factor 1-1/k")->capture_default_str();
    cx->add_option("--u1-0", cx_u10, "amplitude of the violated row")->capture_default_str();
    cx->add_option("--report", cx_report, "report output path");

    // certify
    auto* cf = app.add_subcommand("certify", "combined interior + boundary pipeline");
    std::string cf_spec, cf_out;
    int cf_budget = 64, cf_bbudget = 500;
    double cf_sigma = -1.0;
    bool cf_sim = false;
    cf->add_option("spec", cf_spec, "system spec JSON")->required();
    cf->add_option("--budget", cf_budget, "interior multistart budget")->capture_default_str();
    cf->add_option("--boundary-budget", cf_bbudget, "boundary iterations")->capture_default_str();
    cf->add_option("--sigma", cf_sigma, "strictification (default 1e-3 max|M|)");
    cf->add_flag("--simulate", cf_sim, "attach a randomized-data decay run");
    cf->add_option("--out", cf_out, "certificate output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ci) {
            const SystemSpec spec = load_spec(ci_spec);
            InteriorSearchOptions opt;
            opt.budget = ci_budget;
            opt.seed = seed;
            opt.sigma = ci_sigma;
            const InteriorCertificate cert = search_feasible(spec, opt);
            std::printf("interior: %s  min_f=%.6g  min_margin=%.6g  sigma=%.6g\n",
                        cert.feasible ? "feasible" : "no certificate found", cert.min_f,
                        cert.min_margin, cert.profile.sigma);
            if (!ci_out.empty()) interior_write(cert, ci_out);
            return cert.feasible ? 0 : 3;
        }
        if (*cb) {
            const SystemSpec spec = load_spec(cb_spec);
            const InteriorCertificate ic = interior_read(spec, cb_weights);
            BoundaryCheckOptions opt;
            opt.budget = cb_budget;
            opt.seed = seed;
            const BoundaryCertificate bc = check_boundary(spec, ic.profile, opt);
            std::printf("boundary: %s  theta=%.9g  ratio=%.9g  margin=%.3g\n",
                        bc.satisfied ? "satisfied" : "unsatisfied", bc.theta, bc.ratio, bc.margin);
            if (!cb_out.empty()) boundary_write(bc, cb_out);
            return bc.satisfied ? 0 : 3;
        }
        if (*rh) {
            int n = 0;
            const std::vector<double> K = load_matrix(rh_file, n);
            const RhoResult r = rho_inf(K, n);
            std::printf("rho_inf = %.9g  (power-iteration oracle %.9g)\ndelta =", r.rho, r.oracle);
            for (double d : r.delta) std::printf(" %.9g", d);
            std::printf("\n");
            return 0;
        }
        if (*lm) {
            const LemmaInstance inst = load_lemma_instance(lm_file);
            const PointwiseVerdict iii = check_iii(inst);
            const BruteForceResult r = brute_force_i(inst, lm_p, lm_res);
            std::printf("(iii) %s (min margin %.6g); brute-force min at p=%d: %.9g (%s)\n",
                        iii.holds ? "strict" : "not strict", iii.min_margin, lm_p, r.min_value,
                        r.min_value < 0.0
                            ? "exact negative certificate"
                            : "positive, conditional on the grid resolution");
            std::printf("argmin node %d, y =", r.argmin_node + 1);
            for (double y : r.argmin_y) std::printf(" %.4f", y);
            std::printf("\n");
            return 0;
        }
        if (*sm) {
            const SystemSpec spec = load_spec(sm_spec);
            const GridFunction u0 = load_grid_function(spec, sm_u0);
            RunOptions opt;
            opt.t_end = sm_tend;
            opt.cfl = sm_cfl;
            opt.cadence = sm_cadence;
            const RunResult rr = run(spec, u0, opt);
            if (verbose && !rr.compat1_ok)
                std::fprintf(stderr,
                             "warning: order-1 compatibility residual %.3g (first-order scheme "
                             "tolerates it)\n",
                             rr.compat1_residual);
            WeightProfile prof(spec.n, spec.nx, spec.L);
            if (!sm_weights.empty()) prof = interior_read(spec, sm_weights).profile;
            prof.mu = 0.0;
            const LyapunovSeries series = build_series(spec, prof, rr.snapshots, sm_p);
            write_series_csv(series, sm_series);
            std::printf("wrote %zu snapshots to %s\n", series.times.size(), sm_series.c_str());
            return 0;
        }
        if (*cx) {
            const SystemSpec spec = load_spec(cx_spec);
            WeightProfile prof(spec.n, spec.nx, spec.L);
            if (!cx_weights.empty()) prof = interior_read(spec, cx_weights).profile;
            const BumpSpec bump = make_bump(spec, cx_x0, cx_m, cx_k, cx_u10);
            const SlopeReport rep = dv_dt_at_zero(spec, prof, bump);
            const BumpSpec bump2 = make_bump(spec, cx_x0, 2 * cx_m, cx_k, cx_u10);
            const SlopeReport rep2 = dv_dt_at_zero(spec, prof, bump2);
            std::printf("dV/dt(0): slope=%.6g (m=%d), slope=%.6g (m=%d), verdict %s\n", rep.slope,
                        cx_m, rep2.slope, 2 * cx_m,
                        rep.positive && rep2.positive ? "positive" : "not established");
            if (!cx_report.empty()) {
                nlohmann::ordered_json j;
                j["n1"] = bump.n1;
                j["y1"] = bump.y1;
                j["x0"] = bump.x0;
                j["violation"] = rep.violation;
                j["m"] = {cx_m, 2 * cx_m};
                j["slope"] = {rep.slope, rep2.slope};
                j["slope_primary"] = {rep.slope_primary, rep2.slope_primary};
                j["noise"] = {rep.noise, rep2.noise};
                j["positive"] = rep.positive && rep2.positive;
                std::ofstream out(cx_report, std::ios::binary);
                if (!out) throw IoError("cannot open " + cx_report + " for writing");
                out << j.dump(2) << "\n";
            }
            return 0;
        }
        if (*cf) {
            const std::string bytes = slurp(cf_spec);
            const SystemSpec spec = parse_spec(bytes);
            CertifyOptions opt;
            opt.interior_budget = cf_budget;
            opt.boundary_budget = cf_bbudget;
            opt.seed = seed;
            opt.sigma = cf_sigma;
            opt.simulate = cf_sim;
            Certificate cert = certify(spec, opt, fnv1a_hex(bytes));
            std::printf("verdict: %s\n", to_string(cert.verdict));
            if (verbose)
                std::printf("  interior min_f=%.6g min_margin=%.6g | boundary theta=%.9g "
                            "ratio=%.9g\n",
                            cert.interior.min_f, cert.interior.min_margin, cert.boundary.theta,
                            cert.boundary.ratio);
            if (cert.simulated)
                std::printf("  gamma_fit=%.6g r2=%.4f decrease_ok=%d\n", cert.simulated->gamma_fit,
                            cert.simulated->r_squared, cert.simulated->decrease_ok ? 1 : 0);
            if (!cf_out.empty()) report_write(cert, cf_out);
            if (cert.verdict == Verdict::Certified) {
                const VerifyResult vr = report_verify(spec, bytes, cert);
                if (!vr.ok()) {
                    std::fprintf(stderr, "error: certificate failed independent recomputation\n");
                    return 4;
                }
            }
            return exit_code(cert);
        }
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    }
    return 0;
}
