#include "hyplyap/spec_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hyplyap {

using json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where + ": expected a number");
    return v.get<double>();
}

// Reads either an n x nx array or the constant shorthand [c_1..c_n].
std::vector<double> read_field_2d(const json& v, int n, int nx, const std::string& name) {
    if (!v.is_array() || static_cast<int>(v.size()) != n)
        throw ParseError(name + ": expected an array of length n=" + std::to_string(n));
    std::vector<double> out(static_cast<std::size_t>(n) * nx);
    for (int i = 0; i < n; ++i) {
        const json& row = v[i];
        if (row.is_number()) { // constant shorthand
            for (int j = 0; j < nx; ++j) out[static_cast<std::size_t>(i) * nx + j] = row.get<double>();
        } else if (row.is_array()) {
            if (static_cast<int>(row.size()) != nx)
                throw ParseError(name + "[" + std::to_string(i + 1) + "]: expected nx=" +
                                 std::to_string(nx) + " values, got " + std::to_string(row.size()));
            for (int j = 0; j < nx; ++j)
                out[static_cast<std::size_t>(i) * nx + j] =
                    as_number(row[j], name + "[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
        } else {
            throw ParseError(name + "[" + std::to_string(i + 1) + "]: expected number or array");
        }
    }
    return out;
}

} // namespace

BoundaryMap linear_boundary_map(const SystemSpec& spec) {
    const int n = spec.n;
    std::vector<double> K = spec.K;
    return [n, K](const std::vector<double>& v) {
        std::vector<double> out(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) out[i] += K[static_cast<std::size_t>(i) * n + k] * v[k];
        return out;
    };
}

SystemSpec parse_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed spec file: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("spec file: expected a JSON object");
    for (const char* key : {"n", "m_pos", "L", "nx", "lambda", "source", "K"})
        if (!doc.contains(key)) throw ParseError(std::string("spec file: missing key '") + key + "'");

    SystemSpec s;
    s.n = doc["n"].get<int>();
    s.m_pos = doc["m_pos"].get<int>();
    s.L = as_number(doc["L"], "L");
    s.nx = doc["nx"].get<int>();
    if (s.n <= 0) throw ParseError("n: must be positive");
    if (s.nx < 3) throw ValidationError("nx must be >= 3, got " + std::to_string(s.nx));

    s.lambda = read_field_2d(doc["lambda"], s.n, s.nx, "lambda");

    const json& src = doc["source"];
    if (!src.is_array() || static_cast<int>(src.size()) != s.n)
        throw ParseError("source: expected an array of length n");
    s.source.assign(static_cast<std::size_t>(s.n) * s.n * s.nx, 0.0);
    for (int i = 0; i < s.n; ++i) {
        const json& row = src[i];
        if (!row.is_array() || static_cast<int>(row.size()) != s.n)
            throw ParseError("source[" + std::to_string(i + 1) + "]: expected an array of length n");
        for (int k = 0; k < s.n; ++k) {
            const json& cell = row[k];
            double* dst = &s.source[(static_cast<std::size_t>(i) * s.n + k) * s.nx];
            if (cell.is_number()) {
                for (int j = 0; j < s.nx; ++j) dst[j] = cell.get<double>();
            } else if (cell.is_array()) {
                if (static_cast<int>(cell.size()) != s.nx)
                    throw ParseError("source[" + std::to_string(i + 1) + "][" + std::to_string(k + 1) +
                                     "]: expected nx values");
                for (int j = 0; j < s.nx; ++j)
                    dst[j] = as_number(cell[j], "source[" + std::to_string(i + 1) + "][" +
                                                    std::to_string(k + 1) + "][" + std::to_string(j + 1) + "]");
            } else {
                throw ParseError("source[" + std::to_string(i + 1) + "][" + std::to_string(k + 1) +
                                 "]: expected number or array");
            }
        }
    }

    const json& kk = doc["K"];
    if (!kk.is_array() || static_cast<int>(kk.size()) != s.n)
        throw ParseError("K: expected an n x n array");
    s.K.assign(static_cast<std::size_t>(s.n) * s.n, 0.0);
    for (int i = 0; i < s.n; ++i) {
        const json& row = kk[i];
        if (!row.is_array() || static_cast<int>(row.size()) != s.n)
            throw ParseError("K[" + std::to_string(i + 1) + "]: expected n values");
        for (int k = 0; k < s.n; ++k)
            s.K[static_cast<std::size_t>(i) * s.n + k] =
                as_number(row[k], "K[" + std::to_string(i + 1) + "][" + std::to_string(k + 1) + "]");
    }

    if (doc.contains("mu")) s.mu = as_number(doc["mu"], "mu");

    validate(s);
    return s;
}

SystemSpec load_spec(const std::string& path) { return parse_spec(read_file(path)); }

std::string canonical_spec_json(const SystemSpec& spec) {
    json doc;
    doc["n"] = spec.n;
    doc["m_pos"] = spec.m_pos;
    doc["L"] = spec.L;
    doc["nx"] = spec.nx;
    json lam = json::array();
    for (int i = 0; i < spec.n; ++i) {
        json row = json::array();
        for (int j = 0; j < spec.nx; ++j) row.push_back(spec.lam(i, j));
        lam.push_back(std::move(row));
    }
    doc["lambda"] = std::move(lam);
    json src = json::array();
    for (int i = 0; i < spec.n; ++i) {
        json row = json::array();
        for (int k = 0; k < spec.n; ++k) {
            json cell = json::array();
            for (int j = 0; j < spec.nx; ++j) cell.push_back(spec.M(i, k, j));
            row.push_back(std::move(cell));
        }
        src.push_back(std::move(row));
    }
    doc["source"] = std::move(src);
    json kk = json::array();
    for (int i = 0; i < spec.n; ++i) {
        json row = json::array();
        for (int k = 0; k < spec.n; ++k) row.push_back(spec.Kat(i, k));
        kk.push_back(std::move(row));
    }
    doc["K"] = std::move(kk);
    doc["mu"] = spec.mu;
    return doc.dump(2) + "\n";
}

void save_spec(const SystemSpec& spec, const std::string& path) {
    validate(spec);
    write_file(path, canonical_spec_json(spec));
}

GridFunction load_grid_function(const SystemSpec& spec, const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed grid-function file: ") + e.what());
    }
    const json& u = doc.is_object() && doc.contains("u") ? doc["u"] : doc;
    GridFunction g(spec.n, spec.nx, spec.L);
    g.v = read_field_2d(u, spec.n, spec.nx, "u");
    require_shape(spec, g, "u0");
    return g;
}

void save_grid_function(const GridFunction& u, const std::string& path) {
    json doc;
    json arr = json::array();
    for (int i = 0; i < u.n; ++i) {
        json row = json::array();
        for (int j = 0; j < u.nx; ++j) row.push_back(u.at(i, j));
        arr.push_back(std::move(row));
    }
    doc["u"] = std::move(arr);
    write_file(path, doc.dump(2) + "\n");
}

double tol_compat(const GridFunction& u0) { return 1e-8 * (1.0 + u0.max_abs()); }

namespace {

// Incoming traces (u_+(0), u_-(L)) and outgoing traces (u_+(L), u_-(0))
// stacked in component order.
std::vector<double> incoming(const SystemSpec& spec, const GridFunction& u) {
    std::vector<double> out(spec.n);
    for (int i = 0; i < spec.n; ++i) out[i] = u.at(i, i < spec.m_pos ? 0 : spec.nx - 1);
    return out;
}
std::vector<double> outgoing(const SystemSpec& spec, const GridFunction& u) {
    std::vector<double> out(spec.n);
    for (int i = 0; i < spec.n; ++i) out[i] = u.at(i, i < spec.m_pos ? spec.nx - 1 : 0);
    return out;
}

} // namespace

CompatResult check_compat_order0(const SystemSpec& spec, const GridFunction& u0,
                                 const BoundaryMap& g) {
    require_shape(spec, u0, "u0");
    const std::vector<double> in = incoming(spec, u0);
    const std::vector<double> gv = g(outgoing(spec, u0));
    if (static_cast<int>(gv.size()) != spec.n)
        throw ValidationError("boundary map returned wrong dimension");
    double res = 0.0;
    for (int i = 0; i < spec.n; ++i) res = std::max(res, std::abs(in[i] - gv[i]));
    CompatResult r;
    r.residual = res;
    r.tol = tol_compat(u0);
    r.ok = res <= r.tol;
    return r;
}

std::vector<double> boundary_flux_trace(const SystemSpec& spec, const GridFunction& u0,
                                        bool at_right) {
    const double h = spec.dx();
    const int last = spec.nx - 1;
    std::vector<double> w(spec.n, 0.0);
    for (int i = 0; i < spec.n; ++i) {
        double ux;
        if (at_right)
            ux = (3.0 * u0.at(i, last) - 4.0 * u0.at(i, last - 1) + u0.at(i, last - 2)) / (2.0 * h);
        else
            ux = (-3.0 * u0.at(i, 0) + 4.0 * u0.at(i, 1) - u0.at(i, 2)) / (2.0 * h);
        const int j = at_right ? last : 0;
        double mu_sum = 0.0;
        for (int k = 0; k < spec.n; ++k) mu_sum += spec.M(i, k, j) * u0.at(k, j);
        w[i] = spec.lam(i, j) * ux + mu_sum;
    }
    return w;
}

CompatResult check_compat_order1(const SystemSpec& spec, const GridFunction& u0) {
    require_shape(spec, u0, "u0");
    const std::vector<double> w0 = boundary_flux_trace(spec, u0, false);
    const std::vector<double> wL = boundary_flux_trace(spec, u0, true);
    // lhs_i: incoming-side trace of w; rhs = K applied to outgoing-side traces
    std::vector<double> lhs(spec.n), out(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        lhs[i] = i < spec.m_pos ? w0[i] : wL[i];
        out[i] = i < spec.m_pos ? wL[i] : w0[i];
    }
    double res = 0.0;
    for (int i = 0; i < spec.n; ++i) {
        double rhs = 0.0;
        for (int k = 0; k < spec.n; ++k) rhs += spec.Kat(i, k) * out[k];
        res = std::max(res, std::abs(lhs[i] - rhs));
    }
    CompatResult r;
    r.residual = res;
    r.tol = tol_compat(u0);
    r.ok = res <= r.tol;
    return r;
}

} // namespace hyplyap
