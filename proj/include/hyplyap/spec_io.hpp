#pragma once

#include <functional>
#include <string>

#include "hyplyap/types.hpp"

namespace hyplyap {

/// Evaluates the boundary map G at an outgoing-trace vector. For linear
/// runs G(v) = K v.
using BoundaryMap = std::function<std::vector<double>(const std::vector<double>&)>;

BoundaryMap linear_boundary_map(const SystemSpec& spec);

/// Parse and validate a system spec file (JSON; constant-in-x shorthands
/// expanded to per-node arrays). Throws ParseError / ValidationError.
SystemSpec load_spec(const std::string& path);
SystemSpec parse_spec(const std::string& json_text);

/// Canonical serialization: full arrays, fixed key order. load/save is the
/// identity on valid specs (byte-compare of the canonical form).
std::string canonical_spec_json(const SystemSpec& spec);
void save_spec(const SystemSpec& spec, const std::string& path);

GridFunction load_grid_function(const SystemSpec& spec, const std::string& path);
void save_grid_function(const GridFunction& u, const std::string& path);

struct CompatResult {
    bool ok = false;
    double residual = 0.0;
    double tol = 0.0;
};

/// Default compatibility tolerance: 1e-8 * (1 + max|u0|); exact-zero traces
/// must pass despite rounding.
double tol_compat(const GridFunction& u0);

/// Order-0 condition: (u+^0(0), u-^0(L)) = G(u+^0(L), u-^0(0)).
/// Residual is the max-norm of the defect.
CompatResult check_compat_order0(const SystemSpec& spec, const GridFunction& u0,
                                 const BoundaryMap& g);

/// Order-1 condition with A = Lambda(x), B = M(x)u, G' = K. Boundary
/// derivatives use one-sided second-order stencils.
CompatResult check_compat_order1(const SystemSpec& spec, const GridFunction& u0);

/// Trace vector w = Lambda u_x + M u at a boundary node (one-sided 2nd order).
std::vector<double> boundary_flux_trace(const SystemSpec& spec, const GridFunction& u0,
                                        bool at_right);

} // namespace hyplyap
