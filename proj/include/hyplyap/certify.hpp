#pragma once

#include <optional>
#include <string>

#include "hyplyap/boundary.hpp"
#include "hyplyap/interior.hpp"
#include "hyplyap/lyapunov.hpp"
#include "hyplyap/types.hpp"

namespace hyplyap {

enum class Verdict { Certified, InteriorFailed, BoundaryFailed, Inconclusive };

const char* to_string(Verdict v);

struct SimSummary {
    double gamma_fit = 0.0;
    double r_squared = 0.0;
    double window_a = 0.0;
    double window_b = 0.0;
    bool decrease_ok = false;
    double worst_growth = 0.0;
};

struct Certificate {
    InteriorCertificate interior;
    BoundaryCertificate boundary;
    std::optional<SimSummary> simulated;
    Verdict verdict = Verdict::Inconclusive;
    std::string toolkit_version;
    std::string input_digest; // FNV-1a 64 of the spec file bytes, hex
};

struct CertifyOptions {
    int interior_budget = 64;
    int boundary_budget = 500;
    std::uint64_t seed = 0;
    double sigma = -1.0; // <0: sigma_default(spec)
    bool simulate = false;
    double sim_t_end = 8.0;
    double sim_cfl = 0.9;
};

/// FNV-1a 64-bit content hash, lowercase hex.
std::string fnv1a_hex(const std::string& bytes);

/// Theorem-3.1 pipeline: interior search, then the boundary check on the
/// sigma-perturbed profile; on boundary failure the interior search is
/// retried with an endpoint-ratio reward (up to 3 rounds). With simulate,
/// runs seeded random initial data and attaches the fitted decay summary.
Certificate certify(const SystemSpec& spec, const CertifyOptions& opt,
                    const std::string& input_digest = "");

/// Exit codes: 0 certified, 3 not certified, 2 invalid input, 4 numerical.
int exit_code(const Certificate& cert);

void report_write(const Certificate& cert, const std::string& path);
Certificate report_read(const std::string& path);

struct VerifyResult {
    bool digest_ok = false;
    bool interior_ok = false; // recomputed strict margins match the stored ones
    bool boundary_ok = false; // theta(K, delta) matches and the verdict recomputes
    bool ok() const { return digest_ok && interior_ok && boundary_ok; }
};

/// Independent recomputation of both sub-certificates from the spec +
/// report pair (used by certify before returning exit code 0).
VerifyResult report_verify(const SystemSpec& spec, const std::string& spec_bytes,
                           const Certificate& cert);

/// Interior + boundary certificate JSON used by the check-interior /
/// check-boundary subcommands.
void interior_write(const InteriorCertificate& cert, const std::string& path);
InteriorCertificate interior_read(const SystemSpec& spec, const std::string& path);
void boundary_write(const BoundaryCertificate& cert, const std::string& path);

/// The sigma-perturbed profile regenerated from a stored certificate
/// (f(0) and sigma), as handed to check_boundary by certify.
WeightProfile perturbed_profile(const SystemSpec& spec, const InteriorCertificate& cert);

} // namespace hyplyap
