#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "hyplyap/certify.hpp"
#include "hyplyap/spec_io.hpp"

using namespace hyplyap;
using hyplyap::testing::const_spec;
using hyplyap::testing::two_by_two;

namespace {

std::string tmp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("certify verdicts") {
    SUBCASE("source-free with rho = 0.5 certifies; simulate attaches gamma > 0") {
        const SystemSpec s = two_by_two(1.0, 301, {0, 0, 0, 0}, {0, 0.5, 0.5, 0});
        CertifyOptions opt;
        opt.interior_budget = 8;
        opt.simulate = true;
        opt.sim_t_end = 6.0;
        const Certificate cert = certify(s, opt);
        CHECK(cert.verdict == Verdict::Certified);
        REQUIRE(cert.simulated.has_value());
        CHECK(cert.simulated->gamma_fit > 0.0);
        CHECK(cert.simulated->decrease_ok);
        CHECK(exit_code(cert) == 0);
    }
    SUBCASE("source-free with rho = 1.2 fails at the boundary") {
        const SystemSpec s = two_by_two(1.0, 101, {0, 0, 0, 0}, {0, 1.2, 1.2, 0});
        CertifyOptions opt;
        opt.interior_budget = 8;
        const Certificate cert = certify(s, opt);
        CHECK(cert.verdict == Verdict::BoundaryFailed);
        CHECK(exit_code(cert) == 3);
    }
    SUBCASE("slow strongly coupled system fails the interior search") {
        const SystemSpec s =
            const_spec(2, 1, 1.0, 41, {1e-3, -1e-3}, {0, 5, 5, 0}, {0, 0, 0, 0});
        CertifyOptions opt;
        opt.interior_budget = 32;
        const Certificate cert = certify(s, opt);
        CHECK(cert.verdict == Verdict::InteriorFailed);
        // best-effort diagnostics survive
        CHECK(cert.interior.min_f > 0.0);
    }
    SUBCASE("deterministic for fixed seed") {
        const SystemSpec s = two_by_two(1.0, 101, {0, 0.4, 0.2, 0}, {0, 0.3, 0.3, 0});
        CertifyOptions opt;
        opt.interior_budget = 12;
        opt.seed = 42;
        const Certificate a = certify(s, opt);
        const Certificate b = certify(s, opt);
        CHECK(a.verdict == b.verdict);
        CHECK(a.interior.profile.f == b.interior.profile.f);
        CHECK(a.boundary.theta == b.boundary.theta);
    }
}

TEST_CASE("report round trip and verification") {
    const SystemSpec s = two_by_two(1.0, 101, {0, 0, 0, 0}, {0, 0.5, 0.5, 0});
    const std::string spec_path = tmp_path("hyplyap_cert_spec.json");
    save_spec(s, spec_path);
    std::string bytes;
    {
        std::ifstream in(spec_path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        bytes = buf.str();
    }
    CertifyOptions opt;
    opt.interior_budget = 8;
    const Certificate cert = certify(s, opt, fnv1a_hex(bytes));
    REQUIRE(cert.verdict == Verdict::Certified);

    const std::string rep_path = tmp_path("hyplyap_cert_report.json");
    report_write(cert, rep_path);
    const Certificate back = report_read(rep_path);
    CHECK(back.verdict == cert.verdict);
    CHECK(back.input_digest == cert.input_digest);
    CHECK(back.interior.profile.f == cert.interior.profile.f);
    CHECK(back.boundary.theta == doctest::Approx(cert.boundary.theta).epsilon(1e-15));
    CHECK(back.toolkit_version == cert.toolkit_version);

    SUBCASE("verify passes on the genuine pair") {
        const VerifyResult vr = report_verify(s, bytes, back);
        CHECK(vr.digest_ok);
        CHECK(vr.interior_ok);
        CHECK(vr.boundary_ok);
    }
    SUBCASE("digest mismatch is flagged after editing the spec") {
        const VerifyResult vr = report_verify(s, bytes + " ", back);
        CHECK_FALSE(vr.digest_ok);
    }
    SUBCASE("tampered theta is flagged") {
        Certificate tampered = back;
        tampered.boundary.theta *= 1.5;
        const VerifyResult vr = report_verify(s, bytes, tampered);
        CHECK_FALSE(vr.boundary_ok);
    }
    std::filesystem::remove(spec_path);
    std::filesystem::remove(rep_path);
}

TEST_CASE("digest is stable and content sensitive") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") != fnv1a_hex("b"));
}
