#include <doctest.h>

#include <cmath>
#include <random>

#include "fran/fran_schemes.hpp"
#include "fran/ndt_formulas.hpp"
#include "fran/properties.hpp"

using namespace fran;
using schemes::SchemeId;

namespace {

schemes::Bits random_bits(std::mt19937_64& rng, std::size_t n)
{
    schemes::Bits b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1u);
    return b;
}

std::array<schemes::Bits, 2> random_payload(std::uint64_t seed, std::size_t n)
{
    std::mt19937_64 rng(seed);
    return {random_bits(rng, n), random_bits(rng, n)};
}

// Corner NDTs as listed for the envelope.
double corner_ndt(double mu, double rf, double rd)
{
    if (mu == 1.0) return 1.0;
    if (mu == 0.0) return rf > 0 ? 1 + 1 / rf : kInf;
    double best = 1.5;
    if (rf > 0) best = std::min(best, 1 + 1 / (2 * rf));
    if (rd > 0) best = std::min(best, 1 + 1 / (2 * rd));
    return best;
}

}  // namespace

TEST_CASE("scheme names and corners")
{
    CHECK(schemes::to_string(SchemeId::CacheZf) == "ZF");
    CHECK(schemes::to_string(SchemeId::IaNoD2d) == "IA");
    CHECK(schemes::mu_corner(SchemeId::CacheZf) == 1.0);
    CHECK(schemes::mu_corner(SchemeId::SoftTransfer) == 0.0);
    CHECK(schemes::mu_corner(SchemeId::D2dRealIa) == 0.5);
}

TEST_CASE("cache placement")
{
    const auto full = schemes::cache_placement(1.0, 2, 1000);
    CHECK(full.cached_bits(1) == 2000);
    CHECK(full.cached_bits(2) == 2000);

    const auto half = schemes::cache_placement(0.5, 2, 1000);
    CHECK(half.capacity_bits() == 1000);
    CHECK(half.cached_bits(1) == 1000);
    CHECK(half.cached_bits(2) == 1000);
    for (int f = 0; f < 2; ++f) {
        CHECK(half.holds(1, f, 0));
        CHECK(half.holds(1, f, 499));
        CHECK_FALSE(half.holds(1, f, 500));
        CHECK(half.holds(2, f, 500));
        CHECK(half.holds(2, f, 999));
        CHECK_FALSE(half.holds(2, f, 0));
    }
    // Each cached segment comes from a single file.
    for (const auto& segs : half.en)
        for (const auto& s : segs) CHECK(s.size() == 500);

    const auto none = schemes::cache_placement(0.0, 3, 1000);
    CHECK(none.cached_bits(1) == 0);
    CHECK(none.cached_bits(2) == 0);

    CHECK_THROWS_AS(schemes::cache_placement(0.25, 2, 1000), std::invalid_argument);
    CHECK_THROWS_AS(schemes::cache_placement(0.5, 2, 999), std::invalid_argument);
}

TEST_CASE("half-cache scheme choice")
{
    auto [id, v] = schemes::half_cache_scheme_ndt(0.0, 2.0);
    CHECK(id == SchemeId::D2dXChannel);
    CHECK(v.value() == doctest::Approx(1.25));
    std::tie(id, v) = schemes::half_cache_scheme_ndt(2.0, 0.0);
    CHECK(id == SchemeId::FronthaulMix);
    CHECK(v.value() == doctest::Approx(1.25));
    std::tie(id, v) = schemes::half_cache_scheme_ndt(0.5, 0.5);
    CHECK(id == SchemeId::IaNoD2d);
    CHECK(v.value() == doctest::Approx(1.5));
    // Ties go to the earlier option.
    std::tie(id, v) = schemes::half_cache_scheme_ndt(1.0, 1.0);
    CHECK(id == SchemeId::IaNoD2d);
    std::tie(id, v) = schemes::half_cache_scheme_ndt(2.0, 2.0);
    CHECK(id == SchemeId::FronthaulMix);
    CHECK(schemes::ia_no_d2d_ndt().value() == 1.5);
}

TEST_CASE("best achievable mixes")
{
    auto m = schemes::best_achievable(SystemParams::make(0.75, 0.0, 0.0));
    CHECK(m.ndt.value() == doctest::Approx(1.25));
    REQUIRE(m.parts.size() == 2);
    CHECK(schemes::mix_label(m) == "IA:0.5+ZF:0.5");

    m = schemes::best_achievable(SystemParams::make(0.25, 0.5, 0.5));
    CHECK(m.ndt.value() == doctest::Approx(2.25));

    m = schemes::best_achievable(SystemParams::make(1.0, 0.3, 2.0));
    CHECK(m.ndt.value() == 1.0);
    REQUIRE(m.parts.size() == 1);
    CHECK(m.parts[0].scheme == SchemeId::CacheZf);

    m = schemes::best_achievable(SystemParams::make(0.25, 0.0, 2.0));
    CHECK(m.ndt.is_infinite());
    CHECK(m.parts.empty());
    CHECK(schemes::mix_label(m) == "none");
}

TEST_CASE("mix is the lower convex envelope")
{
    for (const auto& p : props::standard_grid()) {
        const auto m = schemes::best_achievable(p);
        const double xs[3] = {0.0, 0.5, 1.0};
        // Never above a chord through two feasible corners.
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const double yi = corner_ndt(xs[i], p.r_f, p.r_d), yj = corner_ndt(xs[j], p.r_f, p.r_d);
                if (std::isinf(yi) || std::isinf(yj) || p.mu < xs[i] || p.mu > xs[j]) continue;
                const double chord = yi + (yj - yi) * (p.mu - xs[i]) / (xs[j] - xs[i]);
                CHECK(m.ndt.value() <= chord + 1e-9);
            }
        if (m.parts.empty()) {
            CHECK(m.ndt.is_infinite());
            continue;
        }
        double total = 0.0, mu = 0.0, value = 0.0;
        for (const auto& part : m.parts) {
            CHECK(part.fraction >= 0.0);
            CHECK(part.mu == schemes::mu_corner(part.scheme));
            total += part.fraction;
            mu += part.fraction * part.mu;
            value += part.fraction * corner_ndt(part.mu, p.r_f, p.r_d);
        }
        CHECK(total == doctest::Approx(1.0));
        CHECK(mu == doctest::Approx(p.mu));
        // The mix value is a convex combination of corners, so nothing cheaper exists.
        CHECK(m.ndt.value() == doctest::Approx(value));
        CHECK(m.ndt.near(ndt::minimum_ndt(p), 1e-9));

        if (p.r_d > std::max(1.0, p.r_f) && p.mu >= 0.5)
            for (const auto& part : m.parts) {
                CHECK(part.scheme != SchemeId::SoftTransfer);
                CHECK(part.scheme != SchemeId::FronthaulMix);
            }
    }
}

TEST_CASE("cooperative ZF")
{
    const double P = std::exp2(30);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto pl = random_payload(seed, 3000);
        const auto r = schemes::cache_zf_delivery(draw_csi(seed), pl, P, std::nullopt);
        CHECK(r.ndt.value() == 1.0);
        CHECK(r.latency.t_f == 0.0);
        CHECK(r.latency.t_d == 0.0);
        CHECK(r.max_leakage <= 1e-9);
        CHECK(r.max_tx_power <= P * (1 + 1e-12));
        CHECK(r.bit_errors == 0);
        CHECK(r.decoded == pl);
    }
}

TEST_CASE("ZF with noise decodes at the chosen margin")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto pl = random_payload(seed + 100, 4000);
        const auto r = schemes::cache_zf_delivery(draw_csi(seed), pl, std::exp2(30), seed);
        CHECK(r.bit_errors == 0);
        CHECK(r.sinr_db > 20.0);
    }
}

TEST_CASE("ZF NDT estimate falls toward 1")
{
    double prev = kInf;
    for (double lp : {20.0, 30.0, 40.0, 50.0}) {
        double sum = 0.0;
        for (std::uint64_t seed = 0; seed < 10; ++seed)
            sum += schemes::cache_zf_delivery(draw_csi(seed), random_payload(seed, 4000), std::exp2(lp), seed)
                       .ndt_estimate.value();
        const double mean = sum / 10;
        CHECK(mean < prev);
        CHECK(mean >= 1.0);
        prev = mean;
    }
    CHECK(prev < 1.5);
}

TEST_CASE("ZF infeasible at very low SNR")
{
    CHECK_THROWS_AS(schemes::cache_zf_delivery(draw_csi(0), random_payload(0, 10), 2.0, 0u), InfeasibleError);
    CHECK_THROWS_AS(schemes::cache_zf_delivery(draw_csi(0), random_payload(0, 10), 1.0, 0u), std::invalid_argument);
}

TEST_CASE("soft transfer accounting")
{
    const auto pl = random_payload(1, 2000);
    for (double rf : {0.25, 1.0, 4.0}) {
        const auto r = schemes::soft_transfer_delivery(draw_csi(2), pl, std::exp2(20), rf, std::nullopt);
        CHECK(r.ndt.value() == doctest::Approx(1 + 1 / rf));
        CHECK(r.latency.t_f == doctest::Approx(r.latency.t_e / rf));
        CHECK(r.max_tx_power <= std::exp2(20) * (1 + 1e-12));
        CHECK(r.quant_noise_power > 0.0);
        CHECK(r.bit_errors == 0);
    }
    CHECK(schemes::soft_transfer_delivery(draw_csi(2), pl, std::exp2(20), 1e9, std::nullopt).ndt.value() ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(schemes::soft_transfer_delivery(draw_csi(2), pl, std::exp2(20), 0.0, std::nullopt),
                    InfeasibleError);
}

TEST_CASE("soft transfer SINR grows about 6 dB per quadrupling of P")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto pl = random_payload(seed, 400000);
        const Csi h = draw_csi(seed);
        const auto lo = schemes::soft_transfer_delivery(h, pl, std::exp2(20), 1.0, seed);
        const auto hi = schemes::soft_transfer_delivery(h, pl, std::exp2(22), 1.0, seed);
        CHECK(lo.latency.t_e >= 1e4);
        CHECK(hi.sinr_db - lo.sinr_db == doctest::Approx(6.02).epsilon(1.0 / 6.02));
        CHECK(hi.quant_noise_power / lo.quant_noise_power == doctest::Approx(1.0).epsilon(0.2));
    }
}

TEST_CASE("end-to-end runs recover the demanded files")
{
    auto p = SystemParams::make(0.0, 1.0, 2.0);
    p.file_bits = 2000;
    p.power = std::exp2(24);
    for (SchemeId id : {SchemeId::CacheZf, SchemeId::SoftTransfer, SchemeId::FronthaulMix, SchemeId::D2dXChannel,
                        SchemeId::D2dRealIa}) {
        p.mu = schemes::mu_corner(id);
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            schemes::EndToEndOptions opt;
            opt.n_d = 5;
            opt.noiseless = id == SchemeId::D2dRealIa;
            const auto r = schemes::run_end_to_end(p, seed, id, opt);
            INFO(schemes::to_string(id) << " seed " << seed);
            CHECK(r.exact[0]);
            CHECK(r.exact[1]);
            CHECK(r.bit_errors == 0);
            CHECK_FALSE(r.error_flagged);
            CHECK(r.decoded[0] == r.files[0]);
            CHECK(r.decoded[1] == r.files[1]);

            opt.demands = {2, 2};
            const auto same = schemes::run_end_to_end(p, seed, id, opt);
            CHECK(same.exact[0]);
            CHECK(same.exact[1]);
            CHECK(same.ndt <= r.ndt);
        }
    }
}

TEST_CASE("end-to-end D2D run matches the deterministic NDT")
{
    auto p = SystemParams::make(0.5, 0.0, 1.0);
    p.file_bits = 4000;
    schemes::EndToEndOptions opt;
    opt.n_d = 5;
    const auto r = schemes::run_end_to_end(p, 4, SchemeId::D2dXChannel, opt);
    CHECK(r.ndt.near(ndt::det_ndt(5, 1.0), 1e-12));
    CHECK(r.latency.t_f == 0.0);
}

TEST_CASE("end-to-end argument errors")
{
    auto p = SystemParams::make(0.5, 1.0, 2.0);
    p.file_bits = 2000;
    CHECK_THROWS_AS(schemes::run_end_to_end(p, 0, SchemeId::CacheZf), std::invalid_argument);
    CHECK_THROWS_AS(schemes::run_end_to_end(p, 0, SchemeId::IaNoD2d), std::invalid_argument);
    p.file_bits = 2002;
    CHECK_THROWS_AS(schemes::run_end_to_end(p, 0, SchemeId::D2dXChannel), std::invalid_argument);
    p = SystemParams::make(0.5, 0.0, 0.0);
    p.file_bits = 2000;
    CHECK_THROWS_AS(schemes::run_end_to_end(p, 0, SchemeId::D2dXChannel), InfeasibleError);
    CHECK_THROWS_AS(schemes::run_end_to_end(p, 0, SchemeId::FronthaulMix), InfeasibleError);
}

TEST_CASE("noisy real-IA run flags or matches")
{
    auto p = SystemParams::make(0.5, 0.0, 2.0);
    p.file_bits = 600;
    p.power = std::exp2(36);
    schemes::EndToEndOptions opt;
    opt.n_d = 3;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto r = schemes::run_end_to_end(p, seed, SchemeId::D2dRealIa, opt);
        // Either exact, or the mismatch is visible in the report.
        CHECK((r.exact[0] && r.exact[1]) == (r.bit_errors == 0));
    }
}
