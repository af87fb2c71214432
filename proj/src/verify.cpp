#include "fran/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>
#include <string>

#include "fran/cli.hpp"
#include "fran/det_xchannel.hpp"
#include "fran/fran_schemes.hpp"
#include "fran/ndt_formulas.hpp"
#include "fran/properties.hpp"
#include "fran/real_ia.hpp"

namespace fran::verify {

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why)
    {
        if (ok) detail = why;
        ok = false;
    }
};

Outcome from(const props::PropertyResult& r)
{
    Outcome o;
    o.ok = r.passed;
    o.detail = r.passed ? std::to_string(r.checked) + " points" : r.detail;
    if (r.passed && r.skipped > 0) o.detail += ", " + std::to_string(r.skipped) + " vacuous";
    return o;
}

class Suite {
public:
    void run(const std::string& module, const std::string& name, const std::function<Outcome()>& fn)
    {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r{module, name, false, "", 0.0};
        try {
            const Outcome o = fn();
            r.passed = o.ok;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back(std::move(r));
    }

    std::vector<CheckResult> results;
};

std::string seed_tag(std::uint64_t seed) { return "seed " + std::to_string(seed); }

det::BitVector random_bits(std::mt19937_64& rng, std::size_t n)
{
    std::vector<std::uint8_t> b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1u);
    return det::BitVector(std::move(b));
}

void model_checks(Suite& s)
{
    s.run("model", "random CSI is generic", [] {
        Outcome o;
        for (std::uint64_t seed = 0; seed < 200; ++seed)
            if (!draw_csi(seed).is_valid()) o.fail(seed_tag(seed));
        return o;
    });
    s.run("model", "NDT of a latency breakdown", [] {
        Outcome o;
        const LatencyBreakdown lat{0.0, 100.0, 40.0};
        const NdtValue v = ndt_from_latency(lat, 400.0, 32.0);
        if (!v.near(NdtValue(1.75), 1e-12)) o.fail("got " + to_string(v));
        return o;
    });
}

void formula_checks(Suite& s, const std::vector<SystemParams>& grid)
{
    s.run("ndt_formulas", "achievability meets the converse", [&] { return from(props::check_tightness(grid)); });
    s.run("ndt_formulas", "D2D irrelevant for r_D <= max{1, r_F}",
          [&] { return from(props::check_d2d_irrelevance(grid)); });
    s.run("ndt_formulas", "D2D strictly helps for r_D > max{1, r_F}",
          [&] { return from(props::check_d2d_benefit(grid)); });
    s.run("ndt_formulas", "no fronthaul needed for mu > 1/2 when D2D dominates",
          [&] { return from(props::check_no_fronthaul_needed(grid)); });
    s.run("ndt_formulas", "convex and nonincreasing in mu", [&] { return from(props::check_convex_monotone(grid)); });
    s.run("ndt_formulas", "compress-forward baseline above delta_X",
          [&] { return from(props::check_baseline_ordering(grid)); });
    s.run("ndt_formulas", "finite-layer NDTs approach delta_X", [] {
        Outcome o;
        for (double rd : {0.25, 0.5, 1.0, 2.0, 3.0}) {
            const double dx = ndt::delta_x(rd).value();
            double prev_det = kInf, prev_nd = kInf;
            for (int n = 3; n <= 41; n += 2) {
                const double a = ndt::det_ndt(n, rd).value(), b = ndt::delta_nd(n, rd).value();
                const std::string at = " at n_d=" + std::to_string(n) + " rd=" + std::to_string(rd);
                if (!(a < prev_det) || !(b <= prev_nd)) o.fail("not decreasing" + at);
                if (a < dx || std::abs(a - dx) > 2.0 / n) o.fail("det_ndt gap" + at);
                if (b < dx || std::abs(b - dx) > 4.0 / (n - 1)) o.fail("delta_nd gap" + at);
                prev_det = a;
                prev_nd = b;
            }
        }
        return o;
    });
    s.run("ndt_formulas", "lower bound at least 1 and each inequality holds at the optimum", [&] {
        Outcome o;
        for (const auto& p : grid) {
            const NdtValue lb = ndt::lower_bound(p);
            if (lb.value() < 1.0) o.fail("lower bound below 1");
            for (const auto& ineq : ndt::converse_inequalities(p))
                if (ineq.sum_bound() > lb.value() + 1e-9) o.fail("single inequality exceeds the combined bound");
        }
        return o;
    });
}

void det_checks(Suite& s)
{
    s.run("det_xchannel", "exhaustive exactness at n_d = 3", [] {
        Outcome o;
        const auto cfg = det::DetConfig::make(3);
        for (int ma = 0; ma < 8; ++ma)
            for (int mb = 0; mb < 8; ++mb) {
                det::BitVector x1(3), x2(3);
                for (int i = 0; i < 3; ++i) {
                    x1.set(i, (ma >> i) & 1);
                    x2.set(i, (mb >> i) & 1);
                }
                const auto [y1, y2] = det::det_channel(x1, x2, cfg);
                const auto [v1, v2] = det::build_d2d_messages(y1, y2, cfg);
                const auto u1 = det::sic_decode(y1, v2, cfg, 1);
                const auto u2 = det::sic_decode(y2, v1, cfg, 2);
                for (int i = 0; i < 3; ++i) {
                    // UE 1: a at odd levels, b at even levels; UE 2 mirrored.
                    const auto want1 = (i % 2 == 0) ? x1[i] : x2[i];
                    const auto want2 = (i % 2 == 0) ? x2[i] : x1[i];
                    if (u1[i] != want1 || u2[i] != want2) o.fail("inputs " + std::to_string(ma) + "," + std::to_string(mb));
                }
            }
        return o;
    });
    s.run("det_xchannel", "random payloads decode exactly", [] {
        Outcome o;
        std::mt19937_64 rng(7);
        for (int n : {5, 11, 21, 41}) {
            const auto cfg = det::DetConfig::make(n);
            for (int t = 0; t < 100; ++t) {
                const std::size_t len = static_cast<std::size_t>(n - 1) * 4;
                const auto a = random_bits(rng, len), b = random_bits(rng, len);
                const auto r = det::run_det_delivery(a, b, cfg, 1.0);
                if (!(r.decoded_a == a) || !(r.decoded_b == b)) o.fail("n_d=" + std::to_string(n));
                if (r.d2d_bits_per_use != (n - 1) / 2) o.fail("D2D payload at n_d=" + std::to_string(n));
            }
        }
        return o;
    });
    s.run("det_xchannel", "measured NDT equals the closed form", [] {
        Outcome o;
        std::mt19937_64 rng(11);
        for (int n : {3, 5, 9}) {
            for (double rd : {0.5, 1.0, 2.0}) {
                const std::size_t len = static_cast<std::size_t>(n - 1) * 50;
                const auto r = det::run_det_delivery(random_bits(rng, len), random_bits(rng, len),
                                                     det::DetConfig::make(n), rd);
                if (!r.ndt.near(ndt::det_ndt(n, rd), 1e-12)) o.fail("n_d=" + std::to_string(n));
            }
        }
        return o;
    });
}

void ia_checks(Suite& s)
{
    s.run("real_ia", "alignment identities", [] {
        Outcome o;
        for (int n : {3, 5, 7})
            for (std::uint64_t seed = 0; seed < 50; ++seed) {
                const Csi csi = draw_csi(seed);
                const auto g = ia::precoder_gains(csi, n);
                for (int i = 2; i <= n; ++i) {
                    const cplx l1 = csi.h11 * g.at(1, i), r1 = csi.h12 * g.at(2, i - 1);
                    const cplx l2 = csi.h22 * g.at(2, i), r2 = csi.h21 * g.at(1, i - 1);
                    if (std::abs(l1 - r1) > 1e-10 * std::abs(l1) || std::abs(l2 - r2) > 1e-10 * std::abs(l2))
                        o.fail("n_d=" + std::to_string(n) + " " + seed_tag(seed) + " layer " + std::to_string(i));
                }
            }
        return o;
    });
    s.run("real_ia", "noiseless constellation points are distinct", [] {
        Outcome o;
        for (std::int64_t q : {2, 3, 4})
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                const Csi csi = draw_csi(seed);
                const auto g = ia::precoder_gains(csi, 3);
                const auto cfg = ia::config_for_q(g, q, 0.05);
                for (int ue = 1; ue <= 2; ++ue) {
                    const auto e = ia::effective_gains(g, csi, ue);
                    std::vector<cplx> pts;
                    for (std::int64_t c0 = 0; c0 < q; ++c0)
                        for (std::int64_t c1 = 0; c1 < 2 * q - 1; ++c1)
                            for (std::int64_t c2 = 0; c2 < 2 * q - 1; ++c2)
                                for (std::int64_t c3 = 0; c3 < q; ++c3)
                                    pts.push_back(cfg.a * (e[0] * double(c0) + e[1] * double(c1) + e[2] * double(c2) +
                                                           e[3] * double(c3)));
                    double best = kInf;
                    for (std::size_t i = 0; i < pts.size(); ++i)
                        for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, std::abs(pts[i] - pts[j]));
                    if (!(best > 1e-9 * cfg.a)) o.fail("Q=" + std::to_string(q) + " " + seed_tag(seed));
                }
            }
        return o;
    });
    s.run("real_ia", "zero-noise end-to-end exactness", [] {
        Outcome o;
        std::mt19937_64 rng(5);
        for (int n : {3, 5})
            for (std::int64_t q : {2, 4})
                for (std::uint64_t seed = 0; seed < 20; ++seed) {
                    const Csi csi = draw_csi(seed);
                    const auto cfg = ia::config_for_q(ia::precoder_gains(csi, n), q, 0.05);
                    const ia::IaLink link(csi, cfg);
                    std::uniform_int_distribution<std::int64_t> pick(0, q - 1);
                    for (int t = 0; t < 5; ++t) {
                        ia::LayerSymbols a{std::vector<std::int64_t>(n), cfg.a}, b = a;
                        for (auto& x : a.index) x = pick(rng);
                        for (auto& x : b.index) x = pick(rng);
                        const auto r = link.transmit(a, b);
                        for (int ue = 1; ue <= 2; ++ue)
                            if (!r.resolved[ue - 1].ok || r.resolved[ue - 1].symbols != ia::expected_resolution(a, b, ue))
                                o.fail("n_d=" + std::to_string(n) + " Q=" + std::to_string(q) + " " + seed_tag(seed));
                    }
                }
        return o;
    });
    s.run("real_ia", "peak transmit power within P", [] {
        Outcome o;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Csi csi = draw_csi(seed);
            const auto cfg = ia::select_constellation(csi, 3, std::exp2(16), 0.05);
            const auto g = ia::precoder_gains(csi, 3);
            const std::int64_t q = cfg.q;
            for (int m = 1; m <= 2; ++m)
                for (std::int64_t i0 = 0; i0 < q; ++i0)
                    for (std::int64_t i1 = 0; i1 < q; ++i1)
                        for (std::int64_t i2 = 0; i2 < q; ++i2) {
                            const cplx x = cfg.a * (g.at(m, 1) * double(i0) + g.at(m, 2) * double(i1) + g.at(m, 3) * double(i2));
                            if (std::norm(x) > cfg.power * (1 + 1e-9)) o.fail(seed_tag(seed));
                        }
        }
        return o;
    });
    s.run("real_ia", "NDT estimate matches the closed-form identity", [] {
        Outcome o;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto r = ia::run_ia_delivery(seed, 3, 0.05, std::exp2(24), 2.0, 2, true);
            const double id = ia::ia_ndt_identity(3, r.config.q, std::exp2(24), 2.0);
            if (std::abs(r.ndt_estimate.value() - id) > 1e-9) o.fail(seed_tag(seed));
            if (r.symbol_errors != 0) o.fail(seed_tag(seed) + ": noiseless symbol errors");
        }
        return o;
    });
}

void scheme_checks(Suite& s, const std::vector<SystemParams>& grid)
{
    s.run("fran_schemes", "mix is the lower envelope of the corners", [&] {
        Outcome o;
        for (const auto& p : grid) {
            const auto mix = schemes::best_achievable(p);
            const auto half = schemes::half_cache_scheme_ndt(p.r_f, p.r_d).second.value();
            const double corner[3][2] = {{0.0, 1.0 + ndt::limit_ratio(1.0, p.r_f)}, {0.5, half}, {1.0, 1.0}};
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    const double a = corner[i][0], b = corner[j][0];
                    if (!(a <= p.mu && p.mu <= b) || std::isinf(corner[i][1]) || std::isinf(corner[j][1])) continue;
                    const double w = (p.mu - a) / (b - a);
                    const double chord = (1 - w) * corner[i][1] + w * corner[j][1];
                    if (mix.ndt.value() > chord + 1e-9) o.fail("above a chord at mu=" + std::to_string(p.mu));
                }
            double total = 0.0, mu = 0.0, value = 0.0;
            for (const auto& part : mix.parts) {
                if (part.fraction < 0.0) o.fail("negative fraction");
                total += part.fraction;
                mu += part.fraction * part.mu;
                value += part.fraction * (part.mu == 0.0   ? corner[0][1]
                                          : part.mu == 1.0 ? 1.0
                                                           : half);
            }
            if (!mix.parts.empty()) {
                if (std::abs(total - 1.0) > 1e-12) o.fail("fractions do not sum to 1");
                if (std::abs(mu - p.mu) > 1e-12) o.fail("corners do not average to mu");
                if (std::abs(value - mix.ndt.value()) > 1e-9) o.fail("NDT is not the weighted corner NDT");
            }
        }
        return o;
    });
    s.run("fran_schemes", "cache placements meet capacity", [] {
        Outcome o;
        for (int n : {2, 3})
            for (double mu : {0.0, 0.5, 1.0}) {
                const auto pl = schemes::cache_placement(mu, n, 1000);
                for (int en = 1; en <= 2; ++en)
                    if (pl.cached_bits(en) != pl.capacity_bits()) o.fail("mu=" + std::to_string(mu));
                for (const auto& segs : pl.en)
                    for (const auto& seg : segs)
                        if (seg.begin < 0 || seg.end > 1000 || seg.file >= n) o.fail("segment out of range");
            }
        return o;
    });
    s.run("fran_schemes", "D2D-dominant mixes avoid fronthaul for mu >= 1/2", [&] {
        Outcome o;
        for (const auto& p : grid) {
            if (!(p.r_d > std::max(1.0, p.r_f)) || p.mu < 0.5) continue;
            for (const auto& part : schemes::best_achievable(p).parts)
                if (part.scheme == schemes::SchemeId::SoftTransfer || part.scheme == schemes::SchemeId::FronthaulMix)
                    o.fail("fronthaul scheme at mu=" + std::to_string(p.mu) + " rf=" + std::to_string(p.r_f));
        }
        return o;
    });
    s.run("fran_schemes", "ZF leakage and power", [] {
        Outcome o;
        std::mt19937_64 rng(3);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            std::array<schemes::Bits, 2> pl;
            for (auto& b : pl) {
                b.resize(2000);
                for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1u);
            }
            const double p = std::exp2(30);
            const auto r = schemes::cache_zf_delivery(draw_csi(seed), pl, p, std::nullopt);
            if (r.max_leakage > 1e-9) o.fail(seed_tag(seed) + ": leakage");
            if (r.max_tx_power > p * (1 + 1e-12)) o.fail(seed_tag(seed) + ": power");
            if (r.bit_errors != 0) o.fail(seed_tag(seed) + ": bit errors");
            if (!r.ndt.near(NdtValue(1.0), 0.0)) o.fail("accounting NDT");
        }
        return o;
    });
    s.run("fran_schemes", "soft-transfer accounting", [] {
        Outcome o;
        std::array<schemes::Bits, 2> pl{schemes::Bits(1000, 1), schemes::Bits(1000, 0)};
        for (double rf : {0.5, 1.0, 3.0}) {
            const auto r = schemes::soft_transfer_delivery(draw_csi(1), pl, std::exp2(20), rf, 1u);
            if (!r.ndt.near(NdtValue(1.0 + 1.0 / rf), 1e-12)) o.fail("NDT at rf=" + std::to_string(rf));
            if (std::abs(r.latency.t_f - r.latency.t_e / rf) > 1e-9) o.fail("t_f at rf=" + std::to_string(rf));
        }
        return o;
    });
    s.run("fran_schemes", "end-to-end recovery", [] {
        Outcome o;
        using schemes::SchemeId;
        for (SchemeId id : {SchemeId::CacheZf, SchemeId::SoftTransfer, SchemeId::FronthaulMix, SchemeId::D2dXChannel,
                            SchemeId::D2dRealIa}) {
            auto p = SystemParams::make(schemes::mu_corner(id), 1.0, 2.0);
            p.file_bits = 2000;
            p.power = std::exp2(24);
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                schemes::EndToEndOptions opt;
                opt.n_d = id == SchemeId::D2dRealIa ? 3 : 5;
                opt.noiseless = id == SchemeId::D2dRealIa;
                const auto worst = schemes::run_end_to_end(p, seed, id, opt);
                opt.demands = {2, 2};
                const auto same = schemes::run_end_to_end(p, seed, id, opt);
                const std::string tag = std::string(schemes::to_string(id)) + " " + seed_tag(seed);
                if (!worst.exact[0] || !worst.exact[1]) o.fail(tag + ": distinct demands");
                if (!same.exact[0] || !same.exact[1]) o.fail(tag + ": same demand");
                if (same.ndt > worst.ndt) o.fail(tag + ": same-demand latency above worst case");
            }
        }
        return o;
    });
}

void cli_checks(Suite& s)
{
    s.run("cli", "sweep output is deterministic", [] {
        Outcome o;
        const auto mu = props::inclusive_range(0.0, 1.0, 0.05);
        const std::vector<double> rf{0.0, 0.5, 2.0}, rd{0.0, 0.5, 2.0, 4.0};
        const std::string a = cli::sweep_csv(cli::sweep_rows(mu, rf, rd));
        const std::string b = cli::sweep_csv(cli::sweep_rows(mu, rf, rd));
        if (a != b) o.fail("CSV differs between runs");
        if (cli::sweep_json(cli::sweep_rows(mu, rf, rd)) != cli::sweep_json(cli::sweep_rows(mu, rf, rd)))
            o.fail("JSON differs between runs");
        for (const auto& row : cli::sweep_rows({1.0}, rf, rd))
            if (!row.ndt_min.near(NdtValue(1.0), 1e-12)) o.fail("mu=1 row is not 1");
        return o;
    });
}

}  // namespace

std::vector<CheckResult> run_all()
{
    Suite s;
    const auto grid = props::standard_grid();
    model_checks(s);
    formula_checks(s, grid);
    det_checks(s);
    ia_checks(s);
    scheme_checks(s, grid);
    cli_checks(s);
    return s.results;
}

int report(const std::vector<CheckResult>& results, std::ostream& out)
{
    int failed = 0;
    for (const auto& r : results) {
        char t[32];
        std::snprintf(t, sizeof t, "%.2fs", r.seconds);
        out << (r.passed ? "PASS " : "FAIL ") << r.module << ": " << r.name << " (" << t;
        if (!r.detail.empty()) out << ", " << r.detail;
        out << ")\n";
        if (!r.passed) ++failed;
    }
    out << results.size() - failed << " passed, " << failed << " failed\n";
    return failed;
}

}  // namespace fran::verify
