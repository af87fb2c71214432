#include "fran/real_ia.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "fran/mutation.hpp"

namespace fran::ia {

namespace {

void require_layers(int n_d)
{
    if (n_d < 3 || n_d % 2 == 0)
        throw std::invalid_argument("real IA needs an odd layer count >= 3, got " + std::to_string(n_d));
}

cplx ipow(cplx base, int exp)
{
    cplx r{1.0, 0.0};
    for (int k = 0; k < exp; ++k) r *= base;
    return r;
}

int ue_index(int ue)
{
    if (ue != 1 && ue != 2) throw std::invalid_argument("UE index must be 1 or 2");
    return ue - 1;
}

std::vector<std::int64_t> aligned_sizes(const IaConfig& cfg)
{
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(cfg.n_d + 1));
    for (int j = 0; j <= cfg.n_d; ++j) sizes[j] = cfg.aligned_size(j);
    return sizes;
}

}  // namespace

PrecoderGains precoder_gains(const Csi& csi, int n_d)
{
    require_layers(n_d);
    const cplx direct = csi.h11 * csi.h22;
    const cplx cross = csi.h12 * csi.h21;
    PrecoderGains out;
    out.n_d = n_d;
    for (int m = 1; m <= 2; ++m) {
        const int mp = 3 - m;
        auto& g = out.g[m - 1];
        g.resize(static_cast<std::size_t>(n_d));
        for (int i = 1; i <= n_d; ++i) {
            if (i % 2 == 1) {
                g[i - 1] = ipow(direct, (n_d - i) / 2) * ipow(cross, (i - 1) / 2);
            } else {
                g[i - 1] = ipow(direct, (n_d - i - 1) / 2) * ipow(cross, (i - 2) / 2) *
                           csi.gain(mp, mp) * csi.gain(m, mp);
            }
        }
    }
    if (active_mutation() == Mutation::PrecoderSignFlip) out.g[0][1] = -out.g[0][1];
    return out;
}

double peak_amplitude_factor(const PrecoderGains& gains)
{
    double peak = 0.0;
    for (const auto& g : gains.g) {
        const std::size_t n = g.size();
        if (n > 24) {
            // Triangle bound; subset enumeration is too large here.
            double s = 0.0;
            for (const cplx& x : g) s += std::abs(x);
            peak = std::max(peak, s);
            continue;
        }
        // |x| is convex in the layer values, so the peak over the box sits on
        // a vertex: every layer at 0 or at A (Q - 1).
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            cplx s{};
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) s += g[i];
            peak = std::max(peak, std::abs(s));
        }
    }
    return peak;
}

IaConfig select_constellation(const Csi& csi, int n_d, double power, double eps_prime)
{
    require_layers(n_d);
    if (!(power > 1.0)) throw std::invalid_argument("select_constellation: P must be > 1");
    if (!(eps_prime > 0.0)) throw std::invalid_argument("select_constellation: eps' must be > 0");

    const PrecoderGains gains = precoder_gains(csi, n_d);
    const double m = peak_amplitude_factor(gains);

    IaConfig cfg;
    cfg.n_d = n_d;
    cfg.eps_prime = eps_prime;
    cfg.power = power;
    const double e = cfg.exponent();
    cfg.rho = std::exp2(-2.0 * std::log2(m) / e);
    cfg.q_real = std::exp2((std::log2(power) - 2.0 * std::log2(m)) / e);
    if (!(cfg.q_real < 0x1p62)) throw InfeasibleError("select_constellation: Q overflows 64 bits");
    cfg.q = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::floor(cfg.q_real)));
    const double layer_exp = (n_d - 1) / 2.0 + eps_prime;
    cfg.a = std::pow(static_cast<double>(cfg.q), layer_exp);

    const double peak = cfg.a * static_cast<double>(cfg.q - 1) * m;
    if (peak * peak > power * (1.0 + 1e-12)) {
        throw InfeasibleError("real IA infeasible at this SNR: Q = 2 with n_d = " + std::to_string(n_d) +
                              " needs peak power " + std::to_string(peak * peak) + " > P = " +
                              std::to_string(power));
    }
    return cfg;
}

IaConfig config_for_q(const PrecoderGains& gains, std::int64_t q, double eps_prime)
{
    require_layers(gains.n_d);
    if (q < 1) throw std::invalid_argument("config_for_q: Q must be >= 1");
    if (!(eps_prime > 0.0)) throw std::invalid_argument("config_for_q: eps' must be > 0");
    const double m = peak_amplitude_factor(gains);
    IaConfig cfg;
    cfg.n_d = gains.n_d;
    cfg.q = q;
    cfg.eps_prime = eps_prime;
    cfg.a = std::pow(static_cast<double>(q), (gains.n_d - 1) / 2.0 + eps_prime);
    const double amp = cfg.a * static_cast<double>(q) * m;
    cfg.power = amp * amp;
    cfg.rho = std::exp2(-2.0 * std::log2(m) / cfg.exponent());
    cfg.q_real = static_cast<double>(q);
    return cfg;
}

std::pair<cplx, cplx> encode(const LayerSymbols& a, const LayerSymbols& b, const PrecoderGains& gains)
{
    const auto n = static_cast<std::size_t>(gains.n_d);
    if (a.index.size() != n || b.index.size() != n)
        throw std::invalid_argument("encode: expected " + std::to_string(n) + " layer symbols per EN");
    cplx x1{}, x2{};
    for (std::size_t i = 0; i < n; ++i) {
        x1 += gains.g[0][i] * a.value(i);
        x2 += gains.g[1][i] * b.value(i);
    }
    return {x1, x2};
}

std::pair<cplx, cplx> receive(cplx x1, cplx x2, const Csi& csi, std::pair<cplx, cplx> noise)
{
    return {csi.h11 * x1 + csi.h12 * x2 + noise.first, csi.h21 * x1 + csi.h22 * x2 + noise.second};
}

std::vector<cplx> effective_gains(const PrecoderGains& gains, const Csi& csi, int ue)
{
    const int k = ue_index(ue);
    const int own = k;        // EN whose layers sit alone on level 1
    const int other = 1 - k;
    const cplx h_own = csi.gain(ue, own + 1);
    const cplx h_other = csi.gain(ue, other + 1);
    std::vector<cplx> e;
    e.reserve(static_cast<std::size_t>(gains.n_d + 1));
    for (int i = 0; i < gains.n_d; ++i) e.push_back(h_own * gains.g[own][i]);
    e.push_back(h_other * gains.g[other][gains.n_d - 1]);
    return e;
}

AlignedObservation aligned_truth(const LayerSymbols& a, const LayerSymbols& b, int ue)
{
    const int k = ue_index(ue);
    const auto& own = k == 0 ? a.index : b.index;
    const auto& other = k == 0 ? b.index : a.index;
    if (own.size() != other.size() || own.empty())
        throw std::invalid_argument("aligned_truth: layer counts differ");
    const std::size_t n = own.size();
    AlignedObservation obs;
    obs.ue = ue;
    obs.c.resize(n + 1);
    obs.c[0] = own[0];
    for (std::size_t i = 1; i < n; ++i) obs.c[i] = own[i] + other[i - 1];
    obs.c[n] = other[n - 1];
    return obs;
}

namespace {

std::vector<cplx> scaled_gains(const PrecoderGains& gains, const Csi& csi, const IaConfig& cfg, int ue)
{
    if (cfg.n_d != gains.n_d) throw std::invalid_argument("n_d mismatch between gains and config");
    auto e = effective_gains(gains, csi, ue);
    for (cplx& x : e) x *= cfg.a;
    return e;
}

}  // namespace

LayerDemodulator::LayerDemodulator(const PrecoderGains& gains, const Csi& csi, const IaConfig& cfg,
                                   int ue, std::int64_t search_cap)
    : ue_(ue),
      search_(scaled_gains(gains, csi, cfg, ue), std::vector<std::int64_t>(cfg.n_d + 1, 0),
              [&] {
                  auto hi = aligned_sizes(cfg);
                  for (auto& h : hi) h -= 1;
                  return hi;
              }(),
              search_cap)
{
}

AlignedObservation LayerDemodulator::demodulate(cplx y) const
{
    return AlignedObservation{ue_, search_.nearest(y).c};
}

AlignedObservation demodulate_layers(cplx y, const PrecoderGains& gains, const Csi& csi,
                                     const IaConfig& cfg, int ue, std::int64_t search_cap)
{
    return LayerDemodulator(gains, csi, cfg, ue, search_cap).demodulate(y);
}

double min_distance(const PrecoderGains& gains, const Csi& csi, const IaConfig& cfg, int ue,
                    std::int64_t search_cap)
{
    if (cfg.q <= 1) return kInf;
    const auto sizes = aligned_sizes(cfg);
    std::vector<std::int64_t> lo(sizes.size()), hi(sizes.size());
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        hi[j] = sizes[j] - 1;
        lo[j] = -hi[j];
    }
    const auto cols = scaled_gains(gains, csi, cfg, ue);
    // A unit difference is always available; search strictly below it.
    double bound2 = kInf;
    for (const cplx& b : cols) bound2 = std::min(bound2, std::norm(b));
    const BoxSearch search(cols, lo, hi, search_cap);
    if (auto hit = search.nearest_within(cplx{}, bound2, true)) bound2 = hit->dist2;
    return std::sqrt(bound2);
}

std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>
d2d_exchange(const AlignedObservation& obs1, const AlignedObservation& obs2)
{
    if (obs1.c.size() != obs2.c.size() || obs1.c.size() < 4 || obs1.c.size() % 2 != 0)
        throw std::invalid_argument("d2d_exchange: inconsistent aligned observations");
    auto evens = [](const AlignedObservation& o) {
        std::vector<std::int64_t> v;
        // c_2, c_4, ..., c_{n_d-1} at 0-based 1, 3, ..., n_d - 2.
        for (std::size_t j = 1; j + 2 < o.c.size(); j += 2) v.push_back(o.c[j]);
        return v;
    };
    return {evens(obs1), evens(obs2)};
}

SicResult sic_resolve(const AlignedObservation& obs, const std::vector<std::int64_t>& v_other,
                      std::int64_t q)
{
    const std::size_t n = obs.c.size() - 1;
    if (obs.c.size() < 4 || n % 2 == 0 || v_other.size() != (n - 1) / 2)
        throw std::invalid_argument("sic_resolve: inconsistent observation / D2D message sizes");

    SicResult res;
    res.symbols.resize(n + 1);
    auto in_range = [q](std::int64_t s) { return s >= 0 && s < q; };
    res.symbols[0] = obs.c[0];
    res.ok = in_range(res.symbols[0]);
    for (std::size_t i = 1; i < n; ++i) {
        // Level i+1 (1-based): even levels come from the peer, odd from us.
        const std::int64_t sum = (i % 2 == 1) ? v_other[i / 2] : obs.c[i];
        res.symbols[i] = sum - res.symbols[i - 1];
        res.ok = res.ok && in_range(res.symbols[i]);
    }
    res.symbols[n] = obs.c[n];
    res.ok = res.ok && in_range(res.symbols[n]);
    return res;
}

std::vector<std::int64_t> expected_resolution(const LayerSymbols& a, const LayerSymbols& b, int ue)
{
    const int k = ue_index(ue);
    const auto& own = k == 0 ? a.index : b.index;
    const auto& other = k == 0 ? b.index : a.index;
    const std::size_t n = own.size();
    std::vector<std::int64_t> out(n + 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = (i % 2 == 0) ? own[i] : other[i];
    out[n] = other[n - 1];
    return out;
}

IaLink::IaLink(const Csi& csi, const IaConfig& cfg, std::int64_t search_cap)
    : csi_(csi),
      cfg_(cfg),
      gains_(precoder_gains(csi, cfg.n_d)),
      demod1_(gains_, csi_, cfg_, 1, search_cap),
      demod2_(gains_, csi_, cfg_, 2, search_cap)
{
}

IaLink::UseResult IaLink::transmit(const LayerSymbols& a, const LayerSymbols& b,
                                   std::pair<cplx, cplx> noise) const
{
    const auto [x1, x2] = encode(a, b, gains_);
    const auto [y1, y2] = receive(x1, x2, csi_, noise);
    UseResult r;
    r.observed[0] = demod1_.demodulate(y1);
    r.observed[1] = demod2_.demodulate(y2);
    const auto [v1, v2] = d2d_exchange(r.observed[0], r.observed[1]);
    r.resolved[0] = sic_resolve(r.observed[0], v2, cfg_.q);
    r.resolved[1] = sic_resolve(r.observed[1], v1, cfg_.q);
    return r;
}

DeliveryReport run_ia_delivery(std::uint64_t seed, int n_d, double eps_prime, double power,
                               double r_d, int n_uses, bool noiseless)
{
    if (!(r_d > 0.0)) throw std::invalid_argument("run_ia_delivery: r_d must be > 0");
    if (n_uses < 1) throw std::invalid_argument("run_ia_delivery: n_uses must be >= 1");

    const Csi csi = draw_csi(seed);
    const IaConfig cfg = select_constellation(csi, n_d, power, eps_prime);
    const IaLink link(csi, cfg);

    std::seed_seq sym_seed{seed, std::uint64_t{1}};
    std::seed_seq noise_seed{seed, std::uint64_t{2}};
    std::mt19937_64 sym_rng(sym_seed);
    std::mt19937_64 noise_rng(noise_seed);
    std::uniform_int_distribution<std::int64_t> pick(0, cfg.q - 1);
    ComplexGaussian gauss;

    DeliveryReport rep;
    rep.config = cfg;
    for (int t = 0; t < n_uses; ++t) {
        LayerSymbols a{std::vector<std::int64_t>(static_cast<std::size_t>(n_d)), cfg.a};
        LayerSymbols b = a;
        for (auto& s : a.index) s = pick(sym_rng);
        for (auto& s : b.index) s = pick(sym_rng);
        std::pair<cplx, cplx> z{gauss(noise_rng), gauss(noise_rng)};
        if (noiseless) z = {};

        const auto use = link.transmit(a, b, z);
        for (int ue = 1; ue <= 2; ++ue) {
            const auto truth = expected_resolution(a, b, ue);
            const auto& got = use.resolved[ue - 1];
            if (!got.ok) ++rep.decode_failures;
            for (std::size_t i = 0; i < truth.size(); ++i)
                if (got.symbols[i] != truth[i]) ++rep.symbol_errors;
            rep.symbols += static_cast<std::int64_t>(truth.size());
        }
    }
    rep.symbol_error_rate = static_cast<double>(rep.symbol_errors) / static_cast<double>(rep.symbols);

    const double log_q = std::log2(static_cast<double>(cfg.q));
    const double log_p = std::log2(power);
    rep.payload_bits = n_uses * (n_d - 1) * log_q;
    rep.latency.t_e = n_uses;
    rep.latency.t_d = rep.latency.t_e * (std::log2(2.0 * cfg.q) * (n_d - 1) / 2.0) / (r_d * log_p);
    rep.ndt_estimate = ndt_from_latency(rep.latency, rep.payload_bits, power);
    return rep;
}

double ia_ndt_identity(int n_d, std::int64_t q, double power, double r_d)
{
    const double log_p = std::log2(power);
    const double log_q = std::log2(static_cast<double>(q));
    const double e_total = log_p / log_q;  // n_d + 1 + 2 eps-hat
    return e_total / (n_d - 1) * (1.0 + (std::log2(2.0 * q) / log_p) * (n_d - 1) / (2.0 * r_d));
}

}  // namespace fran::ia
