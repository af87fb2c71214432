#include "fran/fran_schemes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

#include "fran/det_xchannel.hpp"
#include "fran/ndt_formulas.hpp"
#include "fran/real_ia.hpp"

namespace fran::schemes {

std::string_view to_string(SchemeId id)
{
    switch (id) {
    case SchemeId::CacheZf: return "ZF";
    case SchemeId::SoftTransfer: return "SoftTransfer";
    case SchemeId::IaNoD2d: return "IA";
    case SchemeId::FronthaulMix: return "FronthaulMix";
    case SchemeId::D2dXChannel: return "D2D";
    case SchemeId::D2dRealIa: return "D2D-RealIA";
    }
    return "?";
}

double mu_corner(SchemeId id)
{
    switch (id) {
    case SchemeId::CacheZf: return 1.0;
    case SchemeId::SoftTransfer: return 0.0;
    default: return 0.5;
    }
}

std::int64_t CachePlacement::cached_bits(int en_index) const
{
    std::int64_t total = 0;
    for (const auto& s : en.at(en_index - 1)) total += s.size();
    return total;
}

std::int64_t CachePlacement::capacity_bits() const
{
    return static_cast<std::int64_t>(std::llround(mu * n_files * static_cast<double>(file_bits)));
}

bool CachePlacement::holds(int en_index, int file, std::int64_t bit) const
{
    for (const auto& s : en.at(en_index - 1))
        if (s.file == file && bit >= s.begin && bit < s.end) return true;
    return false;
}

CachePlacement cache_placement(double mu, int n_files, std::int64_t file_bits)
{
    if (n_files < 1 || file_bits < 1) throw std::invalid_argument("cache_placement: need N >= 1 and L >= 1");
    CachePlacement p;
    p.mu = mu;
    p.n_files = n_files;
    p.file_bits = file_bits;
    if (mu == 0.0) return p;
    if (mu == 1.0) {
        for (int f = 0; f < n_files; ++f)
            for (auto& e : p.en) e.push_back({f, 0, file_bits});
        return p;
    }
    if (mu == 0.5) {
        if (file_bits % 2 != 0)
            throw std::invalid_argument("cache_placement: mu = 1/2 needs an even file length");
        const std::int64_t half = file_bits / 2;
        for (int f = 0; f < n_files; ++f) {
            p.en[0].push_back({f, 0, half});
            p.en[1].push_back({f, half, file_bits});
        }
        return p;
    }
    throw std::invalid_argument("cache_placement: mu must be 0, 1/2 or 1, got " + std::to_string(mu));
}

namespace {

constexpr double kMarginSigmas = 8.0;

struct ZfPrecoder {
    cplx inv[2][2];
    double beta = 0.0;
    double row_sum[2] = {0, 0};
};

ZfPrecoder make_precoder(const Csi& csi, double power)
{
    const cplx det = csi.determinant();
    if (std::abs(det) == 0.0) throw InfeasibleError("ZF needs an invertible channel");
    ZfPrecoder z;
    z.inv[0][0] = csi.h22 / det;
    z.inv[0][1] = -csi.h12 / det;
    z.inv[1][0] = -csi.h21 / det;
    z.inv[1][1] = csi.h11 / det;
    for (int m = 0; m < 2; ++m) z.row_sum[m] = std::abs(z.inv[m][0]) + std::abs(z.inv[m][1]);
    // |s_k| <= 1, so |x_m| <= beta * row_sum[m] <= sqrt(P).
    z.beta = std::sqrt(power) / std::max(z.row_sum[0], z.row_sum[1]);
    return z;
}

/// Square QAM with 2^k levels per dimension, peak-normalized to |s| <= 1.
struct Qam {
    int k = 1;

    std::int64_t levels() const { return std::int64_t{1} << k; }
    double amplitude(std::int64_t l) const
    {
        const double km1 = static_cast<double>(levels() - 1);
        return (2.0 * static_cast<double>(l) - km1) / km1 / std::sqrt(2.0);
    }
    std::int64_t slice(double v) const
    {
        const double km1 = static_cast<double>(levels() - 1);
        const double l = std::nearbyint((v * std::sqrt(2.0) * km1 + km1) / 2.0);
        return static_cast<std::int64_t>(std::clamp(l, 0.0, km1));
    }
    /// Half the distance between neighbouring points per dimension.
    double half_spacing() const { return 1.0 / (static_cast<double>(levels() - 1) * std::sqrt(2.0)); }
};

std::int64_t read_bits(const Bits& b, std::size_t pos, int k)
{
    std::int64_t v = 0;
    for (int j = 0; j < k; ++j)
        if (pos + j < b.size() && b[pos + j]) v |= std::int64_t{1} << j;
    return v;
}

void write_bits(Bits& b, std::size_t pos, int k, std::int64_t v)
{
    for (int j = 0; j < k; ++j)
        if (pos + j < b.size()) b[pos + j] = static_cast<std::uint8_t>((v >> j) & 1);
}

/// Quantizer of the soft-transfer fronthaul for one EN.
struct Quantizer {
    double range = 1.0;
    std::int64_t cells = 2;

    double step() const { return 2.0 * range / static_cast<double>(cells); }
    double apply(double v) const
    {
        const double idx = std::clamp(std::floor((v + range) / step()), 0.0, static_cast<double>(cells - 1));
        return -range + (idx + 0.5) * step();
    }
};

struct BlockSetup {
    ZfPrecoder pre;
    Qam qam;
    std::array<Quantizer, 2> quant;
    bool quantized = false;
};

BlockSetup plan_block(const Csi& csi, double power, bool quantized)
{
    BlockSetup st;
    st.pre = make_precoder(csi, power);
    st.quantized = quantized;
    // The quantizer spans the per-dimension peak, so nothing clips; a
    // quantized sample can reach sqrt(2) times that peak in magnitude.
    if (quantized) st.pre.beta /= std::sqrt(2.0);
    const auto cells = std::int64_t{1} << static_cast<int>(std::ceil(std::log2(power) / 2.0));
    for (int k = 30; k >= 1; --k) {
        Qam q{k};
        double noise = 1.0;  // complex noise variance at the worse UE
        std::array<Quantizer, 2> quant{};
        if (quantized) {
            double worst = 0.0;
            for (int m = 0; m < 2; ++m) {
                quant[m].cells = cells;
                quant[m].range = st.pre.beta * st.pre.row_sum[m];
            }
            for (int ue = 1; ue <= 2; ++ue) {
                double extra = 0.0;
                for (int m = 0; m < 2; ++m) {
                    const double d = quant[m].step();
                    extra += std::norm(csi.gain(ue, m + 1)) * 2.0 * d * d / 12.0;
                }
                worst = std::max(worst, extra);
            }
            noise += worst;
        }
        const double sigma_dim = std::sqrt(noise / 2.0);
        if (st.pre.beta * q.half_spacing() >= kMarginSigmas * sigma_dim) {
            st.qam = q;
            st.quant = quant;
            return st;
        }
    }
    throw InfeasibleError("ZF delivery infeasible at this SNR: 2 levels per dimension miss the " +
                          std::to_string(kMarginSigmas) + "-sigma decision margin");
}

ZfReport run_block(const Csi& csi, const std::array<Bits, 2>& payload, double power,
                   std::optional<std::uint64_t> noise_seed, const BlockSetup& st)
{
    if (!(power > 1.0)) throw std::invalid_argument("ZF delivery needs P > 1");
    const std::size_t len = std::max(payload[0].size(), payload[1].size());
    if (len == 0) throw std::invalid_argument("ZF delivery needs a nonempty payload");

    const int k = st.qam.k;
    const auto bits_per_use = static_cast<std::size_t>(2 * k);
    const std::size_t uses = (len + bits_per_use - 1) / bits_per_use;

    std::mt19937_64 rng(noise_seed.value_or(0));
    ComplexGaussian gauss;

    ZfReport r;
    r.levels_per_dim = st.qam.levels();
    r.bits_per_use = static_cast<std::int64_t>(bits_per_use);
    for (int ue = 0; ue < 2; ++ue) r.decoded[ue].assign(payload[ue].size(), 0);

    double sig = 0.0, err = 0.0, qerr = 0.0;
    for (std::size_t t = 0; t < uses; ++t) {
        const std::size_t pos = t * bits_per_use;
        cplx s[2];
        for (int ue = 0; ue < 2; ++ue) {
            const auto li = read_bits(payload[ue], pos, k);
            const auto lq = read_bits(payload[ue], pos + k, k);
            s[ue] = {st.qam.amplitude(li), st.qam.amplitude(lq)};
        }
        cplx x[2];
        for (int m = 0; m < 2; ++m) {
            x[m] = st.pre.beta * (st.pre.inv[m][0] * s[0] + st.pre.inv[m][1] * s[1]);
            if (st.quantized) {
                const cplx xq{st.quant[m].apply(x[m].real()), st.quant[m].apply(x[m].imag())};
                qerr += std::norm(xq - x[m]);
                x[m] = xq;
            }
            r.max_tx_power = std::max(r.max_tx_power, std::norm(x[m]));
        }
        cplx z[2]{};
        if (noise_seed)
            for (auto& zz : z) zz = gauss(rng);
        for (int ue = 0; ue < 2; ++ue) {
            const cplx clean = csi.gain(ue + 1, 1) * x[0] + csi.gain(ue + 1, 2) * x[1];
            const cplx want = st.pre.beta * s[ue];
            if (!st.quantized)
                r.max_leakage = std::max(r.max_leakage, std::abs(clean - want) / std::abs(want));
            const cplx y = clean + z[ue];
            sig += std::norm(want);
            err += std::norm(y - want);
            const cplx v = y / st.pre.beta;
            write_bits(r.decoded[ue], pos, k, st.qam.slice(v.real()));
            write_bits(r.decoded[ue], pos + k, k, st.qam.slice(v.imag()));
        }
    }
    for (int ue = 0; ue < 2; ++ue)
        for (std::size_t i = 0; i < payload[ue].size(); ++i)
            if (r.decoded[ue][i] != payload[ue][i]) ++r.bit_errors;

    r.sinr_db = err > 0.0 ? 10.0 * std::log10(sig / err) : kInf;
    r.quant_noise_power = qerr / (2.0 * static_cast<double>(uses));
    r.latency.t_e = static_cast<double>(uses);
    return r;
}

}  // namespace

ZfReport cache_zf_delivery(const Csi& csi, const std::array<Bits, 2>& payload, double power,
                           std::optional<std::uint64_t> noise_seed)
{
    if (!(power > 1.0)) throw std::invalid_argument("cache_zf_delivery: P must be > 1");
    const BlockSetup st = plan_block(csi, power, false);
    ZfReport r = run_block(csi, payload, power, noise_seed, st);
    r.ndt = NdtValue(1.0);
    const double len = static_cast<double>(std::max(payload[0].size(), payload[1].size()));
    r.ndt_estimate = ndt_from_latency(r.latency, len, power);
    return r;
}

ZfReport soft_transfer_delivery(const Csi& csi, const std::array<Bits, 2>& payload, double power,
                                double r_f, std::optional<std::uint64_t> noise_seed)
{
    if (!(power > 1.0)) throw std::invalid_argument("soft_transfer_delivery: P must be > 1");
    if (!(r_f > 0.0)) throw InfeasibleError("soft transfer needs fronthaul: r_F > 0");
    const BlockSetup st = plan_block(csi, power, true);
    ZfReport r = run_block(csi, payload, power, noise_seed, st);
    const double bits_per_sample = 2.0 * std::ceil(std::log2(power) / 2.0);
    // Both ENs receive their sample streams in parallel.
    r.latency.t_f = r.latency.t_e * bits_per_sample / (r_f * std::log2(power));
    r.ndt = NdtValue(1.0 + 1.0 / r_f);
    const double len = static_cast<double>(std::max(payload[0].size(), payload[1].size()));
    r.ndt_estimate = ndt_from_latency(r.latency, len, power);
    return r;
}

NdtValue ia_no_d2d_ndt() { return NdtValue(1.5); }

std::pair<SchemeId, NdtValue> half_cache_scheme_ndt(double r_f, double r_d)
{
    const std::pair<SchemeId, NdtValue> options[] = {
        {SchemeId::IaNoD2d, ia_no_d2d_ndt()},
        {SchemeId::FronthaulMix, NdtValue(1.0 + ndt::limit_ratio(1.0, 2.0 * r_f))},
        {SchemeId::D2dXChannel, ndt::delta_x(r_d)},
    };
    auto best = options[0];
    for (const auto& o : options)
        if (o.second < best.second) best = o;
    return best;
}

std::string mix_label(const SchemeMix& mix)
{
    if (mix.parts.empty()) return "none";
    std::string out;
    for (const auto& p : mix.parts) {
        if (!out.empty()) out += '+';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", p.fraction);
        out += std::string(to_string(p.scheme)) + ':' + buf;
    }
    return out;
}

SchemeMix best_achievable(const SystemParams& params)
{
    params.validate();
    struct Corner {
        double mu;
        SchemeId id;
        NdtValue ndt;
    };
    const auto half = half_cache_scheme_ndt(params.r_f, params.r_d);
    const Corner corners[3] = {
        {0.0, SchemeId::SoftTransfer, NdtValue(1.0 + ndt::limit_ratio(1.0, params.r_f))},
        {0.5, half.first, half.second},
        {1.0, SchemeId::CacheZf, NdtValue(1.0)},
    };
    const double mu = params.mu;

    SchemeMix best;
    best.ndt = NdtValue::infinite();
    auto offer = [&](SchemeMix m) {
        if (m.ndt < best.ndt) best = std::move(m);
    };
    for (const auto& c : corners)
        if (mu == c.mu && !c.ndt.is_infinite()) offer({{{c.id, c.mu, 1.0}}, c.ndt});
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const Corner& a = corners[i];
            const Corner& b = corners[j];
            if (!(a.mu < mu && mu < b.mu) || a.ndt.is_infinite() || b.ndt.is_infinite()) continue;
            const double wb = (mu - a.mu) / (b.mu - a.mu);
            const double wa = 1.0 - wb;
            offer({{{a.id, a.mu, wa}, {b.id, b.mu, wb}}, NdtValue(wa * a.ndt.value() + wb * b.ndt.value())});
        }
    return best;
}

namespace {

Bits slice_bits(const Bits& b, std::size_t first, std::size_t last)
{
    return {b.begin() + static_cast<std::ptrdiff_t>(first), b.begin() + static_cast<std::ptrdiff_t>(last)};
}

// k bits of b starting at base + pos, reading nothing past base + limit.
std::int64_t read_half(const Bits& b, std::size_t base, std::size_t limit, std::size_t pos, int k)
{
    std::int64_t v = 0;
    for (int j = 0; j < k; ++j)
        if (pos + j < limit && b[base + pos + j]) v |= std::int64_t{1} << j;
    return v;
}

void run_d2d_det(const SystemParams& params, const EndToEndOptions& opts, const std::array<Bits, 2>& want,
                 EndToEndReport& rep)
{
    const auto cfg = det::DetConfig::make(opts.n_d);
    const auto per_use = static_cast<std::size_t>(opts.n_d - 1);
    const std::size_t len = want[0].size();
    const std::size_t padded = (len + per_use - 1) / per_use * per_use;
    auto padded_bits = [&](const Bits& b) {
        Bits p = b;
        p.resize(padded, 0);
        return det::BitVector(std::move(p));
    };
    // The halves split at padded/2, so the cached halves line up only when
    // the padding is empty or sits wholly in the second half.
    if (padded != len)
        throw std::invalid_argument("D2D X-channel run needs L to be a multiple of n_d - 1");
    const auto res = det::run_det_delivery(padded_bits(want[0]), padded_bits(want[1]), cfg, params.r_d);
    rep.decoded[0] = res.decoded_a.bits();
    rep.decoded[1] = res.decoded_b.bits();
    rep.latency = res.latency;
    rep.ndt = ndt_from_latency(res.latency, static_cast<double>(len), std::exp2(opts.n_d));
}

void run_d2d_ia(const SystemParams& params, std::uint64_t seed, const Csi& csi, const EndToEndOptions& opts,
                const std::array<Bits, 2>& want, EndToEndReport& rep)
{
    const int n = opts.n_d;
    const ia::IaConfig cfg = ia::select_constellation(csi, n, params.power, opts.eps_prime);
    const ia::IaLink link(csi, cfg);
    const int k = static_cast<int>(std::floor(std::log2(static_cast<double>(cfg.q))));
    const std::size_t m = static_cast<std::size_t>(n - 1) / 2;  // symbols per half per use
    const std::size_t half = want[0].size() / 2;
    const std::size_t per_use = m * static_cast<std::size_t>(k);
    const std::size_t uses = (half + per_use - 1) / per_use;

    std::seed_seq noise_seed{seed, std::uint64_t{2}};
    std::mt19937_64 noise_rng(noise_seed);
    ComplexGaussian gauss;
    for (auto& d : rep.decoded) d.assign(want[0].size(), 0);

    for (std::size_t t = 0; t < uses; ++t) {
        ia::LayerSymbols a{std::vector<std::int64_t>(static_cast<std::size_t>(n), 0), cfg.a};
        ia::LayerSymbols b = a;
        // EN 1 holds first halves: odd layers to UE 1, even layers to UE 2.
        // EN 2 holds second halves: odd layers to UE 2, even layers to UE 1.
        // Layer n_d stays zero so both halves drain at the same rate.
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t pos = (t * m + j) * static_cast<std::size_t>(k);
            a.index[2 * j] = read_half(want[0], 0, half, pos, k);
            a.index[2 * j + 1] = read_half(want[1], 0, half, pos, k);
            b.index[2 * j] = read_half(want[1], half, half, pos, k);
            b.index[2 * j + 1] = read_half(want[0], half, half, pos, k);
        }
        std::pair<cplx, cplx> z{};
        if (!opts.noiseless) z = {gauss(noise_rng), gauss(noise_rng)};
        const auto use = link.transmit(a, b, z);
        for (int ue = 0; ue < 2; ++ue) {
            const auto& r = use.resolved[ue];
            if (!r.ok) rep.error_flagged = true;
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t pos = (t * m + j) * static_cast<std::size_t>(k);
                const std::int64_t own = r.symbols[2 * j];       // odd layer, own EN
                const std::int64_t other = r.symbols[2 * j + 1];  // even layer, other EN
                if (own >= (std::int64_t{1} << k) || other >= (std::int64_t{1} << k)) rep.error_flagged = true;
                // UE 1's own EN is EN 1 (first half); UE 2's is EN 2 (second half).
                const std::size_t own_base = ue == 0 ? 0 : half;
                const std::size_t other_base = ue == 0 ? half : 0;
                Bits& out = rep.decoded[ue];
                for (int bit = 0; bit < k; ++bit) {
                    if (pos + bit < half) {
                        out[own_base + pos + bit] = static_cast<std::uint8_t>((own >> bit) & 1);
                        out[other_base + pos + bit] = static_cast<std::uint8_t>((other >> bit) & 1);
                    }
                }
            }
        }
    }

    rep.latency.t_e = static_cast<double>(uses);
    rep.latency.t_d = rep.latency.t_e * std::log2(2.0 * static_cast<double>(cfg.q)) * static_cast<double>(m) /
                      (params.r_d * std::log2(params.power));
    rep.ndt = ndt_from_latency(rep.latency, static_cast<double>(want[0].size()), params.power);
}

}  // namespace

EndToEndReport run_end_to_end(const SystemParams& params, std::uint64_t seed, SchemeId scheme,
                              const EndToEndOptions& opts)
{
    params.validate();
    opts.demands.validate(params.n_files);
    if (params.mu != mu_corner(scheme))
        throw std::invalid_argument("run_end_to_end: scheme " + std::string(to_string(scheme)) +
                                    " runs at mu = " + std::to_string(mu_corner(scheme)) + ", got " +
                                    std::to_string(params.mu));
    if (scheme == SchemeId::IaNoD2d)
        throw std::invalid_argument("run_end_to_end: the IA scheme without D2D is accounting only");

    EndToEndReport rep;
    rep.scheme = scheme;
    rep.demands = opts.demands;
    const auto len = static_cast<std::size_t>(params.file_bits);
    std::seed_seq file_seed{seed, std::uint64_t{3}};
    std::mt19937_64 file_rng(file_seed);
    std::bernoulli_distribution coin(0.5);
    rep.files.assign(static_cast<std::size_t>(params.n_files), Bits(len));
    for (auto& f : rep.files)
        for (auto& b : f) b = coin(file_rng) ? 1 : 0;
    const std::array<Bits, 2> want{rep.files[opts.demands.d1 - 1], rep.files[opts.demands.d2 - 1]};

    const Csi csi = draw_csi(seed);
    const std::optional<std::uint64_t> noise =
        opts.noiseless ? std::nullopt : std::optional<std::uint64_t>(seed);

    switch (scheme) {
    case SchemeId::CacheZf: {
        const auto r = cache_zf_delivery(csi, want, params.power, noise);
        rep.decoded = r.decoded;
        rep.latency = r.latency;
        rep.ndt = r.ndt_estimate;
        break;
    }
    case SchemeId::SoftTransfer: {
        const auto r = soft_transfer_delivery(csi, want, params.power, params.r_f, noise);
        rep.decoded = r.decoded;
        rep.latency = r.latency;
        rep.ndt = r.ndt_estimate;
        break;
    }
    case SchemeId::FronthaulMix: {
        // Memory sharing: the first half of every file sits in both caches and
        // goes out by ZF; the second half goes by soft transfer.
        if (!(params.r_f > 0.0)) throw InfeasibleError("fronthaul mix needs r_F > 0");
        const std::size_t half = len / 2;
        const std::array<Bits, 2> first{slice_bits(want[0], 0, half), slice_bits(want[1], 0, half)};
        const std::array<Bits, 2> second{slice_bits(want[0], half, len), slice_bits(want[1], half, len)};
        const auto rz = cache_zf_delivery(csi, first, params.power, noise);
        const auto rs = soft_transfer_delivery(csi, second, params.power, params.r_f,
                                               noise ? std::optional<std::uint64_t>(*noise + 1) : std::nullopt);
        for (int ue = 0; ue < 2; ++ue) {
            rep.decoded[ue] = rz.decoded[ue];
            rep.decoded[ue].insert(rep.decoded[ue].end(), rs.decoded[ue].begin(), rs.decoded[ue].end());
        }
        rep.latency = rz.latency;
        rep.latency += rs.latency;
        rep.ndt = ndt_from_latency(rep.latency, static_cast<double>(len), params.power);
        break;
    }
    case SchemeId::D2dXChannel:
        if (!(params.r_d > 0.0)) throw InfeasibleError("D2D scheme needs r_D > 0");
        cache_placement(0.5, params.n_files, params.file_bits);
        run_d2d_det(params, opts, want, rep);
        break;
    case SchemeId::D2dRealIa:
        if (!(params.r_d > 0.0)) throw InfeasibleError("D2D scheme needs r_D > 0");
        cache_placement(0.5, params.n_files, params.file_bits);
        run_d2d_ia(params, seed, csi, opts, want, rep);
        break;
    case SchemeId::IaNoD2d:
        break;
    }

    for (int ue = 0; ue < 2; ++ue) {
        rep.exact[ue] = rep.decoded[ue] == want[ue];
        for (std::size_t i = 0; i < len; ++i)
            if (rep.decoded[ue][i] != want[ue][i]) ++rep.bit_errors;
    }
    return rep;
}

}  // namespace fran::schemes
