#include "fran/det_xchannel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fran::det {

DetConfig DetConfig::make(int n_d)
{
    DetConfig cfg{n_d, n_d - 1};
    cfg.validate();
    return cfg;
}

void DetConfig::validate() const
{
    if (n_d < 3 || n_d % 2 == 0)
        throw std::invalid_argument("n_d must be odd and >= 3, got " + std::to_string(n_d));
    if (n_c != n_d - 1)
        throw std::invalid_argument("only n_c = n_d - 1 is supported");
}

BitVector::BitVector(std::initializer_list<int> bits)
{
    bits_.reserve(bits.size());
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("BitVector entries must be 0 or 1");
        bits_.push_back(static_cast<std::uint8_t>(b));
    }
}

BitVector::BitVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits))
{
    for (auto b : bits_)
        if (b > 1) throw std::invalid_argument("BitVector entries must be 0 or 1");
}

namespace {

void require_length(const BitVector& v, std::size_t n, const char* what)
{
    if (v.size() != n)
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) +
                                    " levels, got " + std::to_string(v.size()));
}

}  // namespace

std::pair<BitVector, BitVector> det_channel(const BitVector& x1, const BitVector& x2,
                                            const DetConfig& cfg)
{
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.n_d);
    require_length(x1, n, "det_channel x1");
    require_length(x2, n, "det_channel x2");
    const auto s = static_cast<std::size_t>(cfg.shift());

    BitVector y1(n), y2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t cross1 = i >= s ? x1[i - s] : 0;
        const std::uint8_t cross2 = i >= s ? x2[i - s] : 0;
        y1.set(i, (x1[i] ^ cross2) != 0);
        y2.set(i, (x2[i] ^ cross1) != 0);
    }
    return {std::move(y1), std::move(y2)};
}

std::pair<BitVector, BitVector> build_d2d_messages(const BitVector& y1, const BitVector& y2,
                                                   const DetConfig& cfg)
{
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.n_d);
    require_length(y1, n, "build_d2d_messages y1");
    require_length(y2, n, "build_d2d_messages y2");

    BitVector v1(static_cast<std::size_t>(cfg.d2d_bits()));
    BitVector v2(v1.size());
    // Level 2j (1-based) is index 2j - 1.
    for (std::size_t j = 0; j < v1.size(); ++j) {
        v1.set(j, y1[2 * j + 1] != 0);
        v2.set(j, y2[2 * j + 1] != 0);
    }
    return {std::move(v1), std::move(v2)};
}

BitVector sic_decode(const BitVector& y, const BitVector& v_other, const DetConfig& cfg, int ue)
{
    cfg.validate();
    if (ue != 1 && ue != 2) throw std::invalid_argument("sic_decode: ue must be 1 or 2");
    const auto n = static_cast<std::size_t>(cfg.n_d);
    require_length(y, n, "sic_decode y");
    require_length(v_other, static_cast<std::size_t>(cfg.d2d_bits()), "sic_decode v_other");

    // Odd level i carries own-EN bit + previous level's decoded bit; the
    // peer's even level 2j carries other-EN bit + our decoded bit at 2j - 1.
    BitVector out(n);
    out.set(0, y[0] != 0);
    for (std::size_t i = 1; i < n; ++i) {
        const std::uint8_t sum = (i % 2 == 1) ? v_other[i / 2] : y[i];
        out.set(i, (sum ^ out[i - 1]) != 0);
    }
    return out;
}

DetDeliveryResult run_det_delivery(const BitVector& payload_a, const BitVector& payload_b,
                                   const DetConfig& cfg, double r_d)
{
    cfg.validate();
    if (!(r_d > 0.0)) throw std::invalid_argument("run_det_delivery: r_d must be > 0");
    if (payload_a.size() != payload_b.size())
        throw std::invalid_argument("run_det_delivery: payload lengths differ");
    const std::size_t L = payload_a.size();
    const auto per_use = static_cast<std::size_t>(cfg.n_d - 1);
    if (L == 0 || L % per_use != 0)
        throw std::invalid_argument("run_det_delivery: payload length must be a positive multiple of n_d - 1");

    const auto n = static_cast<std::size_t>(cfg.n_d);
    const std::size_t half = L / 2;
    const std::size_t k = per_use / 2;
    const std::size_t uses = L / per_use;

    DetDeliveryResult res;
    res.decoded_a = BitVector(L);
    res.decoded_b = BitVector(L);

    for (std::size_t t = 0; t < uses; ++t) {
        BitVector x1(n), x2(n);
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t off = t * k + j;
            x1.set(2 * j, payload_a[off] != 0);              // odd levels -> UE 1
            x1.set(2 * j + 1, payload_b[off] != 0);          // even levels -> UE 2
            x2.set(2 * j, payload_b[half + off] != 0);       // odd levels -> UE 2
            x2.set(2 * j + 1, payload_a[half + off] != 0);   // even levels -> UE 1
        }
        const auto [y1, y2] = det_channel(x1, x2, cfg);
        const auto [v1, v2] = build_d2d_messages(y1, y2, cfg);
        const BitVector at1 = sic_decode(y1, v2, cfg, 1);
        const BitVector at2 = sic_decode(y2, v1, cfg, 2);
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t off = t * k + j;
            res.decoded_a.set(off, at1[2 * j] != 0);
            res.decoded_a.set(half + off, at1[2 * j + 1] != 0);
            res.decoded_b.set(half + off, at2[2 * j] != 0);
            res.decoded_b.set(off, at2[2 * j + 1] != 0);
        }
    }

    res.channel_uses = static_cast<std::int64_t>(uses);
    res.d2d_bits_per_use = cfg.d2d_bits();
    res.payload_bits_per_use = static_cast<std::int64_t>(per_use);
    res.latency.t_e = static_cast<double>(uses);
    res.latency.t_d = res.latency.t_e * cfg.d2d_bits() / (r_d * cfg.n_d);
    // n_d levels stand in for log2(P) bits per channel use.
    res.ndt = ndt_from_latency(res.latency, static_cast<double>(L), std::exp2(cfg.n_d));
    return res;
}

}  // namespace fran::det
