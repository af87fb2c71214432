// Linear deterministic X-channel over GF(2) with one-round D2D exchange of
// even-level outputs and successive interference cancellation at the UEs.
//
// Levels are 1-based in the documentation and 0-based in storage: level 1
// (index 0) is the most significant level, received interference-free.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

#include "fran/model.hpp"

namespace fran::det {

struct DetConfig {
    int n_d = 3;  ///< direct levels, odd and >= 3
    int n_c = 2;  ///< cross levels, n_d - 1

    static DetConfig make(int n_d);
    void validate() const;
    int shift() const { return n_d - n_c; }
    /// Number of even levels 2, 4, ..., n_d - 1.
    int d2d_bits() const { return (n_d - 1) / 2; }
};

/// GF(2) vector with entries stored as 0/1 bytes.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n) : bits_(n, 0) {}
    BitVector(std::initializer_list<int> bits);
    explicit BitVector(std::vector<std::uint8_t> bits);

    std::size_t size() const { return bits_.size(); }
    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// y1 = x1 + S^(n_d-n_c) x2,  y2 = S^(n_d-n_c) x1 + x2 over GF(2).
std::pair<BitVector, BitVector> det_channel(const BitVector& x1, const BitVector& x2,
                                            const DetConfig& cfg);

/// (v1, v2): the even-level bits of y1 and y2, each (n_d - 1)/2 long.
std::pair<BitVector, BitVector> build_d2d_messages(const BitVector& y1, const BitVector& y2,
                                                   const DetConfig& cfg);

/// SIC at UE `ue` (1 or 2) from its own output and the peer's D2D message.
/// Returns n_d bits in level order: UE 1 gets {a1, b2, a3, ..., a_nd},
/// UE 2 gets {b1, a2, b3, ..., b_nd}.
BitVector sic_decode(const BitVector& y, const BitVector& v_other, const DetConfig& cfg, int ue);

struct DetDeliveryResult {
    BitVector decoded_a;  ///< file recovered at UE 1
    BitVector decoded_b;  ///< file recovered at UE 2
    LatencyBreakdown latency;
    NdtValue ndt;
    std::int64_t channel_uses = 0;
    std::int64_t d2d_bits_per_use = 0;  ///< per UE
    std::int64_t payload_bits_per_use = 0;  ///< fresh bits per UE
};

/// Delivers payload_a to UE 1 and payload_b to UE 2 with the mu = 1/2
/// placement (EN 1 caches first halves, EN 2 second halves) and no fronthaul.
/// Odd levels of an EN carry the UE it reaches directly at odd levels, even
/// levels the other UE; level n_d is a zero spare so both halves drain at
/// (n_d - 1)/2 bits per use. Throws std::invalid_argument on length or rate errors.
DetDeliveryResult run_det_delivery(const BitVector& payload_a, const BitVector& payload_b,
                                   const DetConfig& cfg, double r_d);

}  // namespace fran::det
