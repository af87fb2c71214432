// Real interference alignment with receiver cooperation for the X-channel
// at mu = 1/2, r_F = 0.
//
// Each EN superposes n_d layers of uncoded symbols from A*Z_Q with
// CSI-dependent precoder gains chosen so that layer a_i of EN 1 and layer
// b_{i-1} of EN 2 arrive on a common effective gain at UE 1 (and
// symmetrically at UE 2). A UE demodulates the n_d + 1 aligned sums by an
// exact nearest-point search, the UEs swap their even-indexed sums over
// D2D, and an integer subtraction chain recovers the individual symbols.
//
// Integer symbol indices are carried everywhere; the constellation scale A
// only enters when forming complex signals.
#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "fran/model.hpp"
#include "fran/box_search.hpp"

namespace fran::ia {

inline constexpr std::int64_t kDefaultSearchCap = 10'000'000;

struct PrecoderGains {
    int n_d = 0;
    std::array<std::vector<cplx>, 2> g;  ///< g[m-1][i-1]

    cplx at(int en, int layer) const { return g.at(en - 1).at(layer - 1); }
};

/// Closed-form alignment precoders. Throws std::invalid_argument for even or < 3 n_d.
PrecoderGains precoder_gains(const Csi& csi, int n_d);

/// Largest |sum_{i in S} g_{m,i}| over ENs m and layer subsets S: the peak
/// transmit amplitude per unit of A (Q - 1).
double peak_amplitude_factor(const PrecoderGains& gains);

struct IaConfig {
    int n_d = 3;
    std::int64_t q = 2;      ///< constellation size Q
    double a = 1.0;          ///< constellation scale A = Q^((n_d-1)/2 + eps')
    double eps_prime = 0.05;
    double rho = 1.0;        ///< power-normalization constant rho(H, n_d)
    double power = 1.0;      ///< P
    double q_real = 2.0;     ///< rho P^(1/(n_d+1+2eps')) before rounding

    /// n_d + 1 + 2 eps'
    double exponent() const { return n_d + 1 + 2.0 * eps_prime; }
    /// Alphabet size of aligned value c_j, j in [0, n_d]: Q at the ends, 2Q - 1 inside.
    std::int64_t aligned_size(int j) const { return (j == 0 || j == n_d) ? q : 2 * q - 1; }
};

/// Picks Q = max(2, floor(rho P^(1/(n_d+1+2eps')))) with rho = M^(-2/(n_d+1+2eps')),
/// M = peak_amplitude_factor, so every realized |x_m|^2 stays below P.
/// Throws InfeasibleError when even Q = 2 violates the peak power budget.
IaConfig select_constellation(const Csi& csi, int n_d, double power, double eps_prime);

/// Configuration with an explicit Q; the power is set to the budget that
/// select_constellation would map back onto exactly this Q.
IaConfig config_for_q(const PrecoderGains& gains, std::int64_t q, double eps_prime);

/// Layer symbols as integer indices into Z_Q; the value of layer i is scale * index[i].
struct LayerSymbols {
    std::vector<std::int64_t> index;
    double scale = 1.0;

    double value(std::size_t i) const { return scale * static_cast<double>(index[i]); }
};

/// x1 = sum g_{1,i} a_i,  x2 = sum g_{2,i} b_i.
std::pair<cplx, cplx> encode(const LayerSymbols& a, const LayerSymbols& b,
                             const PrecoderGains& gains);

/// y_k = h_k1 x1 + h_k2 x2 + z_k.
std::pair<cplx, cplx> receive(cplx x1, cplx x2, const Csi& csi,
                              std::pair<cplx, cplx> noise = {});

/// Effective gains of the n_d + 1 aligned values at UE `ue`:
/// UE 1: {h11 g_{1,1}, ..., h11 g_{1,n_d}, h12 g_{2,n_d}}.
std::vector<cplx> effective_gains(const PrecoderGains& gains, const Csi& csi, int ue);

/// Aligned integer tuple at one UE. At UE 1: {a1, a2+b1, ..., a_nd+b_{nd-1}, b_nd}.
struct AlignedObservation {
    int ue = 1;
    std::vector<std::int64_t> c;

    friend bool operator==(const AlignedObservation&, const AlignedObservation&) = default;
};

/// Noise-free aligned tuple implied by the transmitted symbols.
AlignedObservation aligned_truth(const LayerSymbols& a, const LayerSymbols& b, int ue);

/// Exact nearest-point demodulator over Z_Q x Z_{2Q-1}^(n_d-1) x Z_Q (scaled
/// by A). The cap bounds the search nodes visited per received sample.
class LayerDemodulator {
public:
    LayerDemodulator(const PrecoderGains& gains, const Csi& csi, const IaConfig& cfg, int ue,
                     std::int64_t search_cap = kDefaultSearchCap);

    AlignedObservation demodulate(cplx y) const;
    int ue() const { return ue_; }

private:
    int ue_;
    BoxSearch search_;
};

/// One-shot wrapper over LayerDemodulator. Throws std::length_error past the cap.
AlignedObservation demodulate_layers(cplx y, const PrecoderGains& gains, const Csi& csi,
                                     const IaConfig& cfg, int ue,
                                     std::int64_t search_cap = kDefaultSearchCap);

/// Minimum pairwise distance of the noiseless received constellation at UE
/// `ue`, searched over nonzero index differences; +inf when Q = 1.
double min_distance(const PrecoderGains& gains, const Csi& csi, const IaConfig& cfg, int ue,
                    std::int64_t search_cap = kDefaultSearchCap);

/// Even-indexed aligned values {c_2, c_4, ..., c_{n_d-1}} of each UE.
std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>
d2d_exchange(const AlignedObservation& obs1, const AlignedObservation& obs2);

struct SicResult {
    /// UE 1: {a1, b2, a3, ..., a_nd, b_nd}; UE 2: {b1, a2, b3, ..., b_nd, a_nd}.
    std::vector<std::int64_t> symbols;
    bool ok = true;  ///< false when an intermediate left Z_Q
};

SicResult sic_resolve(const AlignedObservation& obs, const std::vector<std::int64_t>& v_other,
                      std::int64_t q);

/// Symbols a UE recovers, in the order sic_resolve returns them.
std::vector<std::int64_t> expected_resolution(const LayerSymbols& a, const LayerSymbols& b, int ue);

/// Full per-channel-use pipeline for fixed CSI and constellation.
class IaLink {
public:
    IaLink(const Csi& csi, const IaConfig& cfg, std::int64_t search_cap = kDefaultSearchCap);

    struct UseResult {
        std::array<AlignedObservation, 2> observed;
        std::array<SicResult, 2> resolved;
    };

    UseResult transmit(const LayerSymbols& a, const LayerSymbols& b,
                       std::pair<cplx, cplx> noise = {}) const;

    const IaConfig& config() const { return cfg_; }
    const PrecoderGains& gains() const { return gains_; }

private:
    Csi csi_;
    IaConfig cfg_;
    PrecoderGains gains_;
    LayerDemodulator demod1_;
    LayerDemodulator demod2_;
};

struct DeliveryReport {
    double symbol_error_rate = 0.0;
    std::int64_t symbol_errors = 0;
    std::int64_t symbols = 0;
    std::int64_t decode_failures = 0;  ///< uses where some SIC chain left Z_Q
    LatencyBreakdown latency;
    NdtValue ndt_estimate;
    IaConfig config;
    double payload_bits = 0.0;  ///< per UE: n_uses (n_d - 1) log2 Q
};

/// Runs n_uses channel uses with fresh uniform symbols. CSI comes from
/// draw_csi(seed); symbols and noise use independent streams derived from
/// the seed, so the noise sequence is shared across power levels.
DeliveryReport run_ia_delivery(std::uint64_t seed, int n_d, double eps_prime, double power,
                               double r_d, int n_uses, bool noiseless = false);

/// ((n_d+1+2e)/(n_d-1)) (1 + (log2(2Q)/log2 P)(n_d-1)/(2 r_D)) with e implied by
/// log2 Q = log2 P / (n_d+1+2e).
double ia_ndt_identity(int n_d, std::int64_t q, double power, double r_d);

}  // namespace fran::ia
