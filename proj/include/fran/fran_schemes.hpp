// Corner-point delivery schemes of the 2x2 F-RAN, the time/memory-sharing
// scheduler over them, and end-to-end runs on random file bits.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "fran/model.hpp"

namespace fran::schemes {

enum class SchemeId {
    CacheZf,       ///< mu = 1: cooperative ZF from full caches
    SoftTransfer,  ///< mu = 0: quantized ZF samples over fronthaul
    IaNoD2d,       ///< mu = 1/2: EN coordination by alignment, NDT 3/2 (accounting only)
    FronthaulMix,  ///< mu = 1/2: half ZF, half soft transfer
    D2dXChannel,   ///< mu = 1/2: X-channel with D2D cooperation (deterministic model)
    D2dRealIa,     ///< mu = 1/2: same scheme at signal level via real alignment
};

std::string_view to_string(SchemeId id);
/// Cache corner a scheme operates at.
double mu_corner(SchemeId id);

using Bits = std::vector<std::uint8_t>;

/// Contiguous bit range [begin, end) of one file.
struct CacheSegment {
    int file = 0;  ///< 0-based
    std::int64_t begin = 0;
    std::int64_t end = 0;

    std::int64_t size() const { return end - begin; }
};

struct CachePlacement {
    double mu = 0.0;
    int n_files = 0;
    std::int64_t file_bits = 0;
    std::array<std::vector<CacheSegment>, 2> en;

    std::int64_t cached_bits(int en_index) const;  ///< 1-based EN
    std::int64_t capacity_bits() const;            ///< mu N L
    bool holds(int en_index, int file, std::int64_t bit) const;
};

/// mu = 0: empty caches; mu = 1/2: EN 1 first halves, EN 2 second halves;
/// mu = 1: everything. Throws std::invalid_argument for other mu, or an odd
/// file length at mu = 1/2.
CachePlacement cache_placement(double mu, int n_files, std::int64_t file_bits);

struct ZfReport {
    LatencyBreakdown latency;
    NdtValue ndt;           ///< high-SNR accounting value
    NdtValue ndt_estimate;  ///< (t_f + t_e + t_d) log2 P / L at this P
    std::int64_t levels_per_dim = 0;
    std::int64_t bits_per_use = 0;  ///< per UE
    double max_leakage = 0.0;       ///< max |cross-UE residue| / |intended|, noiseless
    double max_tx_power = 0.0;      ///< max |x_m|^2 transmitted
    double quant_noise_power = 0.0;  ///< mean |x_hat - x|^2 per EN (soft transfer)
    double sinr_db = 0.0;            ///< measured at the UEs
    std::int64_t bit_errors = 0;
    std::array<Bits, 2> decoded;
};

/// Cooperative ZF with channel-inverse precoding, peak power P per EN and
/// square QAM sized for an 8-sigma decision margin. Both ENs know both
/// payloads. Noise is skipped when `noise_seed` is empty.
/// Throws InfeasibleError when even 2 levels per dimension miss the margin.
ZfReport cache_zf_delivery(const Csi& csi, const std::array<Bits, 2>& payload, double power,
                           std::optional<std::uint64_t> noise_seed);

/// The cloud forms the ZF block and quantizes each sample per real dimension
/// with 2^ceil(log2(P)/2) levels spanning the sample's peak amplitude; the
/// ENs forward the quantized block. t_f = t_e * bits_per_sample / (r_F log2 P).
ZfReport soft_transfer_delivery(const Csi& csi, const std::array<Bits, 2>& payload, double power,
                                double r_f, std::optional<std::uint64_t> noise_seed);

NdtValue ia_no_d2d_ndt();

/// Best of {3/2, 1 + 1/(2 r_F), 1 + 1/(2 r_D)}, ties to the earlier entry.
std::pair<SchemeId, NdtValue> half_cache_scheme_ndt(double r_f, double r_d);

struct MixComponent {
    SchemeId scheme;
    double mu = 0.0;        ///< corner
    double fraction = 0.0;  ///< share of every file and of air time
};

struct SchemeMix {
    std::vector<MixComponent> parts;
    NdtValue ndt;
};

/// "IA:0.5+ZF:0.5"; "none" for an infeasible point.
std::string mix_label(const SchemeMix& mix);

/// Lower convex envelope of the corners (0, 1 + 1/r_F), (1/2, best half-cache
/// scheme), (1, 1) at params.mu. Infinite corners are left out; with no
/// feasible chord the mix is empty and the NDT is +inf.
SchemeMix best_achievable(const SystemParams& params);

struct EndToEndOptions {
    DemandVector demands{1, 2};
    int n_d = 5;             ///< layers for the D2D schemes
    double eps_prime = 0.05;  ///< real-alignment margin exponent
    bool noiseless = false;
};

struct EndToEndReport {
    SchemeId scheme = SchemeId::CacheZf;
    DemandVector demands;
    std::vector<Bits> files;
    std::array<Bits, 2> decoded;
    std::array<bool, 2> exact{false, false};
    std::int64_t bit_errors = 0;
    bool error_flagged = false;  ///< a decoder noticed an inconsistency
    LatencyBreakdown latency;
    NdtValue ndt;
};

/// Random files from `seed`, the scheme's placement at params.mu, delivery of
/// the demanded files and comparison against them.
/// Throws std::invalid_argument when params.mu is not the scheme's corner and
/// InfeasibleError when the scheme cannot run at these rates.
EndToEndReport run_end_to_end(const SystemParams& params, std::uint64_t seed, SchemeId scheme,
                              const EndToEndOptions& opts = {});

}  // namespace fran::schemes
