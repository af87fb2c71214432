// Domain types for the 2x2 D2D-aided F-RAN: scenario parameters, CSI,
// latency bookkeeping and the normalized delivery time (NDT).
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace fran {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised when a scheme cannot run at the requested operating point; the
/// message names the violated feasibility condition.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario tuple (mu, r_F, r_D, N, L, P).
struct SystemParams {
    double mu = 0.0;             ///< fractional cache size, 0 <= mu <= 1
    double r_f = 0.0;            ///< fronthaul rate, C_F = r_f log P
    double r_d = 0.0;            ///< D2D rate, C_D = r_d log P
    int n_files = 2;             ///< library size N >= 2
    std::int64_t file_bits = 1;  ///< L
    double power = 1024.0;       ///< linear SNR scale P > 0

    /// Throws std::invalid_argument naming the first violated bound.
    void validate() const;

    static SystemParams make(double mu, double r_f, double r_d);
};

/// Quasi-static 2x2 channel; h[k][m] is the gain from EN m to UE k.
struct Csi {
    cplx h11, h12, h21, h22;

    cplx determinant() const { return h11 * h22 - h12 * h21; }
    /// Gain from EN `en` (1-based) to UE `ue` (1-based).
    cplx gain(int ue, int en) const;
    bool is_valid() const;

    friend bool operator==(const Csi&, const Csi&) = default;
};

struct LatencyBreakdown {
    double t_f = 0.0;  ///< fronthaul, downlink channel uses
    double t_e = 0.0;  ///< edge transmission
    double t_d = 0.0;  ///< D2D exchange

    double total() const { return t_f + t_e + t_d; }
    LatencyBreakdown& operator+=(const LatencyBreakdown& o);
};

/// Dimensionless delivery time. +inf is a legal value (infeasible delivery).
class NdtValue {
public:
    constexpr NdtValue() = default;
    constexpr explicit NdtValue(double v) : value_(v) {}

    static constexpr NdtValue infinite() { return NdtValue(kInf); }

    constexpr double value() const { return value_; }
    bool is_infinite() const { return value_ == kInf; }

    /// Equality that treats +inf == +inf and otherwise uses an absolute tolerance.
    bool near(NdtValue other, double tol) const;

    friend constexpr auto operator<=>(NdtValue, NdtValue) = default;

private:
    double value_ = 0.0;
};

std::string to_string(NdtValue v);

struct DemandVector {
    int d1 = 1;
    int d2 = 2;

    void validate(int n_files) const;
    bool worst_case() const { return d1 != d2; }
};

/// Circularly-symmetric complex Gaussian with unit variance (1/2 per real dimension).
class ComplexGaussian {
public:
    template <class Rng>
    cplx operator()(Rng& rng)
    {
        const double re = g_(rng);
        return {re, g_(rng)};
    }

private:
    std::normal_distribution<double> g_{0.0, std::sqrt(0.5)};
};

/// Circularly-symmetric unit-variance complex Gaussian draws, rejecting
/// non-generic realizations. Throws std::runtime_error after 100 rejections.
Csi draw_csi(std::uint64_t rng_seed);

/// Rejection loop behind draw_csi, parameterized on the entry sampler.
Csi draw_csi_from(const std::function<cplx()>& sample_entry);

/// (t_f + t_e + t_d) log2(P) / L. Throws std::domain_error for P <= 1 or L < 1.
NdtValue ndt_from_latency(const LatencyBreakdown& lat, double file_bits, double power);

}  // namespace fran
