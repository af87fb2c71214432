#include "fran/model.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fran {

void SystemParams::validate() const
{
    if (!(mu >= 0.0 && mu <= 1.0))
        throw std::invalid_argument("mu must lie in [0, 1], got " + std::to_string(mu));
    if (!(r_f >= 0.0) || std::isnan(r_f))
        throw std::invalid_argument("r_f must be >= 0, got " + std::to_string(r_f));
    if (!(r_d >= 0.0) || std::isnan(r_d))
        throw std::invalid_argument("r_d must be >= 0, got " + std::to_string(r_d));
    if (n_files < 2)
        throw std::invalid_argument("library size N must be >= 2");
    if (file_bits < 1)
        throw std::invalid_argument("file size L must be >= 1 bit");
    if (!(power > 0.0))
        throw std::invalid_argument("power P must be > 0");
}

SystemParams SystemParams::make(double mu, double r_f, double r_d)
{
    SystemParams p;
    p.mu = mu;
    p.r_f = r_f;
    p.r_d = r_d;
    p.validate();
    return p;
}

cplx Csi::gain(int ue, int en) const
{
    if (ue == 1 && en == 1) return h11;
    if (ue == 1 && en == 2) return h12;
    if (ue == 2 && en == 1) return h21;
    if (ue == 2 && en == 2) return h22;
    throw std::out_of_range("Csi::gain: indices must be 1 or 2");
}

bool Csi::is_valid() const
{
    for (const cplx& h : {h11, h12, h21, h22}) {
        if (!std::isfinite(h.real()) || !std::isfinite(h.imag()) || h == cplx{})
            return false;
    }
    const cplx det = determinant();
    return std::isfinite(det.real()) && std::isfinite(det.imag()) && det != cplx{};
}

LatencyBreakdown& LatencyBreakdown::operator+=(const LatencyBreakdown& o)
{
    t_f += o.t_f;
    t_e += o.t_e;
    t_d += o.t_d;
    return *this;
}

bool NdtValue::near(NdtValue other, double tol) const
{
    if (is_infinite() || other.is_infinite())
        return is_infinite() && other.is_infinite();
    return std::abs(value_ - other.value_) <= tol;
}

std::string to_string(NdtValue v)
{
    if (v.is_infinite()) return "inf";
    std::ostringstream os;
    os.precision(12);
    os << v.value();
    return os.str();
}

void DemandVector::validate(int n_files) const
{
    if (d1 < 1 || d1 > n_files || d2 < 1 || d2 > n_files)
        throw std::invalid_argument("demand indices must lie in [1, N]");
}

Csi draw_csi_from(const std::function<cplx()>& sample_entry)
{
    constexpr int kMaxDraws = 100;
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
        Csi csi;
        csi.h11 = sample_entry();
        csi.h12 = sample_entry();
        csi.h21 = sample_entry();
        csi.h22 = sample_entry();
        if (csi.is_valid()) return csi;
    }
    throw std::runtime_error("draw_csi: 100 consecutive non-generic channel draws");
}

Csi draw_csi(std::uint64_t rng_seed)
{
    std::mt19937_64 rng(rng_seed);
    ComplexGaussian gauss;
    return draw_csi_from([&] { return gauss(rng); });
}

NdtValue ndt_from_latency(const LatencyBreakdown& lat, double file_bits, double power)
{
    if (!(power > 1.0))
        throw std::domain_error("NDT normalization needs P > 1");
    if (!(file_bits >= 1.0))
        throw std::domain_error("NDT normalization needs L >= 1");
    return NdtValue(lat.total() * std::log2(power) / file_bits);
}

}  // namespace fran
