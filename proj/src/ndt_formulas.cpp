#include "fran/ndt_formulas.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fran/mutation.hpp"

namespace fran::ndt {

namespace {

void require_rate(double r, const char* name)
{
    if (!(r >= 0.0))
        throw std::invalid_argument(std::string(name) + " must be >= 0");
}

void require_odd_layers(int n_d)
{
    if (n_d < 3 || n_d % 2 == 0)
        throw std::invalid_argument("layer count n_d must be odd and >= 3, got " +
                                    std::to_string(n_d));
}

double max_ndt(double a, double b)
{
    // std::max on doubles is total here: no NaNs reach this point.
    return std::max(a, b);
}

}  // namespace

std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::BothSmall: return "BothSmall";
    case Regime::FronthaulDominant: return "FronthaulDominant";
    case Regime::D2dDominant: return "D2dDominant";
    }
    return "?";
}

double limit_ratio(double num, double den)
{
    if (num == 0.0) return 0.0;
    if (den == 0.0) return num > 0.0 ? kInf : -kInf;
    return num / den;
}

Regime classify_regime(double r_f, double r_d)
{
    if (r_f <= 1.0 && r_d <= 1.0) return Regime::BothSmall;
    if (r_f >= std::max(1.0, r_d)) return Regime::FronthaulDominant;
    return Regime::D2dDominant;
}

Regime classify_regime(const SystemParams& params)
{
    params.validate();
    return classify_regime(params.r_f, params.r_d);
}

NdtValue minimum_ndt(const SystemParams& params)
{
    params.validate();
    const double mu = params.mu;
    const double r_f = params.r_f;
    const double r_d = params.r_d;
    const double uncached = limit_ratio(1.0 - 2.0 * mu, r_f);

    double v = 0.0;
    switch (classify_regime(r_f, r_d)) {
    case Regime::BothSmall:
        v = max_ndt(1.0 + mu + uncached, 2.0 - mu);
        break;
    case Regime::FronthaulDominant:
        v = 1.0 + (1.0 - mu) / r_f;
        if (active_mutation() == Mutation::TheoremOffByOne) v += 1.0;
        break;
    case Regime::D2dDominant:
        v = max_ndt(1.0 + mu / r_d + uncached, 1.0 + (1.0 - mu) / r_d);
        break;
    }
    return NdtValue(v);
}

NdtValue delta_x(double r_d)
{
    require_rate(r_d, "r_d");
    if (r_d == 0.0) return NdtValue::infinite();
    return NdtValue(1.0 + 1.0 / (2.0 * r_d));
}

NdtValue delta_nd(int n_d, double r_d)
{
    require_odd_layers(n_d);
    require_rate(r_d, "r_d");
    if (r_d == 0.0) return NdtValue::infinite();
    const double n = n_d;
    return NdtValue((n + 1.0) / (n - 1.0) * (1.0 + (n - 1.0) / (2.0 * r_d * (n + 1.0))));
}

NdtValue det_ndt(int n_d, double r_d)
{
    require_odd_layers(n_d);
    require_rate(r_d, "r_d");
    if (r_d == 0.0) return NdtValue::infinite();
    const double n = n_d;
    return NdtValue(n / (n - 1.0) * (1.0 + (n - 1.0) / (2.0 * r_d * n)));
}

NdtValue zf_compress_forward_ndt(double r_d)
{
    require_rate(r_d, "r_d");
    if (r_d == 0.0) return NdtValue::infinite();
    return NdtValue(1.0 + 1.0 / r_d);
}

LinearBound& LinearBound::operator+=(const LinearBound& o)
{
    c_e += o.c_e;
    c_f += o.c_f;
    c_d += o.c_d;
    rhs += o.rhs;
    return *this;
}

LinearBound LinearBound::scaled(double weight) const
{
    auto mul = [weight](double x) { return weight == 0.0 ? 0.0 : weight * x; };
    return {mul(c_e), mul(c_f), mul(c_d), mul(rhs)};
}

double LinearBound::sum_bound() const
{
    const double c = std::max({c_e, c_f, c_d});
    if (c <= 0.0) return rhs > 0.0 ? kInf : 0.0;
    return limit_ratio(rhs, c);
}

std::array<LinearBound, 3> converse_inequalities(const SystemParams& params)
{
    const double mu = params.mu;
    return {{
        {1.0, params.r_f, params.r_d, 2.0 - mu},
        {0.0, 1.0, 0.0, limit_ratio(1.0 - 2.0 * mu, params.r_f)},
        {1.0, 0.0, 0.0, 1.0},
    }};
}

NdtValue lower_bound(const SystemParams& params)
{
    params.validate();
    const auto ineq = converse_inequalities(params);
    const double r_f = params.r_f;
    const double r_d = params.r_d;

    auto combine = [&](double w1, double w2, double w3) {
        LinearBound b = ineq[0].scaled(w1);
        b += ineq[1].scaled(w2);
        b += ineq[2].scaled(w3);
        return b.sum_bound();
    };

    double bound = ineq[2].sum_bound();
    switch (classify_regime(r_f, r_d)) {
    case Regime::BothSmall:
        bound = std::max({bound, combine(1.0, 0.0, 0.0), combine(1.0, 1.0 - r_f, 0.0)});
        break;
    case Regime::FronthaulDominant:
        bound = std::max(bound, combine(1.0, 0.0, r_f - 1.0));
        break;
    case Regime::D2dDominant:
        bound = std::max({bound, combine(1.0, 0.0, r_d - 1.0),
                          combine(1.0, r_d - r_f, r_d - 1.0)});
        break;
    }
    return NdtValue(bound);
}

}  // namespace fran::ndt
