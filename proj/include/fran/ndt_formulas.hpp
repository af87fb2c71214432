// Closed-form minimum NDT of the 2x2 F-RAN with D2D links, its converse
// bound, and the per-scheme NDT expressions used by the scheduler.
#pragma once

#include <array>
#include <string>
#include <string_view>

#include "fran/model.hpp"

namespace fran::ndt {

enum class Regime {
    BothSmall,          ///< 0 <= r_F, r_D <= 1
    FronthaulDominant,  ///< r_F >= max{1, r_D}
    D2dDominant,        ///< r_D > max{1, r_F}
};

std::string_view to_string(Regime r);

/// num/den with the r_F -> 0 limit conventions: 0/0 -> 0, +x/0 -> +inf, -x/0 -> -inf.
double limit_ratio(double num, double den);

/// Boundaries are resolved in declaration order of Regime.
Regime classify_regime(double r_f, double r_d);
Regime classify_regime(const SystemParams& params);

/// Piecewise minimum NDT. +inf when mu < 1/2 and r_F = 0.
NdtValue minimum_ndt(const SystemParams& params);

/// X-channel with receiver cooperation: 1 + 1/(2 r_D); +inf at r_D = 0.
NdtValue delta_x(double r_d);

/// Finite-layer real-IA NDT ((n+1)/(n-1)) (1 + (n-1)/(2 r_D (n+1))).
/// Throws std::invalid_argument for even or < 3 layer counts.
NdtValue delta_nd(int n_d, double r_d);

/// Deterministic-model NDT (n/(n-1)) (1 + (n-1)/(2 r_D n)) before the n -> inf limit.
NdtValue det_ndt(int n_d, double r_d);

/// Compress-and-forward with ZF equalization at the UEs: 1 + 1/r_D.
NdtValue zf_compress_forward_ndt(double r_d);

/// One asymptotic converse inequality  c_e t_e + c_f t_f + c_d t_d >= rhs,
/// where t_x = T_x log(P) / L as L, P -> inf.
struct LinearBound {
    double c_e = 0.0;
    double c_f = 0.0;
    double c_d = 0.0;
    double rhs = 0.0;

    LinearBound& operator+=(const LinearBound& o);
    /// Scales every term; 0 * (+-inf) is taken as 0 so unused terms vanish.
    LinearBound scaled(double weight) const;
    /// Lower bound on t_e + t_f + t_d implied by this inequality alone.
    double sum_bound() const;
};

/// The three cut-set inequalities of the converse, normalized by L log P:
///   [0] t_e + r_F t_f + r_D t_d >= 2 - mu
///   [1] t_f >= (1 - 2 mu) / r_F
///   [2] t_e >= 1
std::array<LinearBound, 3> converse_inequalities(const SystemParams& params);

/// Regime-specific combination of the converse inequalities, floored at 1.
NdtValue lower_bound(const SystemParams& params);

}  // namespace fran::ndt
