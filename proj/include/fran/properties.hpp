// Theorem-level properties of the minimum NDT, checked over parameter grids.
#pragma once

#include <string>
#include <vector>

#include "fran/model.hpp"

namespace fran::props {

struct PropertyResult {
    bool passed = true;
    long checked = 0;
    long skipped = 0;     ///< points where the property is vacuous
    std::string detail;   ///< first counterexample, if any

    void fail(const std::string& why)
    {
        if (passed) detail = why;
        passed = false;
    }
};

/// mu in {0, 0.05, ..., 1}, r_F and r_D in {0, 0.25, ..., 3}.
std::vector<SystemParams> standard_grid();

/// Values start, start + step, ... up to stop inclusive, rounded to 12 decimals.
std::vector<double> inclusive_range(double start, double stop, double step);

/// best_achievable == minimum_ndt == lower_bound within tol.
PropertyResult check_tightness(const std::vector<SystemParams>& grid, double tol = 1e-9);
/// r_D <= max{1, r_F}: NDT equals its r_D = 0 value.
PropertyResult check_d2d_irrelevance(const std::vector<SystemParams>& grid);
/// r_D > max{1, r_F}, 0 < mu < 1: NDT strictly below its r_D = 0 value. Points
/// where both values are +inf are counted as skipped.
PropertyResult check_d2d_benefit(const std::vector<SystemParams>& grid);
/// r_D > max{1, r_F}, mu > 1/2: NDT does not depend on r_F.
PropertyResult check_no_fronthaul_needed(const std::vector<SystemParams>& grid);
/// Along mu at fixed (r_F, r_D): nonincreasing and convex (+inf only as a prefix).
PropertyResult check_convex_monotone(const std::vector<SystemParams>& grid);
/// 1 + 1/r_D > 1 + 1/(2 r_D) for every positive r_D of the grid.
PropertyResult check_baseline_ordering(const std::vector<SystemParams>& grid);

}  // namespace fran::props
