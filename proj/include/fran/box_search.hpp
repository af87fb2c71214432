// Exact nearest-point search over a boxed integer set projected to the plane:
// minimize |y - sum_j b_j c_j| over integers c_j in [lo_j, hi_j].
//
// Two columns form an inner 2x2 basis solved line by line; the remaining
// columns are enumerated depth-first with interval pruning in the inner
// basis coordinates. Nothing is materialized.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fran/model.hpp"

namespace fran {

class BoxSearch {
public:
    struct Result {
        std::vector<std::int64_t> c;
        double dist2 = 0.0;
    };

    /// `node_cap` bounds the search nodes visited per query; exceeding it
    /// throws std::length_error.
    BoxSearch(std::vector<cplx> cols, std::vector<std::int64_t> lo, std::vector<std::int64_t> hi,
              std::int64_t node_cap);

    /// Nearest point strictly closer than sqrt(bound2). With exclude_zero the
    /// all-zero vector is not a candidate.
    std::optional<Result> nearest_within(cplx y, double bound2, bool exclude_zero = false) const;

    /// Exact nearest point (radius doubling over nearest_within).
    Result nearest(cplx y) const;

    std::size_t dims() const { return cols_.size(); }

private:
    struct State;
    void descend(State& st, std::size_t level, cplx resid) const;
    void solve_inner(State& st, cplx resid) const;

    std::vector<cplx> cols_;
    std::vector<std::int64_t> lo_, hi_;
    std::int64_t cap_;

    int in0_ = 0, in1_ = 1;            // inner pair, in0_ the shorter column
    double r00_ = 1, r01_ = 0, r11_ = 1;  // inner basis in the frame of column in0_
    cplx axis_{1, 0};                   // unit vector along column in0_
    double minv_[2][2] = {{1, 0}, {0, 1}};
    double row_norm_[2] = {1, 1};
    std::vector<int> outer_;            // outer column order
    std::vector<std::array<double, 2>> w_;  // M^-1 b for outer columns, in outer_ order
    // Per level: bounds of u reachable by inner box plus outer columns at and below the level.
    std::vector<std::array<double, 2>> reach_lo_, reach_hi_;
};

}  // namespace fran
