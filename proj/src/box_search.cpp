#include "fran/box_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fran {

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

}  // namespace

struct BoxSearch::State {
    cplx y;
    double best2;
    bool exclude_zero;
    bool found = false;
    std::vector<std::int64_t> cur;
    std::vector<std::int64_t> best;
    std::int64_t nodes = 0;
    std::int64_t cap;
    int nonzero_outer = 0;

    void tick()
    {
        if (++nodes > cap)
            throw std::length_error("nearest-point search visited more than " + std::to_string(cap) +
                                    " nodes");
    }
};

BoxSearch::BoxSearch(std::vector<cplx> cols, std::vector<std::int64_t> lo, std::vector<std::int64_t> hi,
                     std::int64_t node_cap)
    : cols_(std::move(cols)), lo_(std::move(lo)), hi_(std::move(hi)), cap_(node_cap)
{
    const std::size_t n = cols_.size();
    if (n < 2 || lo_.size() != n || hi_.size() != n)
        throw std::invalid_argument("BoxSearch: need at least two columns with matching bounds");
    for (std::size_t j = 0; j < n; ++j)
        if (lo_[j] > hi_[j]) throw std::invalid_argument("BoxSearch: empty range");

    // Inner pair: cheapest estimated leaf work |det| + 2 min(|b_j|, |b_k|),
    // skipping nearly parallel pairs when possible.
    double best_cost = std::numeric_limits<double>::infinity();
    bool have = false;
    for (int pass = 0; pass < 2 && !have; ++pass) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const double det = std::abs(cross(cols_[j], cols_[k]));
                const double nj = std::abs(cols_[j]), nk = std::abs(cols_[k]);
                if (!(det > 0.0)) continue;
                if (pass == 0 && det < 1e-3 * nj * nk) continue;
                const double cost = det + 2.0 * std::min(nj, nk);
                if (cost < best_cost) {
                    best_cost = cost;
                    in0_ = static_cast<int>(nj <= nk ? j : k);
                    in1_ = static_cast<int>(nj <= nk ? k : j);
                    have = true;
                }
            }
    }
    if (!have) throw std::invalid_argument("BoxSearch: columns are collinear");

    const cplx b0 = cols_[in0_], b1 = cols_[in1_];
    r00_ = std::abs(b0);
    axis_ = b0 / r00_;
    const cplx b1r = b1 * std::conj(axis_);
    r01_ = b1r.real();
    r11_ = b1r.imag();

    const double det = cross(b0, b1);
    minv_[0][0] = b1.imag() / det;
    minv_[0][1] = -b1.real() / det;
    minv_[1][0] = -b0.imag() / det;
    minv_[1][1] = b0.real() / det;
    for (int d = 0; d < 2; ++d) row_norm_[d] = std::hypot(minv_[d][0], minv_[d][1]);

    for (std::size_t j = 0; j < n; ++j)
        if (static_cast<int>(j) != in0_ && static_cast<int>(j) != in1_) outer_.push_back(static_cast<int>(j));
    std::stable_sort(outer_.begin(), outer_.end(), [&](int a, int b) {
        return std::abs(cols_[a]) * static_cast<double>(hi_[a] - lo_[a]) >
               std::abs(cols_[b]) * static_cast<double>(hi_[b] - lo_[b]);
    });

    const std::size_t m = outer_.size();
    w_.resize(m);
    for (std::size_t l = 0; l < m; ++l) {
        const cplx b = cols_[outer_[l]];
        w_[l] = {minv_[0][0] * b.real() + minv_[0][1] * b.imag(), minv_[1][0] * b.real() + minv_[1][1] * b.imag()};
    }
    reach_lo_.assign(m + 1, {0.0, 0.0});
    reach_hi_.assign(m + 1, {0.0, 0.0});
    const std::int64_t in_lo[2] = {lo_[in0_], lo_[in1_]};
    const std::int64_t in_hi[2] = {hi_[in0_], hi_[in1_]};
    for (int d = 0; d < 2; ++d) {
        reach_lo_[m][d] = static_cast<double>(in_lo[d]);
        reach_hi_[m][d] = static_cast<double>(in_hi[d]);
    }
    for (std::size_t l = m; l-- > 0;) {
        const int j = outer_[l];
        for (int d = 0; d < 2; ++d) {
            const double a = w_[l][d] * static_cast<double>(lo_[j]);
            const double b = w_[l][d] * static_cast<double>(hi_[j]);
            reach_lo_[l][d] = reach_lo_[l + 1][d] + std::min(a, b);
            reach_hi_[l][d] = reach_hi_[l + 1][d] + std::max(a, b);
        }
    }
}

void BoxSearch::solve_inner(State& st, cplx resid) const
{
    const cplx v = resid * std::conj(axis_);
    const double vp = v.real(), vq = v.imag();
    const double r = std::sqrt(st.best2);
    const std::int64_t lo0 = lo_[in0_], hi0 = hi_[in0_];
    std::int64_t lo1 = lo_[in1_], hi1 = hi_[in1_];
    // |c1 r11 - vq| < r
    const double t0 = (vq - r) / r11_, t1 = (vq + r) / r11_;
    const double tmin = std::min(t0, t1), tmax = std::max(t0, t1);
    if (tmax < static_cast<double>(lo1) || tmin > static_cast<double>(hi1)) return;
    lo1 = std::max<std::int64_t>(lo1, static_cast<std::int64_t>(std::ceil(tmin)));
    hi1 = std::min<std::int64_t>(hi1, static_cast<std::int64_t>(std::floor(tmax)));

    const bool outer_zero = st.exclude_zero && st.nonzero_outer == 0;
    for (std::int64_t c1 = lo1; c1 <= hi1; ++c1) {
        st.tick();
        const double e1 = static_cast<double>(c1) * r11_ - vq;
        const double rem = st.best2 - e1 * e1;
        if (!(rem > 0.0)) continue;
        const double centre = (vp - static_cast<double>(c1) * r01_) / r00_;
        auto err2 = [&](std::int64_t c0) {
            const double e0 = static_cast<double>(c0) * r00_ + static_cast<double>(c1) * r01_ - vp;
            return e0 * e0 + e1 * e1;
        };
        const double rc = std::clamp(std::nearbyint(centre), static_cast<double>(lo0), static_cast<double>(hi0));
        std::int64_t c0 = static_cast<std::int64_t>(rc);
        double d2 = err2(c0);
        if (outer_zero && c1 == 0 && c0 == 0) {
            // Next best on this line: the neighbour on the closer side.
            d2 = std::numeric_limits<double>::infinity();
            for (std::int64_t alt : {std::int64_t{-1}, std::int64_t{1}}) {
                if (alt < lo0 || alt > hi0) continue;
                const double a2 = err2(alt);
                if (a2 < d2) {
                    d2 = a2;
                    c0 = alt;
                }
            }
        }
        if (d2 < st.best2) {
            st.best2 = d2;
            st.found = true;
            st.cur[in0_] = c0;
            st.cur[in1_] = c1;
            st.best = st.cur;
        }
    }
}

void BoxSearch::descend(State& st, std::size_t level, cplx resid) const
{
    st.tick();
    if (level == outer_.size()) {
        solve_inner(st, resid);
        return;
    }
    const int j = outer_[level];
    const double r = std::sqrt(st.best2);
    const double u[2] = {minv_[0][0] * resid.real() + minv_[0][1] * resid.imag(),
                         minv_[1][0] * resid.real() + minv_[1][1] * resid.imag()};
    // Need u - w c in [reach_lo(level+1) - r|row|, reach_hi(level+1) + r|row|] per coordinate.
    double cmin = static_cast<double>(lo_[j]), cmax = static_cast<double>(hi_[j]);
    for (int d = 0; d < 2; ++d) {
        const double slack = r * row_norm_[d];
        const double lo_t = u[d] - (reach_hi_[level + 1][d] + slack);
        const double hi_t = u[d] - (reach_lo_[level + 1][d] - slack);
        const double w = w_[level][d];
        if (w == 0.0) {
            if (lo_t > 0.0 || hi_t < 0.0) return;
            continue;
        }
        const double a = lo_t / w, b = hi_t / w;
        cmin = std::max(cmin, std::min(a, b));
        cmax = std::min(cmax, std::max(a, b));
    }
    if (cmin > cmax) return;
    const auto c_lo = static_cast<std::int64_t>(std::ceil(cmin));
    const auto c_hi = static_cast<std::int64_t>(std::floor(cmax));
    for (std::int64_t c = c_lo; c <= c_hi; ++c) {
        st.cur[j] = c;
        if (c != 0) ++st.nonzero_outer;
        descend(st, level + 1, resid - cols_[j] * static_cast<double>(c));
        if (c != 0) --st.nonzero_outer;
    }
    st.cur[j] = 0;
}

std::optional<BoxSearch::Result> BoxSearch::nearest_within(cplx y, double bound2, bool exclude_zero) const
{
    State st;
    st.y = y;
    st.best2 = bound2;
    st.exclude_zero = exclude_zero;
    st.cap = cap_;
    st.cur.assign(cols_.size(), 0);
    descend(st, 0, y);
    if (!st.found) return std::nullopt;
    return Result{std::move(st.best), st.best2};
}

BoxSearch::Result BoxSearch::nearest(cplx y) const
{
    double r = std::numeric_limits<double>::infinity();
    for (const cplx& b : cols_) r = std::min(r, std::abs(b));
    if (!(r > 0.0)) r = 1.0;
    r *= 0.5;
    for (;;) {
        if (auto hit = nearest_within(y, r * r)) return std::move(*hit);
        r *= 2.0;
        if (!std::isfinite(r)) throw std::runtime_error("BoxSearch::nearest: no point found");
    }
}

}  // namespace fran
