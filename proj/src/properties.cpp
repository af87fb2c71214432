#include "fran/properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "fran/fran_schemes.hpp"
#include "fran/ndt_formulas.hpp"

namespace fran::props {

namespace {

std::string describe(const SystemParams& p)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "mu=%g rf=%g rd=%g", p.mu, p.r_f, p.r_d);
    return buf;
}

SystemParams with(const SystemParams& p, double mu, double r_f, double r_d)
{
    SystemParams q = p;
    q.mu = mu;
    q.r_f = r_f;
    q.r_d = r_d;
    return q;
}

bool same(NdtValue a, NdtValue b) { return a.near(b, 1e-9); }

}  // namespace

std::vector<double> inclusive_range(double start, double stop, double step)
{
    if (!(step > 0.0)) throw std::invalid_argument("range step must be > 0");
    if (stop < start) throw std::invalid_argument("range stop is below start");
    std::vector<double> out;
    for (long i = 0;; ++i) {
        const double v = start + static_cast<double>(i) * step;
        if (v > stop + 1e-9 * step) break;
        out.push_back(std::round(v * 1e12) / 1e12);
    }
    return out;
}

std::vector<SystemParams> standard_grid()
{
    std::vector<SystemParams> grid;
    for (double mu : inclusive_range(0.0, 1.0, 0.05))
        for (double rf : inclusive_range(0.0, 3.0, 0.25))
            for (double rd : inclusive_range(0.0, 3.0, 0.25)) grid.push_back(SystemParams::make(mu, rf, rd));
    return grid;
}

PropertyResult check_tightness(const std::vector<SystemParams>& grid, double tol)
{
    PropertyResult r;
    for (const auto& p : grid) {
        ++r.checked;
        const NdtValue lo = ndt::lower_bound(p);
        const NdtValue th = ndt::minimum_ndt(p);
        const NdtValue ach = schemes::best_achievable(p).ndt;
        if (!lo.near(th, tol) || !th.near(ach, tol))
            r.fail(describe(p) + ": lower " + to_string(lo) + ", theorem " + to_string(th) + ", achievable " +
                   to_string(ach));
    }
    return r;
}

PropertyResult check_d2d_irrelevance(const std::vector<SystemParams>& grid)
{
    PropertyResult r;
    for (const auto& p : grid) {
        if (p.r_d > std::max(1.0, p.r_f)) continue;
        ++r.checked;
        const NdtValue with_d2d = ndt::minimum_ndt(p);
        const NdtValue without = ndt::minimum_ndt(with(p, p.mu, p.r_f, 0.0));
        if (!same(with_d2d, without))
            r.fail(describe(p) + ": " + to_string(with_d2d) + " vs " + to_string(without) + " at rd=0");
    }
    return r;
}

PropertyResult check_d2d_benefit(const std::vector<SystemParams>& grid)
{
    PropertyResult r;
    for (const auto& p : grid) {
        if (!(p.r_d > std::max(1.0, p.r_f)) || !(p.mu > 0.0 && p.mu < 1.0)) continue;
        const NdtValue with_d2d = ndt::minimum_ndt(p);
        const NdtValue without = ndt::minimum_ndt(with(p, p.mu, p.r_f, 0.0));
        if (with_d2d.is_infinite() && without.is_infinite()) {
            ++r.skipped;
            continue;
        }
        ++r.checked;
        if (!(with_d2d.value() < without.value() - 1e-12))
            r.fail(describe(p) + ": " + to_string(with_d2d) + " not below " + to_string(without));
    }
    return r;
}

PropertyResult check_no_fronthaul_needed(const std::vector<SystemParams>& grid)
{
    PropertyResult r;
    for (const auto& p : grid) {
        if (!(p.r_d > std::max(1.0, p.r_f)) || !(p.mu > 0.5)) continue;
        ++r.checked;
        const NdtValue v = ndt::minimum_ndt(p);
        const NdtValue no_fh = ndt::minimum_ndt(with(p, p.mu, 0.0, p.r_d));
        if (!same(v, no_fh)) r.fail(describe(p) + ": " + to_string(v) + " vs " + to_string(no_fh) + " at rf=0");
    }
    return r;
}

PropertyResult check_convex_monotone(const std::vector<SystemParams>& grid)
{
    PropertyResult r;
    std::map<std::pair<double, double>, std::vector<std::pair<double, double>>> curves;
    for (const auto& p : grid) curves[{p.r_f, p.r_d}].push_back({p.mu, ndt::minimum_ndt(p).value()});
    for (auto& [key, pts] : curves) {
        std::sort(pts.begin(), pts.end());
        ++r.checked;
        char buf[64];
        std::snprintf(buf, sizeof buf, "rf=%g rd=%g", key.first, key.second);
        bool seen_finite = false;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double v = pts[i].second;
            if (std::isinf(v)) {
                if (seen_finite) r.fail(std::string(buf) + ": +inf after a finite value");
                continue;
            }
            seen_finite = true;
            if (i > 0 && !std::isinf(pts[i - 1].second) && v > pts[i - 1].second + 1e-12)
                r.fail(std::string(buf) + ": increases in mu at mu=" + std::to_string(pts[i].first));
            if (i >= 2 && !std::isinf(pts[i - 2].second)) {
                const double x0 = pts[i - 2].first, x1 = pts[i - 1].first, x2 = pts[i].first;
                const double y0 = pts[i - 2].second, y1 = pts[i - 1].second;
                const double chord = y0 + (v - y0) * (x1 - x0) / (x2 - x0);
                if (y1 > chord + 1e-9) r.fail(std::string(buf) + ": not convex at mu=" + std::to_string(x1));
            }
        }
    }
    return r;
}

PropertyResult check_baseline_ordering(const std::vector<SystemParams>& grid)
{
    PropertyResult r;
    std::vector<double> rds;
    for (const auto& p : grid)
        if (p.r_d > 0.0) rds.push_back(p.r_d);
    std::sort(rds.begin(), rds.end());
    rds.erase(std::unique(rds.begin(), rds.end()), rds.end());
    for (double rd : rds) {
        ++r.checked;
        const NdtValue cf = ndt::zf_compress_forward_ndt(rd);
        const NdtValue dx = ndt::delta_x(rd);
        if (!(cf > dx)) r.fail("rd=" + std::to_string(rd) + ": " + to_string(cf) + " <= " + to_string(dx));
    }
    return r;
}

}  // namespace fran::props
