#ifndef LDMO_LINESEARCH_HPP
#define LDMO_LINESEARCH_HPP

#include "geometry.hpp"
#include "objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

namespace ldmo {

struct LineSearchParams {
    std::size_t scan_points = 20;
    std::size_t refine_iters = 40;
    double alpha_min = 1e-6;

    void validate() const
    {
        if (scan_points < 3) {
            throw ConfigError("line search: scan_points must be >= 3");
        }
        if (refine_iters < 1) {
            throw ConfigError("line search: refine_iters must be >= 1");
        }
        if (!(alpha_min > 0.0) || !std::isfinite(alpha_min)) {
            throw ConfigError("line search: alpha_min must be positive");
        }
    }

    /// Objective evaluations spent by one maximize_ld_along call that finds
    /// room on its ray: two per probe (candidate and midpoint).
    std::size_t evaluations_per_search() const { return 2 * (scan_points + refine_iters + 2); }
};

/// Largest alpha >= 0 keeping x + alpha * d inside b.
inline double alpha_max(std::span<const double> x, const Direction& d, const Bounds& b)
{
    if (x.size() != d.dim() || x.size() != b.dim()) {
        throw ContractViolation("alpha_max: dimension mismatch");
    }
    double amax = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (d[i] > 0.0) {
            amax = std::min(amax, (b.upper[i] - x[i]) / d[i]);
        } else if (d[i] < 0.0) {
            amax = std::min(amax, (b.lower[i] - x[i]) / d[i]);
        }
    }
    return std::max(0.0, amax);
}

/// Golden-section maximization of g over [a, b]. Performs `iters` interval
/// reductions using iters + 1 evaluations of g and returns the midpoint of
/// the final interval.
template <typename G>
    requires std::invocable<G&, double>
double golden_section_max(G&& g, double a, double b, std::size_t iters)
{
    if (!(a < b)) {
        throw ContractViolation("golden_section_max: need a < b");
    }
    if (iters == 0) {
        throw ContractViolation("golden_section_max: iters must be >= 1");
    }
    constexpr double r = 0.6180339887498949; // (sqrt(5) - 1) / 2
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double gc = g(c);
    double gd = g(d);
    for (std::size_t k = 0; k < iters; ++k) {
        const bool more = k + 1 < iters;
        if (gc >= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            if (more) {
                gc = g(c);
            }
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            if (more) {
                gd = g(d);
            }
        }
    }
    return 0.5 * (a + b);
}

struct LineSearchResult {
    double alpha = 0.0;
    Point candidate;
    double value = 0.0; ///< f(candidate)
    double ld = 0.0;    ///< line_distance(candidate, parent)
};

/// Maximizes g(alpha) = line_distance(x + alpha d, x) over
/// [alpha_min, alpha_max(x, d)].
///
/// A uniform scan of scan_points values localizes the best hump of g, then
/// golden-section refinement runs on the bracket formed by the best scan
/// point's neighbours, and finally the bracket midpoint is probed. The best
/// probe overall is returned. Returns nullopt if the ray has no room
/// (alpha_max <= alpha_min).
inline std::optional<LineSearchResult> maximize_ld_along(const Solution& x, const Direction& d,
                                                         const ObjectiveSpec& spec,
                                                         const LineSearchParams& params)
{
    const double amax = alpha_max(x.point, d, spec.bounds());
    if (!(amax > params.alpha_min)) {
        return std::nullopt;
    }

    LineSearchResult best;
    best.ld = -1.0;
    const Bounds& b = spec.bounds();
    Point q(x.point.size());
    auto probe = [&](double alpha) {
        for (std::size_t i = 0; i < q.size(); ++i) {
            q[i] = std::clamp(x.point[i] + alpha * d[i], b.lower[i], b.upper[i]);
        }
        const double fq = spec.evaluate(q);
        const double ld = line_distance(q, fq, x.point, x.value, spec);
        if (ld > best.ld) {
            best.alpha = alpha;
            best.candidate = q;
            best.value = fq;
            best.ld = ld;
        }
        return ld;
    };

    const std::size_t n_scan = params.scan_points;
    const double h = (amax - params.alpha_min) / static_cast<double>(n_scan - 1);
    auto scan_alpha = [&](std::size_t k) {
        return k + 1 == n_scan ? amax : params.alpha_min + h * static_cast<double>(k);
    };
    std::size_t k_best = 0;
    double g_best = -1.0;
    for (std::size_t k = 0; k < n_scan; ++k) {
        const double g = probe(scan_alpha(k));
        if (g > g_best) {
            g_best = g;
            k_best = k;
        }
    }

    const double lo = scan_alpha(k_best == 0 ? 0 : k_best - 1);
    const double hi = scan_alpha(std::min(k_best + 1, n_scan - 1));
    const double mid = golden_section_max(probe, lo, hi, params.refine_iters);
    probe(mid);
    return best;
}

} // namespace ldmo

#endif
