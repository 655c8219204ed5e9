#ifndef LDMO_VERIFY_HPP
#define LDMO_VERIFY_HPP

#include "geometry.hpp"
#include "objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace ldmo {

struct VerifyParams {
    double probe_radius = 1e-3;
    std::size_t probe_count = 64;
    double grad_eps = 1e-6;
    double cluster_tol = 0.25;
    double grad_tol = 1e-2;
    double probe_tol = 1e-9;

    void validate() const
    {
        if (!(probe_radius > 0.0) || probe_count == 0 || !(grad_eps > 0.0) ||
            !(cluster_tol > 0.0) || !(grad_tol > 0.0) || !(probe_tol > 0.0)) {
            throw ConfigError("verify: all parameters must be strictly positive");
        }
    }
};

namespace detail {

// Unit vectors spread over the sphere: exact angles in 2-D, +-1 in 1-D and a
// fixed-seed sample otherwise. Deterministic for a given (n, count).
inline std::vector<std::vector<double>> sphere_directions(std::size_t n, std::size_t count)
{
    std::vector<std::vector<double>> dirs;
    dirs.reserve(count);
    if (n == 1) {
        for (std::size_t k = 0; k < count; ++k) {
            dirs.push_back({k % 2 == 0 ? 1.0 : -1.0});
        }
    } else if (n == 2) {
        for (std::size_t k = 0; k < count; ++k) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
            dirs.push_back({std::cos(t), std::sin(t)});
        }
    } else {
        Rng rng(0x5eed5eedULL);
        for (std::size_t k = 0; k < count; ++k) {
            const Direction d = sample_direction(rng, n);
            dirs.emplace_back(d.coords().begin(), d.coords().end());
        }
    }
    return dirs;
}

} // namespace detail

inline double fd_gradient_norm(std::span<const double> p, const ObjectiveSpec& spec, double eps)
{
    Point q(p.begin(), p.end());
    double norm2 = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double xi = q[i];
        q[i] = xi + eps;
        const double fp = spec.evaluate(q);
        q[i] = xi - eps;
        const double fm = spec.evaluate(q);
        q[i] = xi;
        const double g = (fp - fm) / (2.0 * eps);
        norm2 += g * g;
    }
    return std::sqrt(norm2);
}

/// A point is accepted as a local minimum when its central-difference
/// gradient is small and no probe on a small sphere around it is lower.
inline bool is_local_optimum(std::span<const double> p, const ObjectiveSpec& spec,
                             const VerifyParams& params = {})
{
    if (p.size() != spec.dim()) {
        throw ContractViolation("is_local_optimum: dimension mismatch");
    }
    if (fd_gradient_norm(p, spec, params.grad_eps) >= params.grad_tol) {
        return false;
    }
    const double fp = spec.evaluate(p);
    Point q(p.size());
    for (const auto& d : detail::sphere_directions(p.size(), params.probe_count)) {
        for (std::size_t i = 0; i < q.size(); ++i) {
            q[i] = p[i] + params.probe_radius * d[i];
        }
        if (spec.evaluate(clip_to_bounds(q, spec.bounds())) < fp - params.probe_tol) {
            return false;
        }
    }
    return true;
}

struct DistinctOptima {
    std::size_t count = 0;
    std::vector<Solution> representatives;
};

/// Keeps the solutions that verify as local optima and clusters them greedily
/// best-first: a solution closer than cluster_tol to an existing
/// representative joins it, otherwise it becomes a new representative.
inline DistinctOptima count_distinct_optima(std::span<const Solution> solutions,
                                            const ObjectiveSpec& spec,
                                            const VerifyParams& params = {})
{
    std::vector<Solution> verified;
    for (const Solution& s : solutions) {
        if (is_local_optimum(s.point, spec, params)) {
            verified.push_back(s);
        }
    }
    std::sort(verified.begin(), verified.end(), [](const Solution& a, const Solution& b) {
        return a.value != b.value ? a.value < b.value : a.id < b.id;
    });

    DistinctOptima out;
    for (Solution& s : verified) {
        const bool joins = std::any_of(out.representatives.begin(), out.representatives.end(),
                                       [&](const Solution& r) {
                                           return euclidean(r.point, s.point) < params.cluster_tol;
                                       });
        if (!joins) {
            out.representatives.push_back(std::move(s));
        }
    }
    out.count = out.representatives.size();
    return out;
}

} // namespace ldmo

#endif
