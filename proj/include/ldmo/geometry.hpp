#ifndef LDMO_GEOMETRY_HPP
#define LDMO_GEOMETRY_HPP

#include "objective.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ldmo {

/// Default random stream. All draws go through unit_uniform so the number of
/// 64-bit words consumed per operation is fixed and documented.
using Rng = std::mt19937_64;

template <typename G>
concept Rng64 = std::uniform_random_bit_generator<G> && requires {
    requires G::min() == 0;
    requires G::max() == UINT64_MAX;
};

/// Uniform double in [0, 1) from exactly one 64-bit draw.
template <Rng64 G>
double unit_uniform(G& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi] from exactly one 64-bit draw.
template <Rng64 G>
double uniform_in(G& rng, double lo, double hi)
{
    return std::min(hi, lo + (hi - lo) * unit_uniform(rng));
}

/// Unit-norm search direction.
class Direction {
public:
    /// Normalizes `v`; throws ContractViolation if `v` is (numerically) zero.
    static Direction normalized(std::vector<double> v)
    {
        double norm2 = 0.0;
        for (double c : v) {
            norm2 += c * c;
        }
        const double norm = std::sqrt(norm2);
        if (!(norm >= 1e-9) || !std::isfinite(norm)) {
            throw ContractViolation("Direction: vector norm too small to normalize");
        }
        for (double& c : v) {
            c /= norm;
        }
        return Direction(std::move(v));
    }

    std::span<const double> coords() const { return coords_; }
    std::size_t dim() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }

private:
    explicit Direction(std::vector<double> v) : coords_(std::move(v)) {}

    std::vector<double> coords_;
};

inline double euclidean(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw ContractViolation("euclidean: dimension mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

inline Point clip_to_bounds(std::span<const double> p, const Bounds& b)
{
    if (p.size() != b.dim()) {
        throw ContractViolation("clip_to_bounds: dimension mismatch");
    }
    Point out(p.begin(), p.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::clamp(out[i], b.lower[i], b.upper[i]);
    }
    return out;
}

/// Draws each coordinate uniformly from [-1, 1] and normalizes. Each attempt
/// consumes exactly n words from the stream; attempts with norm < 1e-9 are
/// redrawn.
template <Rng64 G>
Direction sample_direction(G& rng, std::size_t n)
{
    if (n == 0) {
        throw ContractViolation("sample_direction: dimension must be at least 1");
    }
    std::vector<double> v(n);
    for (;;) {
        double norm2 = 0.0;
        for (double& c : v) {
            c = 2.0 * unit_uniform(rng) - 1.0;
            norm2 += c * c;
        }
        if (std::sqrt(norm2) >= 1e-9) {
            return Direction::normalized(std::move(v));
        }
    }
}

/// Line Distance between x and y.
///
/// With z = (x + y) / 2 and the augmented points x' = [x, fx], y' = [y, fy],
/// z' = [z, f(z)], returns the Euclidean distance from z' to the line through
/// x' and y'. Costs exactly one evaluation (f(z)); fx and fy are the caller's
/// cached values. A degenerate line (|y' - x'| < 1e-12) yields 0.
inline double line_distance(std::span<const double> x, double fx,
                            std::span<const double> y, double fy,
                            const ObjectiveSpec& spec)
{
    const std::size_t n = spec.dim();
    if (x.size() != n || y.size() != n) {
        throw ContractViolation("line_distance: dimension mismatch");
    }
    thread_local std::vector<double> z;
    z.resize(n);
    double step2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = 0.5 * (x[i] + y[i]);
        const double d = y[i] - x[i];
        step2 += d * d;
    }
    const double fz = spec.evaluate(z);

    const double rise = fy - fx;
    const double chord2 = step2 + rise * rise;
    if (chord2 < 1e-24) {
        return 0.0;
    }
    // z' - x' = [(y - x) / 2, fz - fx], so the perpendicular component of
    // z' - x' with respect to y' - x' has norm
    //   |y - x| * |fz - (fx + fy) / 2| / |y' - x'|,
    // which is sqrt(|v|^2 - (v.u)^2) without the cancellation.
    const double sag = std::abs(fz - 0.5 * (fx + fy));
    return std::sqrt(step2) * sag / std::sqrt(chord2);
}

} // namespace ldmo

#endif
