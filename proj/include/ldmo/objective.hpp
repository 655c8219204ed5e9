#ifndef LDMO_OBJECTIVE_HPP
#define LDMO_OBJECTIVE_HPP

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ldmo {

/// Decision-space coordinates.
using Point = std::vector<double>;

/// A precondition of a library call was not met (dimension mismatch,
/// non-finite input, ...).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid run or objective configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline bool all_finite(std::span<const double> p)
{
    for (double v : p) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

/// Axis-aligned box domain.
struct Bounds {
    Point lower;
    Point upper;

    static Bounds uniform(std::size_t dim, double lo, double hi)
    {
        return Bounds{Point(dim, lo), Point(dim, hi)};
    }

    std::size_t dim() const { return lower.size(); }

    bool contains(std::span<const double> p) const
    {
        if (p.size() != dim()) {
            return false;
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!(p[i] >= lower[i] && p[i] <= upper[i])) {
                return false;
            }
        }
        return true;
    }

    /// Throws ConfigError unless lower[i] < upper[i] for every i and both
    /// corners have the same (non-zero) dimension.
    void validate() const
    {
        if (lower.empty() || lower.size() != upper.size()) {
            throw ConfigError("bounds: lower and upper must have the same non-zero dimension");
        }
        for (std::size_t i = 0; i < lower.size(); ++i) {
            if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i])) {
                throw ConfigError("bounds: need finite lower[i] < upper[i] for every coordinate");
            }
        }
    }
};

/// A point together with its cached objective value. `id` is assigned by the
/// engine in creation order and is never reused within a run.
struct Solution {
    Point point;
    double value = 0.0;
    std::uint64_t id = 0;
};

inline double rastrigin(std::span<const double> p)
{
    double sum = 10.0 * static_cast<double>(p.size());
    for (double x : p) {
        sum += x * x - 10.0 * std::cos(2.0 * std::numbers::pi * x);
    }
    return sum;
}

inline double griewank(std::span<const double> p)
{
    double sum = 0.0;
    double prod = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sum += p[i] * p[i] / 4000.0;
        prod *= std::cos(p[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return 1.0 + sum - prod;
}

/// A minimization problem over a box, with a thread-safe evaluation counter.
///
/// Copies carry the counter value at the time of the copy and count
/// independently afterwards.
class ObjectiveSpec {
public:
    using Evaluator = std::function<double(std::span<const double>)>;

    ObjectiveSpec(std::string name, Bounds bounds, Evaluator evaluator,
                  std::optional<Point> global_optimum = std::nullopt)
        : name_(std::move(name))
        , bounds_(std::move(bounds))
        , evaluator_(std::move(evaluator))
        , global_optimum_(std::move(global_optimum))
    {
        bounds_.validate();
        if (!evaluator_) {
            throw ConfigError("objective '" + name_ + "': empty evaluator");
        }
        if (global_optimum_ && global_optimum_->size() != bounds_.dim()) {
            throw ConfigError("objective '" + name_ + "': global optimum has wrong dimension");
        }
    }

    ObjectiveSpec(const ObjectiveSpec& other)
        : name_(other.name_)
        , bounds_(other.bounds_)
        , evaluator_(other.evaluator_)
        , global_optimum_(other.global_optimum_)
        , count_(other.count_.load())
    {
    }

    ObjectiveSpec& operator=(const ObjectiveSpec& other)
    {
        if (this != &other) {
            name_ = other.name_;
            bounds_ = other.bounds_;
            evaluator_ = other.evaluator_;
            global_optimum_ = other.global_optimum_;
            count_.store(other.count_.load());
        }
        return *this;
    }

    const std::string& name() const { return name_; }
    std::size_t dim() const { return bounds_.dim(); }
    const Bounds& bounds() const { return bounds_; }
    const std::optional<Point>& global_optimum() const { return global_optimum_; }

    double evaluate(std::span<const double> p) const
    {
        if (p.size() != dim()) {
            throw ContractViolation("evaluate: point has dimension " + std::to_string(p.size()) +
                                    ", objective '" + name_ + "' expects " + std::to_string(dim()));
        }
        if (!all_finite(p)) {
            throw ContractViolation("evaluate: non-finite coordinate");
        }
        count_.fetch_add(1, std::memory_order_relaxed);
        return evaluator_(p);
    }

    std::uint64_t eval_count() const { return count_.load(std::memory_order_relaxed); }
    void reset_count() { count_.store(0); }

private:
    std::string name_;
    Bounds bounds_;
    Evaluator evaluator_;
    std::optional<Point> global_optimum_;
    mutable std::atomic<std::uint64_t> count_{0};
};

/// Builds one of the stock benchmarks ("rastrigin" or "griewank"). Default
/// boxes are [-5.12, 5.12]^n and [-10, 10]^n respectively; both have their
/// global minimum 0 at the origin.
inline ObjectiveSpec make_benchmark(std::string_view name, std::size_t dim,
                                    std::optional<Bounds> bounds = std::nullopt)
{
    if (dim == 0) {
        throw ConfigError("benchmark dimension must be at least 1");
    }
    if (bounds && bounds->dim() != dim) {
        throw ConfigError("bounds dimension does not match benchmark dimension");
    }
    if (name == "rastrigin") {
        return ObjectiveSpec("rastrigin", bounds.value_or(Bounds::uniform(dim, -5.12, 5.12)),
                             rastrigin, Point(dim, 0.0));
    }
    if (name == "griewank") {
        return ObjectiveSpec("griewank", bounds.value_or(Bounds::uniform(dim, -10.0, 10.0)),
                             griewank, Point(dim, 0.0));
    }
    throw ConfigError("unknown benchmark '" + std::string(name) + "' (expected rastrigin or griewank)");
}

} // namespace ldmo

#endif
