#ifndef LDMO_ENGINE_HPP
#define LDMO_ENGINE_HPP

#include "geometry.hpp"
#include "linesearch.hpp"
#include "objective.hpp"
#include "verify.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <thread>
#include <unordered_map>
#include <vector>

namespace ldmo {

struct Config {
    std::size_t m = 10;            ///< offspring trials per solution and iteration
    double sigma = 0.0;            ///< acceptance / suppression radius
    std::size_t iterations = 1000;
    std::uint64_t seed = 0;
    std::size_t pop_cap = 10000;
    bool cross_suppression = true; ///< also drop P members dominated by a nearby LP member
    LineSearchParams linesearch;

    void validate() const
    {
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw ConfigError("sigma must be positive");
        }
        if (m < 1) {
            throw ConfigError("m must be >= 1");
        }
        if (iterations < 1) {
            throw ConfigError("iterations must be >= 1");
        }
        if (pop_cap < 1) {
            throw ConfigError("pop_cap must be >= 1");
        }
        linesearch.validate();
    }
};

/// P is the active population, LP the archive of solutions whose expansion
/// failed. Both are kept sorted by id.
struct SearchState {
    ObjectiveSpec spec;
    Rng rng;
    std::vector<Solution> population;
    std::vector<Solution> archive;
    std::size_t iter = 0;
    std::uint64_t next_id = 0;
};

struct IterationStats {
    std::size_t iter = 0;
    std::size_t p_size = 0;
    std::size_t lp_size = 0;
    double best_value = 0.0;
};

struct RunReport {
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    std::vector<Solution> final_population;
    std::vector<Solution> final_archive;
    std::uint64_t eval_count = 0;
    std::vector<IterationStats> per_iteration;
    std::size_t distinct_optima = 0;
    std::vector<Solution> representatives;
    bool global_found = false;
};

namespace detail {

inline Solution random_solution(SearchState& s)
{
    const Bounds& b = s.spec.bounds();
    Point p(b.dim());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = uniform_in(s.rng, b.lower[i], b.upper[i]);
    }
    const double v = s.spec.evaluate(p);
    return Solution{std::move(p), v, s.next_id++};
}

inline bool by_id(const Solution& a, const Solution& b) { return a.id < b.id; }

// Minimization: larger value is worse; equal values lose by larger id.
inline bool worse(const Solution& a, const Solution& b)
{
    return a.value != b.value ? a.value > b.value : a.id > b.id;
}

} // namespace detail

/// Initial state: a single uniformly drawn solution in P, empty LP.
inline SearchState init(const Config& config, ObjectiveSpec spec)
{
    config.validate();
    SearchState s{std::move(spec), Rng(config.seed), {}, {}, 0, 0};
    s.population.push_back(detail::random_solution(s));
    return s;
}

struct Expansion {
    std::vector<Solution> accepted;
    bool exhausted = false;
};

/// Runs m line searches from `parent` along fresh random directions and keeps
/// candidates farther than sigma from the parent. The parent is exhausted when
/// no candidate survives.
inline Expansion expand(const Solution& parent, SearchState& state, const Config& config)
{
    Expansion out;
    for (std::size_t t = 0; t < config.m; ++t) {
        const Direction d = sample_direction(state.rng, state.spec.dim());
        auto found = maximize_ld_along(parent, d, state.spec, config.linesearch);
        if (!found || !(euclidean(found->candidate, parent.point) > config.sigma)) {
            continue;
        }
        out.accepted.push_back(Solution{std::move(found->candidate), found->value, state.next_id++});
    }
    out.exhausted = out.accepted.empty();
    return out;
}

namespace detail {

// Uniform grid with cell width sigma over the first few coordinates: two
// points closer than sigma always sit in neighbouring cells. Falls back to a
// full scan in high dimension where 3^n neighbour cells stop paying off.
class NeighbourGrid {
public:
    static constexpr std::size_t max_grid_dim = 4;

    NeighbourGrid(std::span<const Solution> pts, double cell) : pts_(pts), cell_(cell)
    {
        dim_ = pts.empty() ? 0 : pts.front().point.size();
        if (!use_grid()) {
            return;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            cells_[key(pts[i].point)].push_back(i);
        }
    }

    /// Indices of all points that may lie within `cell` of p, ascending.
    std::vector<std::size_t> candidates(std::span<const double> p) const
    {
        std::vector<std::size_t> out;
        if (!use_grid()) {
            out.resize(pts_.size());
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] = i;
            }
            return out;
        }
        const Key centre = key(p);
        Key k = centre;
        std::size_t combos = 1;
        for (std::size_t d = 0; d < dim_; ++d) {
            combos *= 3;
        }
        for (std::size_t c = 0; c < combos; ++c) {
            std::size_t r = c;
            for (std::size_t d = 0; d < dim_; ++d) {
                k[d] = centre[d] + static_cast<std::int64_t>(r % 3) - 1;
                r /= 3;
            }
            if (auto it = cells_.find(k); it != cells_.end()) {
                out.insert(out.end(), it->second.begin(), it->second.end());
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    using Key = std::array<std::int64_t, max_grid_dim>;

    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept
        {
            std::uint64_t h = 1469598103934665603ULL;
            for (std::int64_t v : k) {
                h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ULL;
            }
            return static_cast<std::size_t>(h);
        }
    };

    bool use_grid() const { return dim_ >= 1 && dim_ <= max_grid_dim && cell_ > 0.0; }

    Key key(std::span<const double> p) const
    {
        Key k{};
        for (std::size_t d = 0; d < dim_; ++d) {
            k[d] = static_cast<std::int64_t>(std::floor(p[d] / cell_));
        }
        return k;
    }

    std::span<const Solution> pts_;
    double cell_;
    std::size_t dim_ = 0;
    std::unordered_map<Key, std::vector<std::size_t>, KeyHash> cells_;
};

} // namespace detail

/// Removes the worse member of every pair closer than sigma. Pairs are visited
/// in ascending id order; a solution that loses stops being compared, a winner
/// keeps going. The result is sorted by id and pairwise at least sigma apart.
inline std::vector<Solution> suppress(std::vector<Solution> pop, double sigma)
{
    std::sort(pop.begin(), pop.end(), detail::by_id);
    const detail::NeighbourGrid grid(pop, sigma);
    std::vector<char> alive(pop.size(), 1);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (!alive[i]) {
            continue;
        }
        for (std::size_t j : grid.candidates(pop[i].point)) {
            if (j <= i || !alive[j] || !(euclidean(pop[i].point, pop[j].point) < sigma)) {
                continue;
            }
            if (detail::worse(pop[i], pop[j])) {
                alive[i] = 0;
                break;
            }
            alive[j] = 0;
        }
    }
    std::vector<Solution> out;
    out.reserve(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (alive[i]) {
            out.push_back(std::move(pop[i]));
        }
    }
    return out;
}

/// One iteration: expand every member of P, archive exhausted parents,
/// suppress, cap P and restart it if it emptied.
inline void step(SearchState& state, const Config& config)
{
    std::vector<Solution> next;
    std::vector<Solution> offspring;
    const std::vector<Solution> parents = state.population;
    for (const Solution& parent : parents) {
        Expansion e = expand(parent, state, config);
        if (e.exhausted) {
            state.archive.push_back(parent);
        } else {
            next.push_back(parent);
        }
        for (Solution& c : e.accepted) {
            offspring.push_back(std::move(c));
        }
    }
    for (Solution& c : offspring) {
        next.push_back(std::move(c));
    }

    state.population = suppress(std::move(next), config.sigma);
    state.archive = suppress(std::move(state.archive), config.sigma);

    if (config.cross_suppression && !state.archive.empty()) {
        const detail::NeighbourGrid grid(state.archive, config.sigma);
        std::erase_if(state.population, [&](const Solution& p) {
            for (std::size_t k : grid.candidates(p.point)) {
                const Solution& a = state.archive[k];
                if (a.value <= p.value && euclidean(a.point, p.point) < config.sigma) {
                    return true;
                }
            }
            return false;
        });
    }

    if (state.population.size() > config.pop_cap) {
        std::nth_element(state.population.begin(),
                         state.population.begin() + static_cast<std::ptrdiff_t>(config.pop_cap),
                         state.population.end(),
                         [](const Solution& a, const Solution& b) { return detail::worse(b, a); });
        state.population.resize(config.pop_cap);
        std::sort(state.population.begin(), state.population.end(), detail::by_id);
    }

    if (state.population.empty()) {
        state.population.push_back(detail::random_solution(state));
    }
    ++state.iter;
}

inline IterationStats snapshot(const SearchState& s)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto* pop : {&s.population, &s.archive}) {
        for (const Solution& x : *pop) {
            best = std::min(best, x.value);
        }
    }
    return IterationStats{s.iter, s.population.size(), s.archive.size(), best};
}

/// Summarizes a finished search: distinct verified optima over LP and P, and
/// whether a verified optimum lies within 1e-2 of the known global optimum.
/// Verification runs on a copy of the objective so the reported evaluation
/// count covers the search only.
inline RunReport make_report(const SearchState& s, std::size_t repetition, std::uint64_t seed,
                             std::vector<IterationStats> per_iteration,
                             const VerifyParams& verify = {})
{
    RunReport r;
    r.repetition = repetition;
    r.seed = seed;
    r.final_population = s.population;
    r.final_archive = s.archive;
    r.eval_count = s.spec.eval_count();
    r.per_iteration = std::move(per_iteration);

    const ObjectiveSpec checker = s.spec;
    std::vector<Solution> all = s.archive;
    all.insert(all.end(), s.population.begin(), s.population.end());
    DistinctOptima d = count_distinct_optima(all, checker, verify);
    r.distinct_optima = d.count;
    r.representatives = std::move(d.representatives);

    if (const auto& g = checker.global_optimum()) {
        r.global_found = std::any_of(all.begin(), all.end(), [&](const Solution& x) {
            return euclidean(x.point, *g) < 1e-2 && is_local_optimum(x.point, checker, verify);
        });
    }
    return r;
}

inline RunReport run(const Config& config, ObjectiveSpec spec, const VerifyParams& verify = {},
                     std::size_t repetition = 0)
{
    spec.reset_count();
    SearchState s = init(config, std::move(spec));
    std::vector<IterationStats> stats;
    stats.reserve(config.iterations);
    for (std::size_t k = 0; k < config.iterations; ++k) {
        step(s, config);
        stats.push_back(snapshot(s));
    }
    return make_report(s, repetition, config.seed, std::move(stats), verify);
}

/// Runs `repetitions` independent searches with seeds seed, seed + 1, ...
/// Repetitions are spread over `threads` workers; reports come back in
/// repetition order and do not depend on the thread count.
inline std::vector<RunReport> run_repetitions(const Config& config, const ObjectiveSpec& spec,
                                              std::size_t repetitions, const VerifyParams& verify = {},
                                              unsigned threads = 1)
{
    config.validate();
    std::vector<RunReport> reports(repetitions);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < repetitions; k = next++) {
            Config c = config;
            c.seed = config.seed + k;
            reports[k] = run(c, spec, verify, k);
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(repetitions)));
    if (n_threads == 1) {
        worker();
        return reports;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            try {
                worker();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                failure = std::current_exception();
                next = repetitions;
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return reports;
}

} // namespace ldmo

#endif
