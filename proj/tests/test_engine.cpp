#include "oracles.hpp"

#include <ldmo/engine.hpp>

#include <gtest/gtest.h>

#include <random>
#include <set>

using ldmo::Point;
using ldmo::Solution;

namespace {

ldmo::Config small_config(double sigma, std::uint64_t seed = 1)
{
    ldmo::Config c;
    c.sigma = sigma;
    c.seed = seed;
    c.iterations = 20;
    c.m = 4;
    c.linesearch.scan_points = 10;
    c.linesearch.refine_iters = 10;
    return c;
}

bool separated(const std::vector<Solution>& pop, double sigma)
{
    for (std::size_t i = 0; i < pop.size(); ++i) {
        for (std::size_t j = i + 1; j < pop.size(); ++j) {
            if (ldmo::euclidean(pop[i].point, pop[j].point) < sigma) {
                return false;
            }
        }
    }
    return true;
}

std::vector<std::uint64_t> ids(const std::vector<Solution>& pop)
{
    std::vector<std::uint64_t> out;
    for (const auto& s : pop) {
        out.push_back(s.id);
    }
    return out;
}

bool same(const std::vector<Solution>& a, const std::vector<Solution>& b)
{
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].id != b[i].id || a[i].value != b[i].value || a[i].point != b[i].point) {
            return false;
        }
    }
    return true;
}

std::vector<Solution> random_population(std::mt19937_64& rng, std::size_t n, std::size_t dim, double half)
{
    std::uniform_real_distribution<double> u(-half, half);
    std::vector<Solution> pop;
    for (std::size_t k = 0; k < n; ++k) {
        Point p(dim);
        for (double& c : p) {
            c = u(rng);
        }
        // Coarse values so that ties occur.
        pop.push_back(Solution{p, std::round(ldmo::rastrigin(p)), k});
    }
    std::shuffle(pop.begin(), pop.end(), rng);
    return pop;
}

} // namespace

TEST(Config, Validation)
{
    ldmo::Config c;
    c.sigma = 0.9;
    EXPECT_NO_THROW(c.validate());
    c.iterations = 0;
    EXPECT_THROW(c.validate(), ldmo::ConfigError);
    c.iterations = 1;
    c.sigma = 0.0;
    EXPECT_THROW(c.validate(), ldmo::ConfigError);
    c.sigma = 1.0;
    c.m = 0;
    EXPECT_THROW(c.validate(), ldmo::ConfigError);
}

TEST(Init, SingleUniformSolution)
{
    const auto spec = ldmo::make_benchmark("rastrigin", 2);
    const auto s = ldmo::init(small_config(0.9, 5), spec);
    ASSERT_EQ(s.population.size(), 1u);
    EXPECT_TRUE(s.archive.empty());
    EXPECT_EQ(s.iter, 0u);
    EXPECT_TRUE(spec.bounds().contains(s.population[0].point));
    EXPECT_EQ(s.population[0].value, ldmo::rastrigin(s.population[0].point));

    EXPECT_EQ(ldmo::init(small_config(0.9, 5), spec).population[0].point, s.population[0].point);
    EXPECT_NE(ldmo::init(small_config(0.9, 6), spec).population[0].point, s.population[0].point);
}

TEST(Expand, HugeSigmaExhausts)
{
    const auto spec = ldmo::make_benchmark("rastrigin", 2);
    const auto cfg = small_config(100.0);
    auto s = ldmo::init(cfg, spec);
    const auto e = ldmo::expand(s.population[0], s, cfg);
    EXPECT_TRUE(e.accepted.empty());
    EXPECT_TRUE(e.exhausted);
}

TEST(Expand, ConsumesOneDirectionPerTrial)
{
    const auto spec = ldmo::make_benchmark("griewank", 3);
    auto cfg = small_config(0.1);
    cfg.m = 7;
    auto s = ldmo::init(cfg, spec);
    ldmo::Rng reference = s.rng;
    reference.discard(cfg.m * 3);
    ldmo::expand(s.population[0], s, cfg);
    EXPECT_EQ(s.rng, reference);
}

TEST(Expand, AcceptedAreFarAndEvaluated)
{
    const auto spec = ldmo::make_benchmark("rastrigin", 2);
    const auto cfg = small_config(0.9, 3);
    auto s = ldmo::init(cfg, spec);
    const Solution parent = s.population[0];
    const auto e = ldmo::expand(parent, s, cfg);
    std::set<std::uint64_t> seen;
    for (const auto& c : e.accepted) {
        EXPECT_GT(ldmo::euclidean(c.point, parent.point), cfg.sigma);
        EXPECT_EQ(c.value, ldmo::rastrigin(c.point));
        EXPECT_TRUE(seen.insert(c.id).second);
        EXPECT_NE(c.id, parent.id);
    }
}

TEST(Expand, TinySigmaRarelyExhausts)
{
    const auto spec = ldmo::make_benchmark("rastrigin", 2);
    int exhausted = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto cfg = small_config(1e-9, seed);
        cfg.m = 10;
        auto s = ldmo::init(cfg, spec);
        exhausted += ldmo::expand(s.population[0], s, cfg).exhausted ? 1 : 0;
    }
    EXPECT_LT(exhausted, 5);
}

TEST(Suppress, Examples)
{
    EXPECT_TRUE(ldmo::suppress({}, 0.5).empty());

    const auto twins = ldmo::suppress({Solution{{1.0, 1.0}, 3.0, 0}, Solution{{1.0, 1.0}, 3.0, 1}}, 0.5);
    ASSERT_EQ(twins.size(), 1u);
    EXPECT_EQ(twins[0].id, 0u);

    // 0.0 (f=5) loses to 0.3 (f=1); 0.3 then beats 0.6 (f=3).
    const auto line = ldmo::suppress(
        {Solution{{0.0}, 5.0, 0}, Solution{{0.3}, 1.0, 1}, Solution{{0.6}, 3.0, 2}}, 0.4);
    ASSERT_EQ(line.size(), 1u);
    EXPECT_EQ(line[0].point, Point{0.3});
}

TEST(Suppress, ScanOrderMatters)
{
    // With ids 0:(0.0,f=1) 1:(0.3,f=2) 2:(0.6,f=0) and sigma 0.4, id 0 removes
    // id 1 first, so 0 and 2 (0.6 apart) both survive.
    const auto out = ldmo::suppress(
        {Solution{{0.6}, 0.0, 2}, Solution{{0.0}, 1.0, 0}, Solution{{0.3}, 2.0, 1}}, 0.4);
    EXPECT_EQ(ids(out), (std::vector<std::uint64_t>{0, 2}));
}

TEST(Suppress, MatchesReferenceAndInvariants)
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t dim = 1 + trial % 5;
        const double sigma = 0.2 + 0.05 * (trial % 13);
        const auto pop = random_population(rng, 20 + trial * 3, dim, 2.0);
        const auto once = ldmo::suppress(pop, sigma);

        EXPECT_TRUE(same(once, oracle::suppress(pop, sigma))) << "trial " << trial;
        EXPECT_TRUE(separated(once, sigma));
        EXPECT_TRUE(same(ldmo::suppress(once, sigma), once));
        const auto all = ids(pop);
        for (auto id : ids(once)) {
            EXPECT_NE(std::find(all.begin(), all.end(), id), all.end());
        }
    }
}

TEST(Step, ExhaustedParentMovesToArchiveAndRestarts)
{
    const auto spec = ldmo::make_benchmark("rastrigin", 2);
    const auto cfg = small_config(100.0);
    auto s = ldmo::init(cfg, spec);
    const auto first = s.population[0].id;
    ldmo::step(s, cfg);
    ASSERT_EQ(s.archive.size(), 1u);
    EXPECT_EQ(s.archive[0].id, first);
    ASSERT_EQ(s.population.size(), 1u);
    EXPECT_NE(s.population[0].id, first);
    EXPECT_EQ(s.iter, 1u);
}

TEST(Step, DeterministicAndSeparated)
{
    const auto spec = ldmo::make_benchmark("rastrigin", 2);
    const auto cfg = small_config(0.9, 8);
    auto a = ldmo::init(cfg, spec);
    for (int k = 0; k < 15; ++k) {
        auto b = a;
        ldmo::step(a, cfg);
        ldmo::step(b, cfg);
        EXPECT_TRUE(same(a.population, b.population));
        EXPECT_TRUE(same(a.archive, b.archive));
        EXPECT_EQ(a.rng, b.rng);
        EXPECT_TRUE(separated(a.population, cfg.sigma));
        EXPECT_TRUE(separated(a.archive, cfg.sigma));
    }
}

TEST(Step, PopulationCapKeepsBest)
{
    const auto spec = ldmo::make_benchmark("griewank", 2);
    auto cfg = small_config(0.1, 2);
    cfg.m = 10;
    cfg.pop_cap = 25;
    auto s = ldmo::init(cfg, spec);
    for (int k = 0; k < 4; ++k) {
        ldmo::step(s, cfg);
        EXPECT_LE(s.population.size(), cfg.pop_cap);
        EXPECT_TRUE(std::is_sorted(s.population.begin(), s.population.end(),
                                   [](const auto& a, const auto& b) { return a.id < b.id; }));
    }
}

TEST(Step, CrossSuppressionRemovesDominatedActive)
{
    const auto spec = ldmo::make_benchmark("rastrigin", 2);
    auto cfg = small_config(0.5, 13);
    cfg.m = 10;
    auto on = ldmo::init(cfg, spec);
    // An archived minimum next to a worse active point. Offspring land more
    // than sigma from their parent, so only the archive can remove id 101.
    on.archive = {Solution{{0.0, 0.0}, 0.0, 100}};
    on.population = {Solution{{0.1, 0.0}, ldmo::rastrigin(Point{0.1, 0.0}), 101}};
    on.next_id = 102;
    auto off = on;

    ldmo::step(on, cfg);
    const auto survivors = ids(on.population);
    EXPECT_EQ(std::count(survivors.begin(), survivors.end(), 101u), 0);
    for (const auto& p : on.population) {
        for (const auto& a : on.archive) {
            EXPECT_FALSE(ldmo::euclidean(p.point, a.point) < cfg.sigma && a.value <= p.value);
        }
    }

    cfg.cross_suppression = false;
    ldmo::step(off, cfg);
    const auto kept = ids(off.population);
    EXPECT_NE(std::find(kept.begin(), kept.end(), 101u), kept.end());
}

TEST(Run, ReportInvariants)
{
    const auto spec = ldmo::make_benchmark("rastrigin", 2);
    auto cfg = small_config(0.9, 4);
    cfg.iterations = 30;
    const auto r1 = ldmo::run(cfg, spec);
    const auto r2 = ldmo::run(cfg, spec);

    EXPECT_TRUE(same(r1.final_population, r2.final_population));
    EXPECT_TRUE(same(r1.final_archive, r2.final_archive));
    EXPECT_EQ(r1.eval_count, r2.eval_count);
    EXPECT_EQ(r1.distinct_optima, r2.distinct_optima);
    ASSERT_EQ(r1.per_iteration.size(), cfg.iterations);
    EXPECT_EQ(r1.per_iteration.back().p_size, r1.final_population.size());
    EXPECT_EQ(r1.per_iteration.back().lp_size, r1.final_archive.size());

    std::set<std::uint64_t> p_ids;
    for (const auto& s : r1.final_population) {
        EXPECT_TRUE(spec.bounds().contains(s.point));
        p_ids.insert(s.id);
    }
    for (const auto& s : r1.final_archive) {
        EXPECT_TRUE(spec.bounds().contains(s.point));
        EXPECT_EQ(p_ids.count(s.id), 0u);
    }
    EXPECT_GT(r1.eval_count, 0u);
}

TEST(Run, ArchiveShrinksOnlyThroughMerges)
{
    const auto spec = ldmo::make_benchmark("rastrigin", 2);
    auto cfg = small_config(0.9, 21);
    auto s = ldmo::init(cfg, spec);
    for (int k = 0; k < 60; ++k) {
        // New archive members come from the current population, so every
        // merge needs an (archive, population) pair closer than sigma.
        std::size_t close_pairs = 0;
        for (const auto& a : s.archive) {
            for (const auto& p : s.population) {
                close_pairs += ldmo::euclidean(a.point, p.point) < cfg.sigma ? 1 : 0;
            }
        }
        const auto before = s.archive.size();
        ldmo::step(s, cfg);
        EXPECT_TRUE(separated(s.archive, cfg.sigma));
        EXPECT_LE(before, s.archive.size() + close_pairs) << "iteration " << s.iter;
    }
}

TEST(RunRepetitions, ThreadCountDoesNotChangeReports)
{
    const auto spec = ldmo::make_benchmark("rastrigin", 2);
    auto cfg = small_config(0.9, 10);
    cfg.iterations = 8;
    const auto serial = ldmo::run_repetitions(cfg, spec, 3, {}, 1);
    const auto threaded = ldmo::run_repetitions(cfg, spec, 3, {}, 3);
    ASSERT_EQ(serial.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(serial[k].repetition, k);
        EXPECT_EQ(serial[k].seed, cfg.seed + k);
        EXPECT_TRUE(same(serial[k].final_population, threaded[k].final_population));
        EXPECT_TRUE(same(serial[k].final_archive, threaded[k].final_archive));
        EXPECT_EQ(serial[k].eval_count, threaded[k].eval_count);
    }
}
