#include <qamp/grover.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace qamp;

TEST(OptimalIterations, Examples) {
    EXPECT_EQ(optimal_iterations(4, 1), 1u);
    EXPECT_EQ(optimal_iterations(1024, 1), 25u);
    EXPECT_EQ(optimal_iterations(1024, 1024), 0u);
    EXPECT_EQ(optimal_iterations(1 << 20, 4), 402u);
}

TEST(OptimalIterations, Errors) {
    EXPECT_THROW(optimal_iterations(8, 0), NoSolutionError);
    EXPECT_THROW(optimal_iterations(8, 9), InvalidParamsError);
}

TEST(ScheduledIterations, FallsBackAboveHalf) {
    EXPECT_EQ(scheduled_iterations(8, 4), optimal_iterations(8, 4));
    EXPECT_EQ(scheduled_iterations(8, 5), 0u);
    EXPECT_EQ(scheduled_iterations(8, 8), 0u);
}

TEST(GroverIteration, Examples) {
    const auto m = SelectionMask::from_indices(2, {3});
    const auto s = grover_iteration(uniform_init(2), m);
    const std::vector<double> expected{0, 0, 0, 1};
    for (Index x = 0; x < 4; ++x) EXPECT_NEAR(s[x], expected[x], 1e-15);

    const SelectionMask empty(5);
    const auto u = uniform_init(5);
    EXPECT_LE(l2_distance(grover_iteration(grover_iteration(u, empty), empty), u), 1e-12);

    const auto m7 = SelectionMask::from_indices(4, {7});
    auto t = uniform_init(4);
    for (int k = 0; k < 3; ++k) t = grover_iteration(std::move(t), m7);
    const double theta = 2.0 * std::asin(0.25);
    EXPECT_NEAR(probability_of(t, m7), std::pow(std::sin(7.0 * theta / 2.0), 2), 1e-9);
}

// Every marked-set probability against sin^2((2k+1) theta / 2) and against dense matrices.
TEST(GroverIteration, ClosedFormRotation) {
    Rng rng(8);
    for (unsigned n = 1; n <= 12; ++n) {
        const Index dim = dimension(n);
        for (Index m : {1u, 2u, 4u}) {
            if (m > dim) continue;
            std::vector<Index> picks;
            while (picks.size() < m) {
                const Index x = rng.below(dim);
                if (std::find(picks.begin(), picks.end(), x) == picks.end()) picks.push_back(x);
            }
            const auto mask = SelectionMask::from_indices(n, picks);
            auto s = uniform_init(n);
            const auto kmax = optimal_iterations(dim, m);
            for (std::uint64_t k = 0; k <= kmax; ++k) {
                ASSERT_NEAR(probability_of(s, mask), oracle::rotation_probability(dim, m, k), 1e-9)
                    << "n=" << n << " M=" << m << " k=" << k;
                s = grover_iteration(std::move(s), mask);
            }
        }
    }
}

TEST(GroverIteration, MatchesDenseMatrices) {
    for (unsigned n = 1; n <= 6; ++n) {
        const auto mask = SelectionMask::from_indices(n, {dimension(n) - 1});
        std::vector<bool> marked(dimension(n));
        marked.back() = true;
        auto s = uniform_init(n);
        auto v = oracle::uniform(dimension(n));
        for (int k = 0; k < 5; ++k) {
            s = grover_iteration(std::move(s), mask);
            v = oracle::grover_step(v, marked);
            for (Index x = 0; x < s.size(); ++x) ASSERT_NEAR(s[x], v[x], 1e-12);
        }
    }
}

TEST(GroverIteration, SingleTargetBoostIsMonotoneUntilOptimum) {
    for (unsigned n = 2; n <= 12; ++n) {
        const auto mask = SelectionMask::from_indices(n, {1});
        auto s = uniform_init(n);
        double prev = probability_of(s, mask);
        for (std::uint64_t k = 1; k <= optimal_iterations(dimension(n), 1); ++k) {
            s = grover_iteration(std::move(s), mask);
            const double p = probability_of(s, mask);
            EXPECT_GT(p, prev) << "n=" << n << " k=" << k;
            prev = p;
        }
    }
}

TEST(Search, ExactQuarterCase) {
    Rng rng(1);
    const auto r = search(StaticSearchSpec(SelectionMask::from_indices(2, {3})), rng);
    EXPECT_EQ(r.outcome, 3u);
    EXPECT_EQ(r.iterations_used, 1u);
    EXPECT_NEAR(r.success_probability, 1.0, 1e-12);
    EXPECT_TRUE(r.found);
}

TEST(Search, TenQubitSingleTarget) {
    Rng rng(2);
    const auto r = search(StaticSearchSpec(SelectionMask::from_indices(10, {511})), rng, {.record_trajectory = true});
    EXPECT_EQ(r.iterations_used, 25u);
    EXPECT_GE(r.success_probability, 0.994);
    EXPECT_NEAR(r.success_probability, oracle::rotation_probability(1024, 1, 25), 1e-9);
    ASSERT_EQ(r.trajectory.size(), 25u);
    EXPECT_DOUBLE_EQ(r.trajectory.back(), r.success_probability);
}

TEST(Search, AllMarkedUsesNoIterations) {
    Rng rng(3);
    std::vector<int> hits(8);
    for (int i = 0; i < 800; ++i) {
        const auto r = search(StaticSearchSpec(SelectionMask::full(3)), rng);
        EXPECT_EQ(r.iterations_used, 0u);
        EXPECT_DOUBLE_EQ(r.success_probability, 1.0);
        ++hits[r.outcome];
    }
    for (int h : hits) EXPECT_GT(h, 50);
}

TEST(Search, EmptyMarkedSetRejected) {
    Rng rng(4);
    EXPECT_THROW(search(StaticSearchSpec(SelectionMask(4)), rng), NoSolutionError);
}

TEST(Search, SuccessRateAtTenQubits) {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng = Rng(seed).split(10);
        const auto r = search(StaticSearchSpec(SelectionMask::from_indices(10, {seed * 5})), rng);
        hits += r.outcome == seed * 5;
    }
    EXPECT_GE(hits, 198);
}

// With M <= N/2 the floor schedule never drops below one half. At M = N/2 the
// rotation angle is pi/2 and the probability sits at exactly 1/2.
TEST(Search, AboveHalfForEveryM) {
    Rng rng(5);
    for (unsigned n = 1; n <= 8; ++n) {
        const Index dim = dimension(n);
        for (Index m = 1; 2 * m <= dim; ++m) {
            const auto mask = SelectionMask::from_predicate(n, [&](Index x) { return x < m; });
            EXPECT_GE(search(StaticSearchSpec(mask), rng).success_probability, 0.5 - 1e-12) << "n=" << n << " M=" << m;
        }
    }
}

TEST(SearchUnknownM, FindsSingleTarget) {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const auto r = search_unknown_m(StaticSearchSpec(SelectionMask::from_indices(8, {200}), false), rng);
        if (r.found) {
            EXPECT_EQ(r.outcome, 200u);
            ++hits;
        }
        EXPECT_LE(r.iterations_used, static_cast<std::uint64_t>(3.0 * 16));
    }
    EXPECT_GE(hits, 45);
}

TEST(SearchUnknownM, EmptyRunsOutOfBudget) {
    Rng rng(6);
    const auto r = search_unknown_m(StaticSearchSpec(SelectionMask(8), false), rng);
    EXPECT_FALSE(r.found);
    EXPECT_LE(r.iterations_used, 48u);
}

TEST(SearchUnknownM, AllMarkedSucceedsAtOnce) {
    Rng rng(7);
    const auto r = search_unknown_m(StaticSearchSpec(SelectionMask::full(6), false), rng);
    EXPECT_TRUE(r.found);
    EXPECT_LE(r.iterations_used, 1u);
}

TEST(SearchUnknownM, SearchForwardsWhenMUnknown) {
    Rng a(9), b(9);
    const StaticSearchSpec spec(SelectionMask::from_indices(6, {10, 20}), false);
    const auto r1 = search(spec, a);
    const auto r2 = search_unknown_m(spec, b);
    EXPECT_EQ(r1.outcome, r2.outcome);
    EXPECT_EQ(r1.iterations_used, r2.iterations_used);
}

TEST(SearchUnknownM, ManySolutionsAreCheap) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const auto mask = SelectionMask::from_predicate(12, [](Index x) { return x % 64 == 0; });
        const auto r = search_unknown_m(StaticSearchSpec(mask, false), rng);
        ASSERT_TRUE(r.found);
        total += static_cast<double>(r.iterations_used);
    }
    // sqrt(N/M) = 8; the schedule's expected cost is a small multiple of that.
    EXPECT_LT(total / 100.0, 8.0 * 4.0);
}
