#include <qamp/dynamic.hpp>
#include <qamp/recommend.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace qamp;

namespace {

StateVector random_state(unsigned n, Rng& rng) {
    std::vector<double> a(dimension(n));
    double norm = 0.0;
    for (double& v : a) {
        v = rng.uniform() * 2.0 - 1.0;
        norm += v * v;
    }
    for (double& v : a) v /= std::sqrt(norm);
    return StateVector::from_amplitudes(n, std::move(a));
}

SelectionMask random_mask(unsigned n, Rng& rng, double density) {
    return SelectionMask::from_predicate(n, [&](Index) { return rng.bernoulli(density); });
}

} // namespace

TEST(SelectionPolicy, ClampsAndRejectsNaN) {
    const auto p = SelectionPolicy::probabilistic(1, {-0.5, 1.5});
    EXPECT_DOUBLE_EQ(p.probability(0), 0.0);
    EXPECT_DOUBLE_EQ(p.probability(1), 1.0);
    EXPECT_THROW(SelectionPolicy::probabilistic(1, {0.5, std::nan("")}), InvalidParamsError);
    EXPECT_THROW(SelectionPolicy::probabilistic(2, {0.5, 0.5}), ShapeError);
}

TEST(SelectionPolicy, ExpectedCounts) {
    const auto p = SelectionPolicy::from_rule(3, [](Index x) { return x / 8.0; });
    EXPECT_DOUBLE_EQ(p.expected_count(), 28.0 / 8.0);
    EXPECT_DOUBLE_EQ(p.expected_count_squared(), 140.0 / 64.0);
    const auto f = SelectionPolicy::fixed(SelectionMask::from_indices(3, {1, 2}));
    EXPECT_DOUBLE_EQ(f.expected_count(), 2.0);
    EXPECT_DOUBLE_EQ(f.expected_count_squared(), 2.0);
    EXPECT_TRUE(f.is_fixed());
}

TEST(SampleMask, DegenerateRules) {
    Rng rng(1);
    EXPECT_TRUE(sample_mask(SelectionPolicy::from_rule(6, [](Index) { return 1.0; }), rng).all());
    EXPECT_TRUE(sample_mask(SelectionPolicy::from_rule(6, [](Index) { return 0.0; }), rng).none());
}

TEST(SampleMask, FixedPolicyVerbatimAndDrawsNothing) {
    const auto m = SelectionMask::from_indices(4, {1, 9});
    Rng a(5), b(5);
    EXPECT_EQ(sample_mask(SelectionPolicy::fixed(m), a), m);
    EXPECT_EQ(a(), b());
}

TEST(SampleMask, DimensionChecked) {
    Rng rng(2);
    EXPECT_THROW(sample_mask(SelectionPolicy::fixed(SelectionMask(3)), 4, rng), ShapeError);
}

TEST(SampleMask, HalfRuleMeanCount) {
    const auto policy = SelectionPolicy::from_rule(10, [](Index) { return 0.5; });
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        total += static_cast<double>(sample_mask(policy, 10, rng).count());
    }
    EXPECT_NEAR(total / 200.0, 512.0, 35.0);
}

TEST(SampleMask, PerStateFrequencies) {
    const auto policy = SelectionPolicy::from_rule(3, [](Index x) { return x / 7.0; });
    std::vector<int> hits(8);
    Rng rng(3);
    constexpr int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        const auto m = sample_mask(policy, rng);
        for (Index x = 0; x < 8; ++x) hits[x] += m[x];
    }
    for (Index x = 0; x < 8; ++x) {
        const double p = x / 7.0;
        EXPECT_NEAR(hits[x] / double(draws), p, 4.0 * std::sqrt(p * (1 - p) / draws) + 1e-12) << "x=" << x;
    }
}

TEST(SampleMask, SeedDeterminism) {
    const auto policy = SelectionPolicy::from_rule(8, [](Index x) { return (x % 5) / 5.0; });
    Rng a(11), b(11);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(sample_mask(policy, a), sample_mask(policy, b));
}

TEST(DynamicIteration, EqualsTwoGroverIterations) {
    Rng rng(4);
    const auto s = random_state(5, rng);
    const auto m = random_mask(5, rng, 0.3);
    EXPECT_EQ(dynamic_iteration(s, m), grover_iteration(grover_iteration(s, m), m));
    EXPECT_EQ(dynamic_iteration(s, m, InnerSteps::skip_second), grover_iteration(s, m));
}

TEST(DynamicIteration, EmptyAndFullAreIdentity) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const unsigned n = 1 + static_cast<unsigned>(rng.below(10));
        const auto s = random_state(n, rng);
        EXPECT_LE(l2_distance(dynamic_iteration(s, SelectionMask(n)), s), 1e-10);
        EXPECT_LE(l2_distance(dynamic_iteration(s, SelectionMask::full(n)), s), 1e-10);
    }
}

// N_s = N/4 puts the start at 30 degrees; two single steps land on 150 degrees, so the
// doubled iteration returns to P = 1/4 and its second inner mean is negative.
TEST(DynamicIteration, QuarterMaskReturnsToStart) {
    const auto m = SelectionMask::from_indices(3, {0, 1});
    const auto u = uniform_init(3);
    ASSERT_TRUE(corollary1_check(u, m, 1.0).all());
    const auto s = dynamic_iteration(u, m);
    EXPECT_NEAR(probability_of(s, m), oracle::rotation_probability(8, 2, 2), 1e-12);
    EXPECT_NEAR(probability_of(s, m), 0.25, 1e-12);

    std::vector<bool> marked{true, true, false, false, false, false, false, false};
    auto ref = oracle::grover_step(oracle::grover_step(oracle::uniform(8), marked), marked);
    EXPECT_NEAR(probability_of(s, m), oracle::marked_probability(ref, marked), 1e-12);

    Rng rng(1);
    EXPECT_THROW(run_dynamic(3, SelectionPolicy::fixed(m), 1, rng), ValidityError);
}

// Every non-degenerate n=4 mask from uniform: a round that passes the validity check
// strictly raises the selected probability. (At n=3 no round passes: even N_s = 1
// overshoots within one doubled round.)
TEST(DynamicIteration, ValidRoundsBoostSelected) {
    const auto u = uniform_init(4);
    int valid_rounds = 0;
    for (Index bits = 1; bits + 1 < (Index{1} << 16); ++bits) {
        const auto m = SelectionMask::from_predicate(4, [&](Index x) { return (bits >> x) & 1u; });
        Rng rng(bits);
        DynamicOptions opts;
        opts.enforce_validity = false;
        const auto run = run_dynamic(4, SelectionPolicy::fixed(m), 1, rng, opts);
        if (!run.log.validity[0].ok()) continue;
        ++valid_rounds;
        EXPECT_GT(probability_of(run.state, m), probability_of(u, m)) << "mask bits " << bits;
    }
    EXPECT_GT(valid_rounds, 0);
}

TEST(GainReport, UniformState) {
    for (Index ns : {1u, 5u, 17u, 511u}) {
        const auto m = SelectionMask::from_predicate(10, [&](Index x) { return x < ns; });
        const auto g = gain_report(uniform_init(10), m);
        EXPECT_NEAR(g.gain, double(ns) / double(1024 - ns), 1e-12);
        EXPECT_NEAR(g.p_selected + g.p_unselected, 1.0, 1e-9);
        EXPECT_EQ(g.ns_actual, ns);
        EXPECT_NEAR(g.ns_bound, 1024.0 / (2.0 * g.gain), 1e-9);
        EXPECT_NEAR(g.mean_amplitude, (1024.0 - 2.0 * ns) / 1024.0 / 32.0, 1e-15);
        EXPECT_DOUBLE_EQ(g.min_unselected_amp, 1.0 / 32.0);
    }
}

TEST(GainReport, NsBoundForTargetGain) {
    // a_0^2 = 8/9 with the rest spread evenly gives G = 8.
    const double ps = 8.0 / 9.0;
    std::vector<double> a(1024, std::sqrt((1.0 - ps) / 1023.0));
    a[0] = std::sqrt(ps);
    const auto g = gain_report(StateVector::from_amplitudes(10, a), SelectionMask::from_indices(10, {0}));
    EXPECT_NEAR(g.gain, 8.0, 1e-9);
    EXPECT_NEAR(g.ns_bound, 64.0, 1e-7);
}

TEST(GainReport, InfiniteGain) {
    const auto g = gain_report(StateVector::from_amplitudes(2, {0, 0, 0, 1}), SelectionMask::from_indices(2, {3}));
    EXPECT_TRUE(g.infinite_gain());
    EXPECT_DOUBLE_EQ(g.p_unselected, 0.0);
    EXPECT_EQ(g.ns_bound, 0.0);
    const auto full = gain_report(uniform_init(2), SelectionMask::full(2));
    EXPECT_TRUE(full.infinite_gain());
    EXPECT_TRUE(std::isinf(full.min_unselected_amp));
    const auto empty = gain_report(uniform_init(2), SelectionMask(2));
    EXPECT_DOUBLE_EQ(empty.gain, 0.0);
    EXPECT_TRUE(std::isinf(empty.ns_bound));
}

TEST(GainUpperBound, ClosedForm) {
    EXPECT_DOUBLE_EQ(gain_upper_bound(1024, 64), 64.0 / 960.0 * 49.0);
    EXPECT_THROW(gain_upper_bound(8, 0), InvalidParamsError);
    EXPECT_THROW(gain_upper_bound(8, 8), InvalidParamsError);
}

TEST(Corollary1Check, UniformStateSmallMask) {
    for (unsigned n = 2; n <= 8; ++n) {
        const Index dim = dimension(n);
        for (Index ns = 1; 2 * ns < dim; ns += std::max<Index>(1, dim / 16)) {
            const auto m = SelectionMask::from_predicate(n, [&](Index x) { return x < ns; });
            const double g_max = double(dim) / (2.0 * ns);
            const auto c = corollary1_check(uniform_init(n), m, g_max * 0.999);
            EXPECT_TRUE(c.all()) << "n=" << n << " ns=" << ns;
            EXPECT_EQ(c.next_step_unselected_positive, 4 * ns <= dim) << "n=" << n << " ns=" << ns;
        }
    }
}

TEST(Corollary1Check, NegativeUnselectedAmplitude) {
    const auto s = StateVector::from_amplitudes(2, {0.5, -0.5, 0.5, 0.5});
    const auto c = corollary1_check(s, SelectionMask::from_indices(2, {0}), 1.0);
    EXPECT_FALSE(c.unselected_positive);
    EXPECT_FALSE(c.all());
}

TEST(Corollary1Check, BoundaryArithmetic) {
    const auto m = SelectionMask::from_predicate(4, [](Index x) { return x < 8; });
    EXPECT_FALSE(corollary1_check(uniform_init(4), m, 4.0).ns_bound_ok);
    EXPECT_NEAR(gain_report(uniform_init(4), m).mean_amplitude, 0.0, 1e-15);

    // The bound is strict: N_s == N/(2G) fails.
    const auto m64 = SelectionMask::from_predicate(10, [](Index x) { return x < 64; });
    EXPECT_FALSE(corollary1_check(uniform_init(10), m64, 8.0).ns_bound_ok);
    EXPECT_TRUE(corollary1_check(uniform_init(10), m64, 7.9).ns_bound_ok);
}

TEST(Corollary1Check, NextStepPredictionMatchesSimulation) {
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const unsigned n = 2 + static_cast<unsigned>(rng.below(7));
        const auto m = random_mask(n, rng, rng.uniform() * 0.5);
        auto s = uniform_init(n);
        for (int k = 0; k < 4; ++k) {
            const bool predicted = corollary1_check(s, m, 1.0).next_step_unselected_positive;
            s = grover_iteration(std::move(s), m);
            EXPECT_EQ(predicted, gain_report(s, m).min_unselected_amp > -tolerance::validity);
        }
    }
}

TEST(Corollary2, SingleIterationsBreakOrdering) {
    const auto w = corollary2_demo(3, SelectionMask::from_indices(3, {5}));
    const auto ref = oracle::single_then_empty(8.0, 1.0);
    EXPECT_NEAR(w.selected_once, ref.selected_once, 1e-12);
    EXPECT_NEAR(w.never_selected, ref.never_selected, 1e-12);
    EXPECT_LT(w.selected_once, w.never_selected);
    EXPECT_TRUE(w.ordering_violated());
}

TEST(Corollary2, DoublingRestoresOrdering) {
    for (unsigned n = 2; n <= 8; ++n) {
        for (Index ns = 1; 4 * ns <= dimension(n); ns *= 2) {
            const auto m = SelectionMask::from_predicate(n, [&](Index x) { return x < ns; });
            EXPECT_TRUE(corollary2_demo(n, m, IterationMode::single).ordering_violated()) << n << " " << ns;
            const auto w = corollary2_demo(n, m, IterationMode::doubled);
            EXPECT_GE(w.selected_once, w.never_selected) << n << " " << ns;
        }
    }
}

TEST(Corollary2, EmptyFirstMask) {
    const auto w = corollary2_demo(3, SelectionMask(3));
    EXPECT_DOUBLE_EQ(w.selected_once, w.never_selected);
    EXPECT_FALSE(w.ordering_violated());
    EXPECT_THROW(corollary2_demo(3, SelectionMask::full(3)), DegenerateDecompositionError);
    EXPECT_THROW(corollary2_demo(3, SelectionMask(2)), ShapeError);
}

// Starting from uniform with a fixed mask, a_s/a_us < N/(2 N_s) - 1 holds exactly
// when the next iteration keeps the unselected amplitudes positive.
TEST(GainBound, StaticMasksBeforeSignChange) {
    Rng rng(23);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const unsigned n = 2 + static_cast<unsigned>(rng.below(9));
        auto m = random_mask(n, rng, rng.uniform() * 0.3);
        if (m.none()) m.set(rng.below(m.size()), true);
        if (2 * m.count() >= m.size()) continue;
        const double bound = gain_upper_bound(m.size(), m.count());
        auto s = uniform_init(n);
        while (true) {
            const auto next = grover_iteration(s, m);
            // Exact zeros land within a few ulps of 0 either way.
            if (!(gain_report(next, m).min_unselected_amp > 1e-12)) break;
            EXPECT_LT(gain_report(s, m).gain, bound);
            ++checked;
            s = next;
        }
    }
    EXPECT_GT(checked, 500);
}

TEST(DefaultRounds, Formula) {
    const auto fixed = SelectionPolicy::fixed(SelectionMask::from_indices(10, {3}));
    EXPECT_EQ(default_rounds(fixed), 12u);
    const auto uniform_half = SelectionPolicy::from_rule(10, [](Index) { return 0.5; });
    // E = 512, sum p^2 / E = 0.5.
    EXPECT_EQ(default_rounds(uniform_half), static_cast<std::size_t>(std::numbers::pi / 4.0 * std::sqrt(2.0) / 1.5));
    EXPECT_EQ(default_rounds(SelectionPolicy::fixed(SelectionMask(6))), 3u);
}

TEST(RunDynamic, ZeroRounds) {
    Rng rng(1);
    const auto run = run_dynamic(6, SelectionPolicy::from_rule(6, [](Index) { return 0.2; }), 0, rng);
    EXPECT_EQ(run.state, uniform_init(6));
    EXPECT_EQ(run.log.rounds, 0u);
    EXPECT_TRUE(run.log.masks_per_round.empty());
    EXPECT_TRUE(run.log.gain_trajectory.empty());
}

// 26 iterations pass the optimum of 25, so the last round leaves the unselected
// amplitudes slightly negative: the rotation is checked with enforcement off, and
// the default run is expected to stop there.
TEST(RunDynamic, StaticPolicyMatchesRotation) {
    Rng rng(2);
    const auto m = SelectionMask::from_indices(10, {700});
    DynamicOptions opts;
    opts.enforce_validity = false;
    const auto run = run_dynamic(10, SelectionPolicy::fixed(m), 13, rng, opts);
    EXPECT_GE(probability_of(run.state, m), 0.99);
    EXPECT_NEAR(probability_of(run.state, m), oracle::rotation_probability(1024, 1, 26), 1e-9);
    EXPECT_EQ(run.log.rounds, 13u);
    EXPECT_EQ(run.log.masks_per_round.size(), 13u);
    EXPECT_EQ(run.log.gain_trajectory.size(), 13u);
    EXPECT_EQ(run.log.expected_selected_probability.size(), 13u);
    for (std::size_t r = 0; r < 12; ++r) EXPECT_TRUE(run.log.validity[r].ok()) << r;

    try {
        run_dynamic(10, SelectionPolicy::fixed(m), 13, rng);
        FAIL() << "expected the overshooting round to be flagged";
    } catch (const ValidityError& e) {
        EXPECT_EQ(e.round(), 12u);
        EXPECT_EQ(e.partial().state, run.state);
    }
}

TEST(RunDynamic, CalibratedExponentialCrossesHalfAtSeven) {
    const auto params = calibrate_beta(10, 4.0);
    const auto policy = similarity_policy(SimilaritySpec(10, 0), params);
    std::vector<std::size_t> crossings;
    for (std::uint64_t seed = 0; seed < 21; ++seed) {
        Rng rng = Rng(seed).split(10);
        std::size_t crossed = 0;
        DynamicOptions opts;
        opts.on_round = [&](const RoundInfo& info) {
            if (policy.expected_selected_probability(info.state) > 0.5) {
                crossed = info.round + 1;
                return false;
            }
            return true;
        };
        run_dynamic(10, policy, 40, rng, opts);
        crossings.push_back(crossed);
    }
    std::nth_element(crossings.begin(), crossings.begin() + 10, crossings.end());
    EXPECT_NEAR(static_cast<double>(crossings[10]), 7.0, 1.0);
}

TEST(RunDynamic, ObserverCanStopEarly) {
    Rng rng(3);
    DynamicOptions opts;
    opts.on_round = [](const RoundInfo& info) { return info.round < 2; };
    const auto run = run_dynamic(8, SelectionPolicy::fixed(SelectionMask::from_indices(8, {1})), 10, rng, opts);
    EXPECT_EQ(run.log.rounds, 3u);
}

TEST(RunDynamic, SeedDeterminism) {
    const auto policy = SelectionPolicy::from_rule(8, [](Index x) { return std::exp2(-double(std::popcount(x))); });
    Rng a(31), b(31);
    DynamicOptions opts;
    opts.enforce_validity = false;
    const auto r1 = run_dynamic(8, policy, 5, a, opts);
    const auto r2 = run_dynamic(8, policy, 5, b, opts);
    EXPECT_EQ(r1.state, r2.state);
    EXPECT_EQ(r1.log.masks_per_round, r2.log.masks_per_round);
}

TEST(RunDynamic, PolicyDimensionChecked) {
    Rng rng(4);
    EXPECT_THROW(run_dynamic(5, SelectionPolicy::fixed(SelectionMask(4)), 1, rng), ShapeError);
}

TEST(RunDynamic, ValidityErrorCarriesPartialRun) {
    // Six of sixteen selected: the second inner mean is negative straight away.
    const auto m = SelectionMask::from_predicate(4, [](Index x) { return x < 6; });
    Rng rng(5);
    try {
        run_dynamic(4, SelectionPolicy::fixed(m), 5, rng);
        FAIL() << "expected a validity error";
    } catch (const ValidityError& e) {
        const auto& log = e.partial().log;
        EXPECT_EQ(log.rounds, e.round() + 1);
        EXPECT_EQ(log.masks_per_round.size(), log.rounds);
        EXPECT_EQ(log.validity.size(), log.rounds);
        EXPECT_FALSE(log.validity.back().ok());
        for (std::size_t r = 0; r + 1 < log.rounds; ++r) EXPECT_TRUE(log.validity[r].ok());
        auto replay = uniform_init(4);
        for (const auto& mask : log.masks_per_round) replay = dynamic_iteration(std::move(replay), mask);
        EXPECT_EQ(replay, e.partial().state);
    }
}

TEST(RunDynamic, EnforcementCanBeDisabled) {
    const auto m = SelectionMask::from_predicate(4, [](Index x) { return x < 6; });
    Rng rng(6);
    DynamicOptions opts;
    opts.enforce_validity = false;
    const auto run = run_dynamic(4, SelectionPolicy::fixed(m), 5, rng, opts);
    EXPECT_EQ(run.log.rounds, 5u);
}

// Replays every logged round with the dense-matrix oracle and recomputes the
// validity measurements independently.
TEST(RunDynamic, NeverEmitsInvalidStateSilently) {
    Rng gen(41);
    int completed = 0, aborted = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const unsigned n = 2 + static_cast<unsigned>(gen.below(5));
        const double scale = gen.uniform();
        const auto policy = SelectionPolicy::from_rule(n, [&](Index x) { return scale * std::exp2(-double(std::popcount(x))); });
        Rng rng(1000 + trial);
        std::vector<SelectionMask> masks;
        bool threw = false;
        StateVector final_state = uniform_init(n);
        try {
            const auto run = run_dynamic(n, policy, 1 + gen.below(8), rng);
            masks = run.log.masks_per_round;
            final_state = run.state;
            ++completed;
        } catch (const ValidityError& e) {
            masks = e.partial().log.masks_per_round;
            final_state = e.partial().state;
            threw = true;
            ++aborted;
        }
        auto v = oracle::uniform(dimension(n));
        bool any_violation = false;
        for (const auto& mask : masks) {
            const bool identity = mask.all();
            std::vector<bool> marked(v.size());
            for (Index x = 0; x < v.size(); ++x) marked[x] = mask[x];
            for (int inner = 0; inner < 2; ++inner) {
                auto flipped = oracle::multiply(oracle::phase_oracle(marked), v);
                double mu = 0.0;
                for (double a : flipped) mu += a;
                mu /= static_cast<double>(v.size());
                any_violation |= !identity && mu < -tolerance::validity;
                v = oracle::multiply(oracle::diffusion(v.size()), flipped);
            }
            for (Index x = 0; x < v.size(); ++x) any_violation |= !marked[x] && v[x] < -tolerance::validity;
        }
        EXPECT_EQ(threw, any_violation) << "trial " << trial;
        for (Index x = 0; x < v.size(); ++x) ASSERT_NEAR(final_state[x], v[x], 1e-12);
    }
    EXPECT_GT(completed, 10);
    EXPECT_GT(aborted, 10);
}

// Exhaustive over n <= 3 and up to three rounds. Within runs that stay in the valid
// regime, a state selected in a superset of rounds never ends below another.
// Outside that regime the ordering can break, which the second half records.
TEST(SelectionCount, MonotoneInValidRegime) {
    std::size_t sequences = 0, counterexamples_outside = 0;
    for (unsigned n = 1; n <= 3; ++n) {
        const Index dim = dimension(n);
        const Index masks = Index{1} << dim;
        auto to_mask = [&](Index bits) {
            return SelectionMask::from_predicate(n, [&](Index x) { return (bits >> x) & 1u; });
        };
        std::vector<SelectionMask> all;
        for (Index b = 0; b < masks; ++b) all.push_back(to_mask(b));

        struct Frame {
            StateVector state;
            std::vector<unsigned> history;
            bool valid;
        };
        std::vector<Frame> frontier{{uniform_init(n), std::vector<unsigned>(dim, 0), true}};
        for (unsigned depth = 1; depth <= 3; ++depth) {
            std::vector<Frame> next;
            if (depth < 3) next.reserve(frontier.size() * masks);
            for (const Frame& f : frontier) {
                for (Index b = 0; b < masks; ++b) {
                    const auto& m = all[b];
                    const auto flipped = oracle_flip(f.state, m);
                    const double mu1 = flipped.mean();
                    const auto once = invert_about_mean(flipped);
                    const auto flipped2 = oracle_flip(once, m);
                    const double mu2 = flipped2.mean();
                    const auto twice = invert_about_mean(flipped2);
                    bool valid = f.valid && mu1 > -tolerance::validity && mu2 > -tolerance::validity;
                    std::vector<unsigned> hist = f.history;
                    for (Index x = 0; x < dim; ++x) {
                        if (m[x]) hist[x] |= 1u << (depth - 1);
                        else valid &= twice[x] > -tolerance::validity;
                    }
                    ++sequences;
                    for (Index a = 0; a < dim; ++a)
                        for (Index c = 0; c < dim; ++c) {
                            if (a == c || (hist[a] & hist[c]) != hist[c]) continue;
                            const bool ordered = std::abs(twice[a]) >= std::abs(twice[c]) - 1e-12;
                            if (valid) ASSERT_TRUE(ordered) << "n=" << n << " depth=" << depth;
                            else counterexamples_outside += !ordered;
                        }
                    if (depth < 3) next.push_back({twice, std::move(hist), valid});
                }
            }
            frontier = std::move(next);
        }
    }
    EXPECT_GT(sequences, 16'000'000u);
    EXPECT_GT(counterexamples_outside, 0u);
}
