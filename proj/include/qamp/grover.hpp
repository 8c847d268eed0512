#pragma once

// Classic Grover search over a fixed marked set.

#include <qamp/state_vector.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace qamp {

struct StaticSearchSpec {
    StaticSearchSpec(SelectionMask marked_states, bool m_is_known = true)
        : n(marked_states.qubits()), marked(std::move(marked_states)), m_known(m_is_known) {}

    unsigned n;
    SelectionMask marked;
    bool m_known;
};

struct SearchResult {
    Index outcome = 0;
    std::uint64_t iterations_used = 0;
    /// probability_of(marked) in the final state.
    double success_probability = 0.0;
    /// False only for search_unknown_m giving up; `outcome` is then the last draw.
    bool found = true;
    /// probability_of(marked) after each iteration; empty unless requested.
    std::vector<double> trajectory;
};

/// floor((pi/4) * sqrt(N/M)).
inline std::uint64_t optimal_iterations(Index states, Index solutions) {
    if (solutions == 0) throw NoSolutionError("optimal_iterations: no marked states");
    if (solutions > states) throw InvalidParamsError("optimal_iterations: M exceeds N");
    const double ratio = static_cast<double>(states) / static_cast<double>(solutions);
    return static_cast<std::uint64_t>(std::floor(std::numbers::pi / 4.0 * std::sqrt(ratio)));
}

/// One oracle flip followed by one inversion about the mean.
template <class Real>
BasicStateVector<Real> grover_iteration(BasicStateVector<Real> state, const SelectionMask& mask) {
    return invert_about_mean(oracle_flip(std::move(state), mask));
}

/// Iteration count actually used by search(): the floor schedule, or none at all
/// when more than half the space is marked (uniform sampling already beats 1/2).
inline std::uint64_t scheduled_iterations(Index states, Index solutions) {
    if (2 * solutions > states) return 0;
    return optimal_iterations(states, solutions);
}

struct SearchOptions {
    bool record_trajectory = false;
};

struct UnknownMOptions {
    double growth = 6.0 / 5.0;
    /// Give up once the next attempt would push the total past budget_factor * sqrt(N).
    double budget_factor = 3.0;
};

/// Unknown-M search on the exponential schedule of Boyer, Brassard, Hoyer and Tapp.
///
/// Attempt j draws an iteration count uniformly from [0, min(ceil(growth^j), ceil(sqrt N))],
/// runs that many iterations from the uniform state and samples. The first marked
/// draw is returned. `found == false` signals that the budget ran out, which is
/// the expected outcome when the marked set is empty.
inline SearchResult search_unknown_m(const StaticSearchSpec& spec, Rng& rng, UnknownMOptions options = {}) {
    const SelectionMask& marked = spec.marked;
    const Index states = marked.size();
    const double root = std::sqrt(static_cast<double>(states));
    const auto budget = static_cast<std::uint64_t>(std::floor(options.budget_factor * root));
    const auto count_cap = static_cast<std::uint64_t>(std::ceil(root));

    SearchResult result;
    result.found = false;
    double scale = 1.0;
    while (true) {
        const auto upper = std::min(static_cast<std::uint64_t>(std::ceil(scale)), count_cap);
        const std::uint64_t k = rng.between(0, upper);
        if (result.iterations_used + k > budget) return result;

        StateVector state = uniform_init(spec.n);
        for (std::uint64_t i = 0; i < k; ++i) state = grover_iteration(std::move(state), marked);
        result.iterations_used += k;
        result.success_probability = probability_of(state, marked);
        result.outcome = sample(state, rng);
        if (marked[result.outcome]) {
            result.found = true;
            return result;
        }
        scale *= options.growth;
    }
}

/// Known-M search: scheduled_iterations() Grover iterations, then one sample.
/// Specs with m_known == false are forwarded to search_unknown_m().
inline SearchResult search(const StaticSearchSpec& spec, Rng& rng, SearchOptions options = {}) {
    const SelectionMask& marked = spec.marked;
    if (!spec.m_known) return search_unknown_m(spec, rng, {});
    if (marked.none()) throw NoSolutionError("search: marked set is empty");

    const std::uint64_t iterations = scheduled_iterations(marked.size(), marked.count());
    StateVector state = uniform_init(spec.n);
    SearchResult result;
    if (options.record_trajectory) result.trajectory.reserve(iterations);
    for (std::uint64_t k = 0; k < iterations; ++k) {
        state = grover_iteration(std::move(state), marked);
        if (options.record_trajectory) result.trajectory.push_back(probability_of(state, marked));
    }
    result.iterations_used = iterations;
    result.success_probability = probability_of(state, marked);
    result.outcome = sample(state, rng);
    return result;
}

} // namespace qamp
