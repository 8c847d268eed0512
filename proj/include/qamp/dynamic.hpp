#pragma once

// Dynamic Grover search: a probabilistic selection function is sampled once per
// round, and the stored mask drives two consecutive Grover iterations.
//
// Doubling is what keeps the amplitude ordering consistent with how often a
// state has been selected. With first-step post-flip mean mu1 and second-step
// mean mu2, a doubled iteration adds 2*(mu1 + mu2) to every selected amplitude
// and 2*(mu2 - mu1) to every unselected one. The gap between the two is 4*mu1,
// which is non-negative exactly when the first validity condition holds.

#include <qamp/grover.hpp>
#include <qamp/state_vector.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

namespace qamp {

/// Either a fixed mask, or an independent per-state selection probability.
class SelectionPolicy {
public:
    static SelectionPolicy fixed(SelectionMask mask) { return SelectionPolicy(std::move(mask)); }

    /// Probabilities are clamped to [0, 1]; NaN is rejected.
    static SelectionPolicy probabilistic(unsigned n, std::vector<double> probabilities) {
        const Index dim = dimension(n);
        if (probabilities.size() != dim) {
            throw ShapeError("selection rule has " + std::to_string(probabilities.size()) +
                             " entries, expected " + std::to_string(dim));
        }
        for (double& p : probabilities) {
            if (std::isnan(p)) throw InvalidParamsError("selection probability is NaN");
            p = std::clamp(p, 0.0, 1.0);
        }
        return SelectionPolicy(n, std::move(probabilities));
    }

    template <class Rule>
        requires std::invocable<Rule, Index>
    static SelectionPolicy from_rule(unsigned n, Rule&& rule) {
        std::vector<double> p(dimension(n));
        for (Index x = 0; x < p.size(); ++x) p[x] = static_cast<double>(rule(x));
        return probabilistic(n, std::move(p));
    }

    [[nodiscard]] unsigned qubits() const noexcept { return n_; }
    [[nodiscard]] Index size() const noexcept { return Index{1} << n_; }
    [[nodiscard]] bool is_fixed() const noexcept { return std::holds_alternative<SelectionMask>(rule_); }

    [[nodiscard]] const SelectionMask* fixed_mask() const noexcept { return std::get_if<SelectionMask>(&rule_); }
    [[nodiscard]] const std::vector<double>* probabilities() const noexcept {
        return std::get_if<std::vector<double>>(&rule_);
    }

    [[nodiscard]] double probability(Index x) const {
        if (const auto* m = fixed_mask()) return m->test(x) ? 1.0 : 0.0;
        return std::get<std::vector<double>>(rule_).at(x);
    }

    /// E[N_s] = sum of P_s(x).
    [[nodiscard]] double expected_count() const {
        if (const auto* m = fixed_mask()) return static_cast<double>(m->count());
        const auto& p = std::get<std::vector<double>>(rule_);
        return std::accumulate(p.begin(), p.end(), 0.0);
    }

    /// sum of P_s(x)^2; equals expected_count() exactly when the policy is deterministic.
    [[nodiscard]] double expected_count_squared() const {
        if (const auto* m = fixed_mask()) return static_cast<double>(m->count());
        const auto& p = std::get<std::vector<double>>(rule_);
        return std::transform_reduce(p.begin(), p.end(), 0.0, std::plus<>{}, [](double v) { return v * v; });
    }

    /// sum of P_s(x) * amps[x]^2: the chance that a draw from `state` lands in a fresh mask.
    template <class Real>
    [[nodiscard]] double expected_selected_probability(const BasicStateVector<Real>& state) const {
        if (state.qubits() != n_) throw ShapeError("policy and state differ in qubit count");
        if (const auto* m = fixed_mask()) return static_cast<double>(probability_of(state, *m));
        const auto& p = std::get<std::vector<double>>(rule_);
        const auto amps = state.amplitudes();
        double acc = 0.0;
        for (Index x = 0; x < amps.size(); ++x) acc += p[x] * static_cast<double>(amps[x] * amps[x]);
        return acc;
    }

private:
    explicit SelectionPolicy(SelectionMask mask) : n_(mask.qubits()), rule_(std::move(mask)) {}
    SelectionPolicy(unsigned n, std::vector<double> p) : n_(n), rule_(std::move(p)) {}

    unsigned n_;
    std::variant<SelectionMask, std::vector<double>> rule_;
};

/// Each state is selected independently with its own probability. One uniform
/// draw is consumed per basis state, so the stream position after a call does
/// not depend on the outcome. Fixed policies return their mask and draw nothing.
inline SelectionMask sample_mask(const SelectionPolicy& policy, Rng& rng) {
    if (const auto* m = policy.fixed_mask()) return *m;
    const auto& p = *policy.probabilities();
    return SelectionMask::from_predicate(policy.qubits(), [&](Index x) { return rng.uniform() < p[x]; });
}

inline SelectionMask sample_mask(const SelectionPolicy& policy, unsigned n, Rng& rng) {
    if (policy.qubits() != n) throw ShapeError("policy dimension differs from requested qubit count");
    return sample_mask(policy, rng);
}

/// `skip_second` exists only to demonstrate what goes wrong without doubling.
enum class InnerSteps { both, skip_second };

/// grover_iteration applied twice with the same stored mask.
template <class Real>
BasicStateVector<Real> dynamic_iteration(BasicStateVector<Real> state, const SelectionMask& mask,
                                         InnerSteps steps = InnerSteps::both) {
    state = grover_iteration(std::move(state), mask);
    if (steps == InnerSteps::both) state = grover_iteration(std::move(state), mask);
    return state;
}

struct GainReport {
    double p_selected = 0.0;
    double p_unselected = 0.0;
    /// P_s / P_us; +inf when nothing is left outside the mask.
    double gain = 0.0;
    /// Post-flip mean, the value the next inversion would reflect about.
    double mean_amplitude = 0.0;
    /// +inf when the mask is full.
    double min_unselected_amp = 0.0;
    /// N / (2 G); +inf when G == 0.
    double ns_bound = 0.0;
    Index ns_actual = 0;

    /// P_us == 0: every bit of probability sits on the selected set.
    [[nodiscard]] bool infinite_gain() const noexcept { return std::isinf(gain); }
};

template <class Real>
GainReport gain_report(const BasicStateVector<Real>& state, const SelectionMask& mask) {
    detail::require_same_shape(state, mask);
    GainReport r;
    const auto amps = state.amplitudes();
    double signed_sum = 0.0;
    double min_unselected = std::numeric_limits<double>::infinity();
    for (Index x = 0; x < amps.size(); ++x) {
        const double a = amps[x];
        if (mask[x]) {
            r.p_selected += a * a;
            signed_sum -= a;
        } else {
            r.p_unselected += a * a;
            signed_sum += a;
            min_unselected = std::min(min_unselected, a);
        }
    }
    const auto total_states = static_cast<double>(amps.size());
    r.mean_amplitude = signed_sum / total_states;
    r.min_unselected_amp = min_unselected;
    r.ns_actual = mask.count();
    r.gain = r.p_unselected > 0.0 ? r.p_selected / r.p_unselected : std::numeric_limits<double>::infinity();
    r.ns_bound = r.gain > 0.0 ? total_states / (2.0 * r.gain) : std::numeric_limits<double>::infinity();
    return r;
}

/// Largest gain a state with uniform positive group amplitudes can have while one
/// more iteration keeps the unselected amplitudes positive:
/// (N_s / (N - N_s)) * (N / (2 N_s) - 1)^2.
inline double gain_upper_bound(Index states, Index selected) {
    if (selected == 0 || selected >= states) throw InvalidParamsError("gain_upper_bound needs 0 < N_s < N");
    const auto n_total = static_cast<double>(states);
    const auto n_sel = static_cast<double>(selected);
    const double ratio = n_total / (2.0 * n_sel) - 1.0;
    return n_sel / (n_total - n_sel) * ratio * ratio;
}

struct Corollary1Check {
    /// Post-flip mean of the state under `mask` is positive.
    bool mean_positive = false;
    /// Every amplitude outside `mask` is positive.
    bool unselected_positive = false;
    /// N_s < N / (2 G_target).
    bool ns_bound_ok = false;
    /// General-state form of a_s / a_us < N/(2 N_s) - 1: one more iteration keeps
    /// every unselected amplitude positive.
    bool next_step_unselected_positive = false;

    [[nodiscard]] bool all() const noexcept { return mean_positive && unselected_positive && ns_bound_ok; }
};

template <class Real>
Corollary1Check corollary1_check(const BasicStateVector<Real>& state, const SelectionMask& mask, double gain_target) {
    const GainReport g = gain_report(state, mask);
    Corollary1Check c;
    c.mean_positive = g.mean_amplitude > -tolerance::validity;
    c.unselected_positive = g.min_unselected_amp > -tolerance::validity;
    c.ns_bound_ok = gain_target > 0.0 &&
                    static_cast<double>(mask.count()) < static_cast<double>(mask.size()) / (2.0 * gain_target);

    double max_unselected = -std::numeric_limits<double>::infinity();
    const auto amps = state.amplitudes();
    for (Index x = 0; x < amps.size(); ++x)
        if (!mask[x]) max_unselected = std::max(max_unselected, static_cast<double>(amps[x]));
    c.next_step_unselected_positive = mask.all() || 2.0 * g.mean_amplitude - max_unselected > -tolerance::validity;
    return c;
}

enum class IterationMode { single, doubled };

/// Amplitudes after selecting `first_mask` in one round and nothing in the next.
struct Corollary2Witness {
    /// Amplitude of a state selected in the first round only.
    double selected_once = 0.0;
    /// Amplitude of a state selected in neither round.
    double never_selected = 0.0;

    [[nodiscard]] bool ordering_violated() const noexcept { return selected_once < never_selected; }
};

/// Starts from the uniform state and applies the first-round mask, then the empty
/// mask, each either once (`single`, the failure the doubling rule fixes) or as a
/// dynamic iteration (`doubled`). From a uniform start every state in a group shares
/// one amplitude, so the first member of each group is reported.
inline Corollary2Witness corollary2_demo(unsigned n, const SelectionMask& first_mask,
                                         IterationMode mode = IterationMode::single) {
    if (first_mask.qubits() != n) throw ShapeError("corollary2_demo: mask dimension mismatch");
    if (first_mask.all()) throw DegenerateDecompositionError("corollary2_demo: no never-selected state left");

    const SelectionMask empty(n);
    StateVector state = uniform_init(n);
    if (mode == IterationMode::single) {
        state = grover_iteration(std::move(state), first_mask);
        state = grover_iteration(std::move(state), empty);
    } else {
        state = dynamic_iteration(std::move(state), first_mask);
        state = dynamic_iteration(std::move(state), empty);
    }

    Corollary2Witness w;
    std::optional<Index> sel, unsel;
    for (Index x = 0; x < state.size() && !(sel && unsel); ++x) {
        if (first_mask[x] && !sel) sel = x;
        if (!first_mask[x] && !unsel) unsel = x;
    }
    w.never_selected = state[*unsel];
    w.selected_once = sel ? state[*sel] : w.never_selected;
    return w;
}

/// Validity measurements for one round.
struct RoundValidity {
    double first_mean = 0.0;   ///< mean used by the first inversion
    double second_mean = 0.0;  ///< mean used by the second inversion (== first_mean if skipped)
    double min_unselected = 0.0;
    /// A full mask leaves the state unchanged, whatever sign its means take.
    bool full_mask = false;

    [[nodiscard]] bool ok() const noexcept {
        return full_mask || (first_mean > -tolerance::validity && second_mean > -tolerance::validity &&
                             min_unselected > -tolerance::validity);
    }
};

struct DynamicRunLog {
    /// One entry per round; left empty when mask recording is switched off.
    std::vector<SelectionMask> masks_per_round;
    /// Gain of the post-round state against that round's mask.
    std::vector<GainReport> gain_trajectory;
    /// Post-round sum of P_s(x) * amps[x]^2.
    std::vector<double> expected_selected_probability;
    std::vector<RoundValidity> validity;
    std::size_t rounds = 0;
};

struct DynamicRun {
    StateVector state;
    DynamicRunLog log;
};

/// Raised when a round leaves the productive regime (negative inversion mean or
/// negative unselected amplitude). Carries the state and log up to and
/// including the offending round.
class ValidityError : public Error {
public:
    ValidityError(DynamicRun partial, std::size_t round)
        : Error(describe(partial, round)), partial_(std::move(partial)), round_(round) {}

    [[nodiscard]] const DynamicRun& partial() const noexcept { return partial_; }
    /// Zero-based index of the round that failed.
    [[nodiscard]] std::size_t round() const noexcept { return round_; }

private:
    static std::string describe(const DynamicRun& run, std::size_t round) {
        const RoundValidity& v = run.log.validity.at(round);
        return "validity violated in round " + std::to_string(round + 1) +
               ": first mean " + std::to_string(v.first_mean) + ", second mean " +
               std::to_string(v.second_mean) + ", min unselected amplitude " +
               std::to_string(v.min_unselected);
    }

    DynamicRun partial_;
    std::size_t round_;
};

struct RoundInfo {
    std::size_t round;  ///< zero-based
    const StateVector& state;
    const SelectionMask& mask;
    const GainReport& gain;
};

struct DynamicOptions {
    bool enforce_validity = true;
    bool record_masks = true;
    InnerSteps inner = InnerSteps::both;
    /// Called after every round; returning false ends the run early.
    std::function<bool(const RoundInfo&)> on_round;
};

/// Rounds to run when the caller does not choose:
/// floor((pi/4) * sqrt(N / max(1, E)) / (1 + sum p^2 / E)).
/// For a fixed mask the divisor is 2, so doubled rounds add up to the static
/// optimum; for diffuse policies it tends to 1.
inline std::size_t default_rounds(const SelectionPolicy& policy) {
    const double expected = policy.expected_count();
    const double concentration = expected > 0.0 ? policy.expected_count_squared() / expected : 1.0;
    const double states = static_cast<double>(policy.size());
    const double base = std::numbers::pi / 4.0 * std::sqrt(states / std::max(1.0, expected));
    return static_cast<std::size_t>(std::floor(base / (1.0 + concentration)));
}

/// Uniform start, then per round: sample one mask, apply the dynamic iteration, log.
inline DynamicRun run_dynamic(unsigned n, const SelectionPolicy& policy, std::size_t rounds, Rng& rng,
                              const DynamicOptions& options = {}) {
    if (policy.qubits() != n) throw ShapeError("run_dynamic: policy dimension mismatch");
    DynamicRun run{uniform_init(n), {}};
    DynamicRunLog& log = run.log;
    log.gain_trajectory.reserve(rounds);
    log.validity.reserve(rounds);

    for (std::size_t r = 0; r < rounds; ++r) {
        SelectionMask mask = sample_mask(policy, rng);
        RoundValidity v;
        v.full_mask = mask.all();

        run.state = oracle_flip(std::move(run.state), mask);
        v.first_mean = run.state.mean();
        run.state = invert_about_mean(std::move(run.state));
        v.second_mean = v.first_mean;
        if (options.inner == InnerSteps::both) {
            run.state = oracle_flip(std::move(run.state), mask);
            v.second_mean = run.state.mean();
            run.state = invert_about_mean(std::move(run.state));
        }

        const GainReport gain = gain_report(run.state, mask);
        v.min_unselected = gain.min_unselected_amp;
        log.gain_trajectory.push_back(gain);
        log.expected_selected_probability.push_back(policy.expected_selected_probability(run.state));
        log.validity.push_back(v);
        log.rounds = r + 1;

        const bool keep_going = !options.on_round || options.on_round(RoundInfo{r, run.state, mask, gain});
        if (options.record_masks) log.masks_per_round.push_back(std::move(mask));

        if (options.enforce_validity && !v.ok()) throw ValidityError(std::move(run), r);
        if (!keep_going) break;
    }
    return run;
}

} // namespace qamp
