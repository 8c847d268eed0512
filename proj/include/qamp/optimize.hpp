#pragma once

// Optimization over a dense objective table: threshold-descent minimum/maximum
// finding on top of unknown-M Grover search, and a single dynamic Grover pass
// driven by a probability that favors good objective values.

#include <qamp/dynamic.hpp>
#include <qamp/grover.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace qamp {

enum class Sense { minimize, maximize };

inline std::string_view to_string(Sense s) { return s == Sense::minimize ? "min" : "max"; }

class ObjectiveTable {
public:
    ObjectiveTable(unsigned n, std::vector<double> values, Sense sense)
        : n_(n), values_(std::move(values)), sense_(sense) {
        const Index dim = dimension(n);
        if (values_.size() != dim)
            throw ShapeError("objective has " + std::to_string(values_.size()) + " values, expected " +
                             std::to_string(dim));
        for (Index x = 0; x < dim; ++x)
            if (!std::isfinite(values_[x])) throw InvalidParamsError("objective value at " + std::to_string(x) + " is not finite");
    }

    /// Header `n=<int> sense=<min|max>`, then 2^n whitespace-separated reals.
    static ObjectiveTable parse(std::istream& in) {
        std::string header;
        if (!std::getline(in, header)) throw ParseError("objective file is empty");
        std::istringstream hs(header);
        std::string field;
        std::optional<unsigned> n;
        std::optional<Sense> sense;
        while (hs >> field) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) throw ParseError("objective header: expected key=value, got '" + field + "'");
            const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
            if (key == "n") {
                unsigned v = 0;
                const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
                if (ec != std::errc{} || p != value.data() + value.size())
                    throw ParseError("objective header: bad n '" + value + "'");
                n = v;
            } else if (key == "sense") {
                if (value == "min") sense = Sense::minimize;
                else if (value == "max") sense = Sense::maximize;
                else throw ParseError("objective header: sense must be min or max, got '" + value + "'");
            } else {
                throw ParseError("objective header: unknown key '" + key + "'");
            }
        }
        if (!n || !sense) throw ParseError("objective header needs both n= and sense=");
        const Index dim = dimension(*n);

        std::vector<double> values;
        values.reserve(dim);
        std::string token;
        while (in >> token) {
            double v = 0.0;
            const auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc{} || p != token.data() + token.size())
                throw ParseError("objective value " + std::to_string(values.size()) + ": cannot parse '" + token + "'");
            values.push_back(v);
        }
        if (values.size() != dim)
            throw ParseError("objective lists " + std::to_string(values.size()) + " values, header promises " +
                             std::to_string(dim));
        return {*n, std::move(values), *sense};
    }

    void write(std::ostream& out) const {
        out << "n=" << n_ << " sense=" << to_string(sense_) << '\n';
        char buf[32];
        for (Index x = 0; x < values_.size(); ++x) {
            const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, values_[x]);
            out.write(buf, p - buf);
            out << ((x + 1) % 16 == 0 ? '\n' : ' ');
        }
        out << '\n';
    }

    [[nodiscard]] unsigned qubits() const noexcept { return n_; }
    [[nodiscard]] Index size() const noexcept { return values_.size(); }
    [[nodiscard]] Sense sense() const noexcept { return sense_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](Index x) const { return values_.at(x); }

    /// Strictly better under the table's sense.
    [[nodiscard]] bool better(double a, double b) const noexcept {
        return sense_ == Sense::minimize ? a < b : a > b;
    }

    /// Brute-force optimum; lowest index on ties.
    [[nodiscard]] Index best_index() const {
        Index best = 0;
        for (Index x = 1; x < values_.size(); ++x)
            if (better(values_[x], values_[best])) best = x;
        return best;
    }

    /// Fraction of entries strictly better than values[x]; 0 for an optimum.
    [[nodiscard]] double better_fraction(Index x) const {
        const double v = values_.at(x);
        const auto count = std::count_if(values_.begin(), values_.end(), [&](double w) { return better(w, v); });
        return static_cast<double>(count) / static_cast<double>(values_.size());
    }

private:
    unsigned n_;
    std::vector<double> values_;
    Sense sense_;
};

struct OptimizationResult {
    Index best_index = 0;
    double best_value = 0.0;
    std::uint64_t grover_iterations_total = 0;
    /// durr_hoyer: inner searches run, including the final unsuccessful one.
    /// dynamic_optimize: dynamic rounds executed.
    std::size_t outer_rounds = 0;
    /// best_value equals the brute-force optimum.
    bool optimal = false;
    bool flat_objective = false;
};

namespace detail {
inline void finish(OptimizationResult& r, const ObjectiveTable& table) {
    r.best_value = table[r.best_index];
    r.optimal = !table.better(table[table.best_index()], r.best_value);
}
} // namespace detail

struct DurrHoyerOptions {
    UnknownMOptions inner;
    /// Called before each inner search with the incumbent and the marked set it induces.
    std::function<void(Index incumbent, const SelectionMask& marked)> on_round;
};

/// Threshold descent from x_o = 0: mark everything strictly better than the
/// incumbent, search with unknown M, move to any improvement found, stop when
/// the inner search gives up.
inline OptimizationResult durr_hoyer(const ObjectiveTable& table, Rng& rng, const DurrHoyerOptions& options = {}) {
    const unsigned n = table.qubits();
    const auto values = table.values();
    OptimizationResult result;
    Index incumbent = 0;
    while (true) {
        const double threshold = values[incumbent];
        StaticSearchSpec spec(SelectionMask::from_predicate(n, [&](Index x) { return table.better(values[x], threshold); }),
                              false);
        if (options.on_round) options.on_round(incumbent, spec.marked);
        const SearchResult found = search_unknown_m(spec, rng, options.inner);
        ++result.outer_rounds;
        result.grover_iterations_total += found.iterations_used;
        if (!found.found) break;
        incumbent = found.outcome;
    }
    result.best_index = incumbent;
    detail::finish(result, table);
    return result;
}

struct OptimizationPolicy {
    SelectionPolicy policy;
    double estimated_worst = 0.0;
    double estimated_best = 0.0;
    /// Every probe returned the same value; the policy selects everything.
    bool flat = false;
};

/// r(x) = clamp((f(x) - worst) / (best - worst), 0, 1) from the probed range,
/// P_s(x) = 2^(sharpness * n * (r(x) - 1)). sharpness = 1 meets both selection
/// limits exactly at the probed extremes; larger values narrow the selected band.
inline OptimizationPolicy build_optimization_policy(const ObjectiveTable& table, std::size_t sample_budget, Rng& rng,
                                                    double sharpness = 16.0) {
    if (sample_budget < 2) throw InvalidParamsError("build_optimization_policy: sample_budget must be at least 2");
    if (!(sharpness >= 1.0)) throw InvalidParamsError("build_optimization_policy: sharpness must be at least 1");
    const unsigned n = table.qubits();

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sample_budget; ++i) {
        const double v = table[rng.below(table.size())];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const bool minimize = table.sense() == Sense::minimize;
    OptimizationPolicy out{SelectionPolicy::fixed(SelectionMask::full(n)), minimize ? hi : lo, minimize ? lo : hi,
                           lo == hi};
    if (out.flat) return out;

    const double worst = out.estimated_worst, span = out.estimated_best - out.estimated_worst;
    const double exponent = sharpness * static_cast<double>(n);
    out.policy = SelectionPolicy::from_rule(n, [&](Index x) {
        const double r = std::clamp((table[x] - worst) / span, 0.0, 1.0);
        return std::exp2(exponent * (r - 1.0));
    });
    return out;
}

/// Rounds spent by dynamic_optimize: one round per four rotation steps of a
/// search whose marked set holds about N^(1/2) states, at least one. Depends on n only.
inline std::size_t dynamic_optimize_rounds(unsigned n) {
    const double states = static_cast<double>(dimension(n));
    const double theta = std::asin(std::pow(states, -0.25));
    const double steps = std::numbers::pi / (2.0 * theta) - 1.0;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(steps / 4.0)));
}

struct DynamicOptimizeOptions {
    double sharpness = 16.0;
    std::size_t candidates = 10;
    /// 0 means ceil(sqrt(N)).
    std::size_t sample_budget = 0;
    /// Overrides dynamic_optimize_rounds(n).
    std::optional<std::size_t> rounds;
};

/// Thrown when the dynamic pass leaves the valid regime. The incumbent is the
/// best of the candidates drawn from the state at the failing round.
class OptimizationValidityError : public ValidityError {
public:
    OptimizationValidityError(const ValidityError& cause, OptimizationResult incumbent)
        : ValidityError(cause), incumbent_(incumbent) {}
    [[nodiscard]] const OptimizationResult& incumbent() const noexcept { return incumbent_; }

private:
    OptimizationResult incumbent_;
};

inline OptimizationResult dynamic_optimize(const ObjectiveTable& table, Rng& rng, const DynamicOptimizeOptions& options = {}) {
    if (options.candidates < 1) throw InvalidParamsError("dynamic_optimize: need at least one candidate");
    const unsigned n = table.qubits();
    const std::size_t budget = options.sample_budget
                                   ? options.sample_budget
                                   : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(table.size()))));
    const OptimizationPolicy built = build_optimization_policy(table, budget, rng, options.sharpness);
    const std::size_t rounds = options.rounds.value_or(dynamic_optimize_rounds(n));

    auto pick = [&](const StateVector& state, std::size_t executed) {
        OptimizationResult r;
        r.flat_objective = built.flat;
        r.outer_rounds = executed;
        r.grover_iterations_total = 2 * executed;
        const BornSampler sampler(state);
        r.best_index = sampler(rng);
        for (std::size_t i = 1; i < options.candidates; ++i) {
            const Index x = sampler(rng);
            if (table.better(table[x], table[r.best_index])) r.best_index = x;
        }
        detail::finish(r, table);
        return r;
    };

    DynamicOptions dyn;
    dyn.record_masks = false;
    try {
        const DynamicRun run = run_dynamic(n, built.policy, rounds, rng, dyn);
        return pick(run.state, run.log.rounds);
    } catch (const ValidityError& e) {
        throw OptimizationValidityError(e, pick(e.partial().state, e.partial().log.rounds));
    }
}

} // namespace qamp
