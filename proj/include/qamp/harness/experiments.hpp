#pragma once

// Seeded experiment drivers behind `qamp experiment ...`. Each trial owns the
// stream Rng(seed_base + t).split(n); results land in per-trial slots, so the
// emitted tables do not depend on thread count or scheduling.

#include <qamp/dynamic.hpp>
#include <qamp/grover.hpp>
#include <qamp/harness/config.hpp>
#include <qamp/harness/csv.hpp>
#include <qamp/harness/parallel.hpp>
#include <qamp/harness/svg.hpp>
#include <qamp/recommend.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

namespace qamp::harness {

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline Rng trial_rng(const ExperimentConfig& cfg, std::size_t trial, unsigned n) {
    return Rng(cfg.seed_base + trial).split(n);
}

namespace detail {

class Stopwatch {
public:
    [[nodiscard]] double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// The `count` states most similar to the reference, ties broken by index.
inline SelectionMask top_similar(const SimilaritySpec& spec, std::size_t count) {
    std::vector<Index> order(dimension(spec.n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return similarity(a, spec) > similarity(b, spec); });
    order.resize(std::min<std::size_t>(count, order.size()));
    return SelectionMask::from_indices(spec.n, order);
}

/// Static Grover iterations until probability_of(target) first exceeds 1/2.
inline std::uint64_t static_steps_to_half(const SelectionMask& target) {
    StateVector s = uniform_init(target.qubits());
    const auto cap = 4 * static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(target.size())))) + 4;
    std::uint64_t k = 0;
    while (probability_of(s, target) <= 0.5 && k < cap) {
        s = grover_iteration(std::move(s), target);
        ++k;
    }
    return k;
}

inline SelectionProbabilityParams dynamic_params(const ExperimentConfig& cfg, unsigned n, double m_target) {
    if (cfg.beta) return SelectionProbabilityParams::from_beta(n, *cfg.beta);
    return calibrate_beta(n, m_target);
}

inline void write_file(const std::filesystem::path& path, const auto& writer) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    writer(out);
    if (!out) throw ConfigError("write failed for " + path.string());
}

} // namespace detail

// ---------------------------------------------------------------- steps

struct StepsRun {
    unsigned n = 0;
    std::uint64_t seed = 0;
    std::uint64_t static_steps = 0;
    /// Doubled rounds until the expected selected probability exceeds 1/2.
    std::size_t dynamic_rounds = 0;
    bool crossed = false;
    /// No round up to the crossing left the productive regime.
    bool validity_ok = true;
    double final_gain = 0.0;
    double wall_ms = 0.0;
};

struct StepsSummary {
    unsigned n = 0;
    double static_steps = 0.0;
    double dynamic_rounds = 0.0;
    double dynamic_inner_iterations = 0.0;
    std::size_t seeds = 0;
    std::size_t crossed = 0;
    std::size_t validity_ok = 0;
};

struct StepsResult {
    double m_target = 0.0;
    std::vector<StepsRun> runs;
    std::vector<StepsSummary> summary;

    [[nodiscard]] CsvTable runs_csv() const {
        CsvTable t({"n", "seed", "static_steps", "dynamic_rounds", "dynamic_inner_iterations", "crossed", "validity_ok",
                    "final_gain", "wall_ms"});
        for (const auto& r : runs)
            t.push(CsvRow()
                       .add(r.n)
                       .add(r.seed)
                       .add(r.static_steps)
                       .add(r.dynamic_rounds)
                       .add(2 * r.dynamic_rounds)
                       .add(r.crossed)
                       .add(r.validity_ok)
                       .add(r.final_gain)
                       .add(r.wall_ms));
        return t;
    }

    [[nodiscard]] CsvTable summary_csv() const {
        CsvTable t({"n", "static_steps", "dynamic_rounds", "dynamic_inner_iterations", "seeds", "crossed", "validity_ok"});
        for (const auto& s : summary)
            t.push(CsvRow()
                       .add(s.n)
                       .add(s.static_steps)
                       .add(s.dynamic_rounds)
                       .add(s.dynamic_inner_iterations)
                       .add(s.seeds)
                       .add(s.crossed)
                       .add(s.validity_ok));
        return t;
    }

    [[nodiscard]] Chart chart() const {
        Chart c{"Steps until selected probability exceeds 1/2", "qubits n", "median steps", {}};
        Series st{"static iterations", {}, "", false}, dy{"dynamic rounds", {}, "", false},
            inner{"dynamic inner iterations", {}, "", true};
        for (const auto& s : summary) {
            st.points.emplace_back(s.n, s.static_steps);
            dy.points.emplace_back(s.n, s.dynamic_rounds);
            inner.points.emplace_back(s.n, s.dynamic_inner_iterations);
        }
        c.series = {st, dy, inner};
        return c;
    }
};

inline StepsResult experiment_steps(const ExperimentConfig& cfg) {
    cfg.validate();
    StepsResult result;
    result.m_target = cfg.m_target.value_or(4.0);
    const auto target_size = static_cast<std::size_t>(std::llround(result.m_target));

    struct PerN {
        unsigned n;
        std::uint64_t static_steps;
        SelectionPolicy policy;
        std::size_t cap;
    };
    std::vector<PerN> setups;
    for (unsigned n = cfg.n_range.lo; n <= cfg.n_range.hi; ++n) {
        const SimilaritySpec spec(n, cfg.reference);
        if (static_cast<double>(target_size) >= static_cast<double>(dimension(n)) / 2.0)
            throw ConfigError("m = " + std::to_string(target_size) + " must be below 2^n / 2 at n = " + std::to_string(n));
        const auto policy = similarity_policy(spec, detail::dynamic_params(cfg, n, result.m_target));
        setups.push_back({n, detail::static_steps_to_half(detail::top_similar(spec, target_size)), policy,
                          8 * default_rounds(policy) + 16});
    }

    const std::size_t per_n = cfg.seeds;
    result.runs.resize(setups.size() * per_n);
    parallel_for(result.runs.size(), cfg.threads, [&](std::size_t i) {
        const PerN& setup = setups[i / per_n];
        const std::size_t t = i % per_n;
        const detail::Stopwatch clock;
        StepsRun r;
        r.n = setup.n;
        r.seed = cfg.seed_base + t;
        r.static_steps = setup.static_steps;
        Rng rng = trial_rng(cfg, t, setup.n);
        DynamicOptions opts;
        opts.enforce_validity = false;
        opts.record_masks = false;
        opts.on_round = [&](const RoundInfo& info) {
            return setup.policy.expected_selected_probability(info.state) <= 0.5;
        };
        const DynamicRun run = run_dynamic(setup.n, setup.policy, setup.cap, rng, opts);
        r.dynamic_rounds = run.log.rounds;
        r.crossed = !run.log.expected_selected_probability.empty() && run.log.expected_selected_probability.back() > 0.5;
        r.validity_ok = std::all_of(run.log.validity.begin(), run.log.validity.end(),
                                    [](const RoundValidity& v) { return v.ok(); });
        r.final_gain = run.log.gain_trajectory.empty() ? 0.0 : run.log.gain_trajectory.back().gain;
        r.wall_ms = clock.ms();
        result.runs[i] = r;
    });

    for (std::size_t k = 0; k < setups.size(); ++k) {
        StepsSummary s;
        s.n = setups[k].n;
        std::vector<double> st, dy;
        for (std::size_t t = 0; t < per_n; ++t) {
            const StepsRun& r = result.runs[k * per_n + t];
            st.push_back(static_cast<double>(r.static_steps));
            // A run that never crossed counts as its cap, which keeps the median honest.
            dy.push_back(static_cast<double>(r.crossed ? r.dynamic_rounds : setups[k].cap + 1));
            s.crossed += r.crossed;
            s.validity_ok += r.validity_ok;
        }
        s.seeds = per_n;
        s.static_steps = median(st);
        s.dynamic_rounds = median(dy);
        s.dynamic_inner_iterations = 2.0 * s.dynamic_rounds;
        result.summary.push_back(s);
    }
    return result;
}

// ---------------------------------------------------------------- accuracy

struct AccuracyRun {
    std::uint64_t seed = 0;
    std::size_t rounds = 0;
    bool validity_ok = true;
    /// Final sampling probability per similarity class, indexed 0..n.
    std::vector<double> mass;
    double wall_ms = 0.0;
};

struct AccuracyResult {
    unsigned n = 0;
    unsigned threshold = 0;
    Index static_set_size = 0;
    std::uint64_t static_iterations = 0;
    double beta = 0.0;
    double m_target = 0.0;
    std::size_t dynamic_rounds = 0;
    std::vector<double> p_static;
    std::vector<double> p_dynamic;         ///< mean over seeds
    std::vector<double> p_dynamic_median;  ///< per-class median over seeds
    std::vector<AccuracyRun> runs;

    [[nodiscard]] CsvTable curve_csv() const {
        CsvTable t({"S", "p_static", "p_dynamic", "p_dynamic_median", "states"});
        for (unsigned s = 0; s <= n; ++s)
            t.push(CsvRow()
                       .add(s)
                       .add(p_static[s])
                       .add(p_dynamic[s])
                       .add(p_dynamic_median[s])
                       .add(static_cast<std::uint64_t>(std::llround(std::exp(qamp::detail::log_binomial(n, s))))));
        return t;
    }

    [[nodiscard]] CsvTable runs_csv() const {
        std::vector<std::string> header{"n", "seed", "rounds", "validity_ok"};
        for (unsigned s = 0; s <= n; ++s) header.push_back("p_S" + std::to_string(s));
        header.push_back("wall_ms");
        CsvTable t(std::move(header));
        for (const auto& r : runs) {
            CsvRow row;
            row.add(n).add(r.seed).add(r.rounds).add(r.validity_ok);
            for (double m : r.mass) row.add(m);
            row.add(r.wall_ms);
            t.push(std::move(row));
        }
        return t;
    }

    [[nodiscard]] Chart chart() const {
        Chart c{"Sampling probability by similarity (n = " + std::to_string(n) + ")", "similarity S",
                "probability of sampling", {}};
        Series st{"static (S >= " + std::to_string(threshold) + ")", {}, "", false}, dy{"dynamic (mean)", {}, "", false};
        for (unsigned s = 0; s <= n; ++s) {
            st.points.emplace_back(s, p_static[s]);
            dy.points.emplace_back(s, p_dynamic[s]);
        }
        c.series = {st, dy};
        return c;
    }
};

inline AccuracyResult experiment_accuracy(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.n_range.count() != 1) throw ConfigError("accuracy runs at a single n; pass --n");
    AccuracyResult result;
    const unsigned n = result.n = cfg.n_range.lo;
    result.threshold = cfg.threshold;
    const SimilaritySpec spec(n, cfg.reference);

    const auto static_mask = SelectionMask::from_predicate(n, [&](Index x) { return similarity(x, spec) >= cfg.threshold; });
    result.static_set_size = static_mask.count();
    result.static_iterations = scheduled_iterations(static_mask.size(), static_mask.count());
    StateVector s = uniform_init(n);
    for (std::uint64_t k = 0; k < result.static_iterations; ++k) s = grover_iteration(std::move(s), static_mask);
    result.p_static = similarity_mass(s, spec);

    result.m_target = cfg.m_target.value_or(static_cast<double>(result.static_set_size));
    const auto params = detail::dynamic_params(cfg, n, result.m_target);
    result.beta = params.beta();
    const SelectionPolicy policy = similarity_policy(spec, params);
    result.dynamic_rounds = default_rounds(policy);

    result.runs.resize(cfg.seeds);
    parallel_for(cfg.seeds, cfg.threads, [&](std::size_t t) {
        const detail::Stopwatch clock;
        Rng rng = trial_rng(cfg, t, n);
        DynamicOptions opts;
        opts.enforce_validity = false;
        opts.record_masks = false;
        const DynamicRun run = run_dynamic(n, policy, result.dynamic_rounds, rng, opts);
        AccuracyRun& r = result.runs[t];
        r.seed = cfg.seed_base + t;
        r.rounds = run.log.rounds;
        r.validity_ok = std::all_of(run.log.validity.begin(), run.log.validity.end(),
                                    [](const RoundValidity& v) { return v.ok(); });
        r.mass = similarity_mass(run.state, spec);
        r.wall_ms = clock.ms();
    });

    result.p_dynamic.assign(n + 1, 0.0);
    result.p_dynamic_median.assign(n + 1, 0.0);
    for (unsigned c = 0; c <= n; ++c) {
        std::vector<double> column;
        for (const auto& r : result.runs) column.push_back(r.mass[c]);
        result.p_dynamic[c] = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(column.size());
        result.p_dynamic_median[c] = median(std::move(column));
    }
    return result;
}

// ---------------------------------------------------------------- corollaries

struct CheckRow {
    std::string check;
    unsigned n = 0;
    std::size_t trials = 0;
    std::size_t failed = 0;
    /// Worst measured value; compared against `limit` as described per check.
    double worst = 0.0;
    double limit = 0.0;

    /// A check with no eligible trials at this n (e.g. no state meets its precondition) passes vacuously.
    [[nodiscard]] bool pass() const noexcept { return failed == 0; }
    [[nodiscard]] std::string_view status() const noexcept { return failed ? "fail" : trials ? "pass" : "empty"; }
};

struct CorollaryReport {
    std::vector<CheckRow> rows;

    [[nodiscard]] bool all_passed() const {
        return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass(); });
    }

    [[nodiscard]] CsvTable csv() const {
        CsvTable t({"check", "n", "trials", "failed", "worst", "limit", "status"});
        for (const auto& r : rows)
            t.push(CsvRow().add(r.check).add(r.n).add(r.trials).add(r.failed).add(r.worst).add(r.limit).add(
                r.status()));
        return t;
    }
};

namespace detail {

inline StateVector random_state(unsigned n, Rng& rng) {
    std::vector<double> amps(dimension(n));
    double norm = 0.0;
    for (double& a : amps) {
        a = 2.0 * rng.uniform() - 1.0;
        norm += a * a;
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (double& a : amps) a *= scale;
    return StateVector::from_amplitudes(n, std::move(amps));
}

inline double l2_distance(const StateVector& a, const StateVector& b) {
    double d = 0.0;
    for (Index x = 0; x < a.size(); ++x) d += (a[x] - b[x]) * (a[x] - b[x]);
    return std::sqrt(d);
}

inline SelectionMask random_mask_of_size(unsigned n, Index count, Rng& rng) {
    std::vector<Index> order(dimension(n));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index i = 0; i < count; ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);
    order.resize(count);
    return SelectionMask::from_indices(n, order);
}

} // namespace detail

inline constexpr std::size_t kIdentityTrials = 1000;
inline constexpr std::size_t kGainMasks = 500;
inline constexpr double kIdentityTolerance = 1e-10;

/// Check names and their pass rules:
///   identity_empty, identity_full   L2(after, before) <= limit for a round of random states
///   corollary2_single_witness       a single-iteration round then an empty round inverts the ordering
///   corollary2_ordering             the configured round keeps selected-once >= never-selected
///   gain_bound                      G / bound < 1 while the next step keeps unselected amplitudes positive
///   next_step_prediction            corollary1_check predicts the sign of the next unselected amplitudes
inline CorollaryReport experiment_corollaries(const ExperimentConfig& cfg) {
    cfg.validate();
    const InnerSteps inner = cfg.skip_second_inner ? InnerSteps::skip_second : InnerSteps::both;
    const IterationMode mode = cfg.skip_second_inner ? IterationMode::single : IterationMode::doubled;
    const std::size_t span = cfg.n_range.count();
    const std::size_t identity_per_n = (kIdentityTrials + 2 * span - 1) / (2 * span);
    const std::size_t gain_per_n = (kGainMasks + span - 1) / span;

    constexpr std::size_t kChecks = 6;
    std::vector<CheckRow> rows(span * kChecks);
    parallel_for(span, cfg.threads, [&](std::size_t k) {
        const unsigned n = cfg.n_range.lo + static_cast<unsigned>(k);
        const Index states = dimension(n);
        const Rng base = Rng(cfg.seed_base).split(n);
        CheckRow* out = &rows[k * kChecks];

        for (int which = 0; which < 2; ++which) {
            CheckRow& row = out[which];
            row = {which == 0 ? "identity_empty" : "identity_full", n, identity_per_n, 0, 0.0, kIdentityTolerance};
            Rng rng = base.split(static_cast<std::uint64_t>(which));
            const SelectionMask mask = which == 0 ? SelectionMask(n) : SelectionMask::full(n);
            for (std::size_t t = 0; t < identity_per_n; ++t) {
                const StateVector s = detail::random_state(n, rng);
                const double err = detail::l2_distance(dynamic_iteration(s, mask, inner), s);
                row.worst = std::max(row.worst, err);
                if (!(err <= kIdentityTolerance)) ++row.failed;
            }
        }

        // Ordering witnesses over every selected-set size with 4 N_s <= N.
        CheckRow& witness = out[2];
        CheckRow& ordering = out[3];
        witness = {"corollary2_single_witness", n, 0, 0, -std::numeric_limits<double>::infinity(), 0.0};
        ordering = {"corollary2_ordering", n, 0, 0, -std::numeric_limits<double>::infinity(), 0.0};
        Rng mask_rng = base.split(2);
        for (Index ns = 1; 4 * ns <= states; ns *= 2) {
            for (int rep = 0; rep < 4; ++rep) {
                const SelectionMask m = detail::random_mask_of_size(n, ns, mask_rng);
                const auto single = corollary2_demo(n, m, IterationMode::single);
                // Margin by which the never-selected state sits above the selected one.
                const double single_margin = single.never_selected - single.selected_once;
                ++witness.trials;
                witness.worst = std::max(witness.worst, -single_margin);
                if (!single.ordering_violated()) ++witness.failed;

                const auto w = corollary2_demo(n, m, mode);
                ++ordering.trials;
                ordering.worst = std::max(ordering.worst, w.never_selected - w.selected_once);
                if (w.ordering_violated()) ++ordering.failed;
            }
        }

        CheckRow& gain = out[4];
        CheckRow& predict = out[5];
        gain = {"gain_bound", n, 0, 0, 0.0, 1.0};
        predict = {"next_step_prediction", n, 0, 0, 0.0, 0.0};
        Rng gain_rng = base.split(3);
        for (std::size_t t = 0; t < gain_per_n; ++t) {
            SelectionMask m(n);
            do {
                const double density = gain_rng.uniform() * 0.3;
                m = SelectionMask::from_predicate(n, [&](Index) { return gain_rng.bernoulli(density); });
                if (m.none()) m.set(gain_rng.below(states), true);
            } while (2 * m.count() >= states);
            const double bound = gain_upper_bound(states, m.count());
            StateVector s = uniform_init(n);
            while (true) {
                StateVector next = grover_iteration(s, m);
                const double next_min = gain_report(next, m).min_unselected_amp;
                const bool predicted = corollary1_check(s, m, 1.0).next_step_unselected_positive;
                ++predict.trials;
                // Amplitudes that land on zero up to rounding are ambiguous; only clear signs count.
                if (std::abs(next_min) > 1e-9 && predicted != (next_min > 0.0)) {
                    ++predict.failed;
                    predict.worst = static_cast<double>(predict.failed);
                }
                if (!(next_min > 1e-12)) break;
                const double ratio = gain_report(s, m).gain / bound;
                ++gain.trials;
                gain.worst = std::max(gain.worst, ratio);
                if (!(ratio < 1.0)) ++gain.failed;
                s = std::move(next);
            }
        }
    });
    return CorollaryReport{std::move(rows)};
}

// ---------------------------------------------------------------- output

/// Writes the files an experiment produces and returns their paths.
inline std::vector<std::filesystem::path> write_steps(const StepsResult& r, const ExperimentConfig& cfg) {
    std::vector<std::filesystem::path> paths;
    if (cfg.wants_csv()) {
        paths.push_back(cfg.output_dir / "steps.csv");
        detail::write_file(paths.back(), [&](std::ostream& o) { r.summary_csv().write(o); });
        paths.push_back(cfg.output_dir / "steps_runs.csv");
        detail::write_file(paths.back(), [&](std::ostream& o) { r.runs_csv().write(o); });
    }
    if (cfg.wants_svg()) {
        paths.push_back(cfg.output_dir / "steps.svg");
        detail::write_file(paths.back(), [&](std::ostream& o) { write_svg(o, r.chart()); });
    }
    return paths;
}

inline std::vector<std::filesystem::path> write_accuracy(const AccuracyResult& r, const ExperimentConfig& cfg) {
    std::vector<std::filesystem::path> paths;
    if (cfg.wants_csv()) {
        paths.push_back(cfg.output_dir / "accuracy.csv");
        detail::write_file(paths.back(), [&](std::ostream& o) { r.curve_csv().write(o); });
        paths.push_back(cfg.output_dir / "accuracy_runs.csv");
        detail::write_file(paths.back(), [&](std::ostream& o) { r.runs_csv().write(o); });
    }
    if (cfg.wants_svg()) {
        paths.push_back(cfg.output_dir / "accuracy.svg");
        detail::write_file(paths.back(), [&](std::ostream& o) { write_svg(o, r.chart()); });
    }
    return paths;
}

/// The report is tabular only, so it is written as CSV whatever the format.
inline std::vector<std::filesystem::path> write_corollaries(const CorollaryReport& r, const ExperimentConfig& cfg) {
    const auto path = cfg.output_dir / "corollaries.csv";
    detail::write_file(path, [&](std::ostream& o) { r.csv().write(o); });
    return {path};
}

} // namespace qamp::harness
