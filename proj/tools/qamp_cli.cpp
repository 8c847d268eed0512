// qamp: command-line front end for the simulator, the search drivers and the
// experiment harness.
//
// Exit codes: 0 success, 2 configuration or input error, 3 invariant or
// validity failure, 4 under-amplified or not found.

#include <qamp/dynamic.hpp>
#include <qamp/grover.hpp>
#include <qamp/harness/config.hpp>
#include <qamp/harness/csv.hpp>
#include <qamp/harness/experiments.hpp>
#include <qamp/optimize.hpp>
#include <qamp/recommend.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace qamp;
namespace h = qamp::harness;

enum Exit : int { ok = 0, config_error = 2, invariant_failure = 3, not_found = 4 };

std::string bits_of(Index x, unsigned n) {
    std::string s(n, '0');
    for (unsigned b = 0; b < n; ++b)
        if ((x >> b) & 1U) s[n - 1 - b] = '1';
    return s;
}

std::string fmt(double v) { return h::format_number(v); }

void maybe_write(const std::optional<std::string>& dir, const std::string& name, const h::CsvTable& table) {
    if (!dir) return;
    const auto path = std::filesystem::path(*dir) / name;
    h::detail::write_file(path, [&](std::ostream& o) { table.write(o); });
    std::cout << "wrote " << path.string() << '\n';
}

void print_gain_trajectory(const std::vector<GainReport>& gains) {
    std::cout << "gain trajectory:";
    for (const auto& g : gains) std::cout << ' ' << std::setprecision(4) << g.gain;
    std::cout << std::setprecision(6) << '\n';
}

SelectionProbabilityParams pick_params(unsigned n, const std::optional<double>& beta, const std::optional<double>& m) {
    if (beta) return SelectionProbabilityParams::from_beta(n, *beta);
    // Default: four expected selections, fewer on tiny spaces so E stays within [1, N/2).
    const double fallback = std::max(1.0, std::min(4.0, static_cast<double>(dimension(n)) / 4.0));
    return calibrate_beta(n, m.value_or(fallback), {0.0, [](const std::string& w) { std::cerr << "warning: " << w << '\n'; }});
}

// ---------------------------------------------------------------- grover

struct GroverArgs {
    unsigned n = 4;
    std::vector<Index> marked;
    std::size_t m = 1;
    bool unknown_m = false;
    std::uint64_t seed = 0;
    std::optional<std::string> out;
};

int run_grover(const GroverArgs& a) {
    SelectionMask mask(a.n);
    if (a.marked.empty())
        for (Index x = 0; x < std::min<Index>(a.m, mask.size()); ++x) mask.set(x, true);
    else
        for (Index x : a.marked) mask.set(x, true);
    Rng rng(a.seed);
    const StaticSearchSpec spec(mask, !a.unknown_m);
    const SearchResult r = search(spec, rng, {true});
    std::cout << "n=" << a.n << " marked=" << mask.count() << " iterations=" << r.iterations_used
              << " success_probability=" << fmt(r.success_probability) << '\n';
    std::cout << "outcome " << r.outcome << " (" << bits_of(r.outcome, a.n) << ") "
              << (mask[r.outcome] ? "marked" : "unmarked") << '\n';

    h::CsvTable t({"n", "seed", "iteration", "success_probability"});
    for (std::size_t k = 0; k < r.trajectory.size(); ++k)
        t.push(h::CsvRow().add(a.n).add(a.seed).add(k + 1).add(r.trajectory[k]));
    maybe_write(a.out, "grover.csv", t);
    return r.found ? ok : not_found;
}

// ---------------------------------------------------------------- dynamic

struct DynamicArgs {
    unsigned n = 10;
    Index reference = 0;
    std::optional<double> m;
    std::optional<double> beta;
    std::optional<std::size_t> rounds;
    bool no_validity = false;
    std::uint64_t seed = 0;
    std::optional<std::string> out;
};

int run_dynamic_cmd(const DynamicArgs& a) {
    const SimilaritySpec spec(a.n, a.reference);
    const auto params = pick_params(a.n, a.beta, a.m);
    const SelectionPolicy policy = similarity_policy(spec, params);
    const std::size_t rounds = a.rounds.value_or(default_rounds(policy));
    Rng rng(a.seed);
    DynamicOptions opts;
    opts.enforce_validity = !a.no_validity;
    opts.record_masks = false;

    auto report = [&](const DynamicRun& run) {
        std::cout << "n=" << a.n << " beta=" << fmt(params.beta()) << " E[N_s]=" << fmt(params.expected_selected())
                  << " rounds=" << run.log.rounds << " inner_iterations=" << 2 * run.log.rounds << '\n';
        h::CsvTable t({"n", "seed", "round", "gain", "p_selected", "expected_selected_probability", "validity_ok"});
        for (std::size_t r = 0; r < run.log.rounds; ++r) {
            const auto& g = run.log.gain_trajectory[r];
            std::cout << "round " << r + 1 << ": N_s=" << g.ns_actual << " G=" << std::setprecision(4) << g.gain
                      << " P_sel=" << run.log.expected_selected_probability[r]
                      << (run.log.validity[r].ok() ? "" : " [invalid]") << std::setprecision(6) << '\n';
            t.push(h::CsvRow()
                       .add(a.n)
                       .add(a.seed)
                       .add(r + 1)
                       .add(g.gain)
                       .add(g.p_selected)
                       .add(run.log.expected_selected_probability[r])
                       .add(run.log.validity[r].ok()));
        }
        const auto mass = similarity_mass(run.state, spec);
        std::cout << "sampling probability by similarity:";
        for (double p : mass) std::cout << ' ' << std::setprecision(4) << p;
        std::cout << std::setprecision(6) << '\n';
        maybe_write(a.out, "dynamic.csv", t);
    };

    try {
        report(run_dynamic(a.n, policy, rounds, rng, opts));
    } catch (const ValidityError& e) {
        report(e.partial());
        throw;
    }
    return ok;
}

// ---------------------------------------------------------------- recommend

struct RecommendArgs {
    unsigned n = 10;
    Index reference = 0;
    std::size_t m = 5;
    std::optional<double> beta;
    std::optional<double> expected;
    std::optional<std::string> catalog;
    std::optional<std::size_t> rounds;
    std::uint64_t seed = 0;
    std::optional<std::string> out;
};

int run_recommend(const RecommendArgs& a) {
    const SimilaritySpec spec(a.n, a.reference);
    const auto params = pick_params(a.n, a.beta, a.expected);
    std::optional<Catalog> catalog;
    if (a.catalog) {
        std::ifstream in(*a.catalog);
        if (!in) throw ConfigError("cannot open catalog " + *a.catalog);
        catalog = Catalog::parse(in, a.n);
    }
    RecommendOptions opts;
    opts.catalog = catalog ? &*catalog : nullptr;
    opts.rounds = a.rounds;
    Rng rng(a.seed);
    const RecommendationResult r = recommend(spec, a.m, params, rng, opts);

    std::cout << "reference " << a.reference << " (" << bits_of(a.reference, a.n) << "), beta=" << fmt(params.beta())
              << ", rounds used " << r.rounds_used << ", draws " << r.draws << '\n';
    h::CsvTable t({"n", "seed", "rank", "index", "bits", "similarity", "rounds_used", "draws"});
    for (std::size_t i = 0; i < r.items.size(); ++i) {
        const auto& item = r.items[i];
        std::cout << std::setw(3) << i + 1 << ". " << bits_of(item.index, a.n) << "  index " << item.index
                  << "  similarity " << item.similarity << '\n';
        t.push(h::CsvRow()
                   .add(a.n)
                   .add(a.seed)
                   .add(i + 1)
                   .add(item.index)
                   .add(bits_of(item.index, a.n))
                   .add(item.similarity)
                   .add(r.rounds_used)
                   .add(r.draws));
    }
    print_gain_trajectory(r.gain_trajectory);
    maybe_write(a.out, "recommend.csv", t);
    return ok;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
    std::string objective;
    std::string method = "durr-hoyer";
    std::optional<std::size_t> rounds;
    double sharpness = 16.0;
    std::uint64_t seed = 0;
    std::optional<std::string> out;
};

int run_optimize(const OptimizeArgs& a) {
    std::ifstream in(a.objective);
    if (!in) throw ConfigError("cannot open objective " + a.objective);
    const ObjectiveTable table = ObjectiveTable::parse(in);
    Rng rng(a.seed);

    auto report = [&](const OptimizationResult& r) {
        if (r.flat_objective) std::cout << "objective is flat: every index is optimal\n";
        std::cout << "method " << a.method << ": best index " << r.best_index << " (" << bits_of(r.best_index, table.qubits())
                  << ") value " << fmt(r.best_value) << (r.optimal ? " [optimal]" : " [not optimal]") << '\n';
        std::cout << "grover iterations " << r.grover_iterations_total << ", rounds " << r.outer_rounds
                  << ", better fraction " << fmt(table.better_fraction(r.best_index)) << '\n';
        h::CsvTable t({"n", "seed", "method", "best_index", "best_value", "optimal", "grover_iterations", "rounds", "flat"});
        t.push(h::CsvRow()
                   .add(table.qubits())
                   .add(a.seed)
                   .add(a.method)
                   .add(r.best_index)
                   .add(r.best_value)
                   .add(r.optimal)
                   .add(r.grover_iterations_total)
                   .add(r.outer_rounds)
                   .add(r.flat_objective));
        maybe_write(a.out, "optimize.csv", t);
    };

    if (a.method == "durr-hoyer") {
        DurrHoyerOptions opts;
        opts.on_round = [](Index incumbent, const SelectionMask& marked) {
            std::cout << "incumbent " << incumbent << ", " << marked.count() << " strictly better\n";
        };
        report(durr_hoyer(table, rng, opts));
        return ok;
    }
    DynamicOptimizeOptions opts;
    opts.rounds = a.rounds;
    opts.sharpness = a.sharpness;
    try {
        report(dynamic_optimize(table, rng, opts));
    } catch (const OptimizationValidityError& e) {
        report(e.incumbent());
        throw;
    }
    return ok;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
    std::optional<unsigned> n;
    std::optional<std::string> n_range;
    std::size_t seeds = 20;
    std::uint64_t seed = 0;
    std::optional<double> m;
    std::optional<double> beta;
    Index reference = 0;
    unsigned threshold = 12;
    std::string out = ".";
    std::string format = "both";
    unsigned threads = 0;
    bool skip_second_inner = false;
};

h::ExperimentConfig to_config(const ExperimentArgs& a, h::ExperimentKind kind) {
    h::ExperimentConfig c;
    c.experiment = kind;
    switch (kind) {
    case h::ExperimentKind::accuracy: c.n_range = {13, 13}; break;
    case h::ExperimentKind::corollaries: c.n_range = {2, 10}; break;
    default: c.n_range = {10, 14};
    }
    if (a.n && a.n_range) throw ConfigError("--n and --n-range are mutually exclusive");
    if (a.n) c.n_range = {*a.n, *a.n};
    if (a.n_range) c.n_range = h::parse_n_range(*a.n_range);
    c.seeds = a.seeds;
    c.seed_base = a.seed;
    c.m_target = a.m;
    c.beta = a.beta;
    c.reference = a.reference;
    c.threshold = a.threshold;
    c.output_dir = a.out;
    c.format = a.format == "csv" ? h::OutputFormat::csv : a.format == "svg" ? h::OutputFormat::svg : h::OutputFormat::both;
    c.threads = a.threads;
    c.skip_second_inner = a.skip_second_inner;
    c.validate();
    return c;
}

void list_paths(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
}

int run_steps(const h::ExperimentConfig& c) {
    const auto r = h::experiment_steps(c);
    std::cout << "steps until selected probability > 1/2 (median of " << c.seeds << " seeds, E[N_s] = " << fmt(r.m_target)
              << ")\n";
    std::cout << "   n  static  dynamic_rounds  inner_iterations  crossed  valid\n";
    for (const auto& s : r.summary)
        std::cout << std::setw(4) << s.n << std::setw(8) << s.static_steps << std::setw(16) << s.dynamic_rounds
                  << std::setw(18) << s.dynamic_inner_iterations << std::setw(9) << s.crossed << std::setw(7)
                  << s.validity_ok << '\n';
    list_paths(h::write_steps(r, c));
    return ok;
}

int run_accuracy(const h::ExperimentConfig& c) {
    const auto r = h::experiment_accuracy(c);
    std::cout << "n=" << r.n << " static: S >= " << r.threshold << " (" << r.static_set_size << " states, "
              << r.static_iterations << " iterations); dynamic: beta=" << fmt(r.beta) << ", E[N_s]=" << fmt(r.m_target)
              << ", " << r.dynamic_rounds << " rounds, " << c.seeds << " seeds\n";
    std::cout << "   S   p_static  p_dynamic  p_dynamic_median\n";
    for (unsigned s = 0; s <= r.n; ++s)
        std::cout << std::setw(4) << s << std::fixed << std::setprecision(5) << std::setw(11) << r.p_static[s]
                  << std::setw(11) << r.p_dynamic[s] << std::setw(18) << r.p_dynamic_median[s] << '\n'
                  << std::defaultfloat << std::setprecision(6);
    list_paths(h::write_accuracy(r, c));
    return ok;
}

int run_corollaries(const h::ExperimentConfig& c) {
    const auto r = h::experiment_corollaries(c);
    std::cout << "check                        n  trials  failed  worst                    limit   status\n";
    for (const auto& row : r.rows)
        std::cout << std::left << std::setw(27) << row.check << std::right << std::setw(3) << row.n << std::setw(8)
                  << row.trials << std::setw(8) << row.failed << "  " << std::left << std::setw(24) << fmt(row.worst)
                  << ' ' << std::setw(8) << fmt(row.limit) << std::right << row.status() << '\n';
    list_paths(h::write_corollaries(r, c));
    const bool passed = r.all_passed();
    std::cout << (passed ? "all checks passed" : "some checks FAILED") << '\n';
    return passed ? ok : invariant_failure;
}

int classify(const std::exception& e) {
    if (dynamic_cast<const ValidityError*>(&e) || dynamic_cast<const NormalizationError*>(&e)) return invariant_failure;
    if (dynamic_cast<const UnderAmplifiedError*>(&e) || dynamic_cast<const NoSolutionError*>(&e)) return not_found;
    if (dynamic_cast<const Error*>(&e)) return config_error;
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qamp: amplitude amplification simulator and experiment harness"};
    app.require_subcommand(1);
    std::string config_help;
    app.add_option("--config", config_help, "Flat key=value file mirroring the flags; flags take precedence");

    auto add_seed = [](CLI::App* cmd, std::uint64_t& seed) {
        cmd->add_option("--seed,--seed-base", seed, "Seed (falls back to $QAMP_SEED, then 0)");
    };
    auto add_out = [](CLI::App* cmd, std::optional<std::string>& out) {
        cmd->add_option("--out", out, "Directory for the run's CSV record");
    };
    std::function<int()> action;

    GroverArgs ga;
    auto* grover = app.add_subcommand("grover", "Static Grover search on a fixed marked set");
    grover->add_option("--n", ga.n, "Qubits")->check(CLI::Range(1u, kMaxQubits));
    grover->add_option("--marked", ga.marked, "Marked indices (default: 0..m-1)")->delimiter(',');
    grover->add_option("--m", ga.m, "Number of marked states when --marked is absent")->check(CLI::PositiveNumber);
    grover->add_flag("--unknown-m", ga.unknown_m, "Use the unknown-M exponential schedule");
    add_seed(grover, ga.seed);
    add_out(grover, ga.out);
    grover->callback([&] { action = [&] { return run_grover(ga); }; });

    DynamicArgs da;
    auto* dynamic = app.add_subcommand("dynamic", "Dynamic Grover with a similarity selection policy");
    dynamic->add_option("--n", da.n, "Qubits")->check(CLI::Range(1u, kMaxQubits));
    dynamic->add_option("--reference", da.reference, "Reference state for similarity");
    dynamic->add_option("--m", da.m, "Expected selected count to calibrate for (default 4)");
    dynamic->add_option("--beta", da.beta, "Use the top-anchored family with this beta instead");
    dynamic->add_option("--rounds", da.rounds, "Rounds to run (default from the policy)");
    dynamic->add_flag("--no-validity", da.no_validity, "Keep going after a round leaves the productive regime");
    add_seed(dynamic, da.seed);
    add_out(dynamic, da.out);
    dynamic->callback([&] { action = [&] { return run_dynamic_cmd(da); }; });

    RecommendArgs ra;
    auto* rec = app.add_subcommand("recommend", "Recommend items similar to a reference");
    rec->add_option("--n", ra.n, "Bits per item")->check(CLI::Range(1u, kMaxQubits));
    rec->add_option("--reference", ra.reference, "Reference item");
    rec->add_option("--m", ra.m, "Number of items to return");
    rec->add_option("--beta", ra.beta, "Use the top-anchored family with this beta");
    rec->add_option("--expected", ra.expected, "Expected selected count to calibrate for (default 4)");
    rec->add_option("--catalog", ra.catalog, "File of eligible items, one per line");
    rec->add_option("--rounds", ra.rounds, "Rounds to run (default from the policy)");
    add_seed(rec, ra.seed);
    add_out(rec, ra.out);
    rec->callback([&] { action = [&] { return run_recommend(ra); }; });

    OptimizeArgs oa;
    auto* opt = app.add_subcommand("optimize", "Find the best entry of an objective table");
    opt->add_option("--objective", oa.objective, "Objective file: header `n=<int> sense=<min|max>`, then 2^n values")
        ->required();
    opt->add_option("--method", oa.method, "durr-hoyer or dynamic")->check(CLI::IsMember({"durr-hoyer", "dynamic"}));
    opt->add_option("--rounds", oa.rounds, "Dynamic rounds (default from n)");
    opt->add_option("--sharpness", oa.sharpness, "Dynamic policy sharpness k")->check(CLI::Range(1.0, 1e6));
    add_seed(opt, oa.seed);
    add_out(opt, oa.out);
    opt->callback([&] { action = [&] { return run_optimize(oa); }; });

    ExperimentArgs ea;
    auto* exp = app.add_subcommand("experiment", "Seeded experiments writing CSV and SVG");
    exp->require_subcommand(1);
    const std::map<std::string, h::ExperimentKind> kinds{{"steps", h::ExperimentKind::steps},
                                                          {"accuracy", h::ExperimentKind::accuracy},
                                                          {"corollaries", h::ExperimentKind::corollaries}};
    for (const auto& [name, kind] : kinds) {
        auto* sub = exp->add_subcommand(name);
        sub->add_option("--n", ea.n, "Single qubit count");
        sub->add_option("--n-range", ea.n_range, "Inclusive qubit range A:B");
        sub->add_option("--seeds", ea.seeds, "Seeds per n");
        sub->add_option("--seed,--seed-base", ea.seed, "First seed; trial t uses seed-base + t (falls back to $QAMP_SEED)");
        sub->add_option("--m", ea.m, "Expected selected count for the dynamic policy");
        sub->add_option("--beta", ea.beta, "Top-anchored beta instead of calibrating from --m");
        sub->add_option("--reference", ea.reference, "Similarity reference state");
        sub->add_option("--threshold", ea.threshold, "Static baseline marks S >= threshold (accuracy)");
        sub->add_option("--out", ea.out, "Output directory");
        sub->add_option("--format", ea.format, "csv, svg or both")->check(CLI::IsMember({"csv", "svg", "both"}));
        sub->add_option("--threads", ea.threads, "Worker threads (0 = all cores); output does not depend on it");
        sub->add_flag("--skip-second-inner", ea.skip_second_inner,
                      "Fault injection: one inner iteration per round (corollaries)");
        const h::ExperimentKind k = kind;
        sub->callback([&, k] {
            action = [&, k] {
                const auto cfg = to_config(ea, k);
                switch (k) {
                case h::ExperimentKind::steps: return run_steps(cfg);
                case h::ExperimentKind::accuracy: return run_accuracy(cfg);
                default: return run_corollaries(cfg);
                }
            };
        });
    }

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = h::merge_config(std::move(args),
                               {"grover", "dynamic", "recommend", "optimize", "experiment"}, std::getenv("QAMP_SEED"));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    }

    try {
        return action ? action() : ok;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return classify(e);
    }
}
