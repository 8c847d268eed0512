#pragma once

#include <qamp/error.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qamp::harness {

enum class ExperimentKind { steps, accuracy, corollaries, recommend, optimize };

inline std::string_view to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::steps: return "steps";
    case ExperimentKind::accuracy: return "accuracy";
    case ExperimentKind::corollaries: return "corollaries";
    case ExperimentKind::recommend: return "recommend";
    case ExperimentKind::optimize: return "optimize";
    }
    return "?";
}

enum class OutputFormat { csv, svg, both };

struct NRange {
    unsigned lo = 1;
    unsigned hi = 1;

    [[nodiscard]] std::size_t count() const noexcept { return hi >= lo ? hi - lo + 1 : 0; }
    friend bool operator==(const NRange&, const NRange&) = default;
};

/// "A:B" (inclusive) or a single "A".
inline NRange parse_n_range(std::string_view text) {
    auto number = [&](std::string_view part) {
        unsigned v = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size())
            throw ConfigError("n-range: '" + std::string(text) + "' is not A:B");
        return v;
    };
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        const unsigned v = number(text);
        return {v, v};
    }
    return {number(text.substr(0, colon)), number(text.substr(colon + 1))};
}

inline constexpr unsigned kExperimentMaxQubits = 20;

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::steps;
    NRange n_range{10, 14};
    std::size_t seeds = 20;
    std::uint64_t seed_base = 0;
    /// Similarity reference state; by symmetry the choice only relabels states.
    std::uint64_t reference = 0;
    /// Top-anchored exponential family; calibrated from m_target when absent.
    std::optional<double> beta;
    /// Expected selected count for the dynamic policy (steps: also the static
    /// target size). Accuracy defaults it to the static threshold set size.
    std::optional<double> m_target;
    /// Accuracy static baseline marks states with similarity >= threshold.
    unsigned threshold = 12;
    std::filesystem::path output_dir = ".";
    OutputFormat format = OutputFormat::both;
    /// Worker threads; 0 picks hardware concurrency. Output does not depend on it.
    unsigned threads = 0;
    /// Corollaries only: run a single inner iteration per round (fault injection).
    bool skip_second_inner = false;

    [[nodiscard]] bool wants_csv() const noexcept { return format != OutputFormat::svg; }
    [[nodiscard]] bool wants_svg() const noexcept { return format != OutputFormat::csv; }

    void validate() const {
        if (seeds < 1) throw ConfigError("seeds must be at least 1");
        if (n_range.lo < 1 || n_range.hi > kExperimentMaxQubits || n_range.lo > n_range.hi)
            throw ConfigError("n-range " + std::to_string(n_range.lo) + ":" + std::to_string(n_range.hi) +
                              " must satisfy 1 <= A <= B <= " + std::to_string(kExperimentMaxQubits));
        if (reference >= (std::uint64_t{1} << n_range.lo))
            throw ConfigError("reference " + std::to_string(reference) + " does not fit in " +
                              std::to_string(n_range.lo) + " bits");
        if (beta && !(*beta >= 0.0)) throw ConfigError("beta must be a non-negative number");
        if (m_target && !(*m_target >= 1.0)) throw ConfigError("m must be at least 1");
        if (experiment == ExperimentKind::accuracy && threshold > n_range.lo)
            throw ConfigError("threshold " + std::to_string(threshold) + " exceeds n");
        if (experiment == ExperimentKind::corollaries && n_range.lo < 2)
            throw ConfigError("corollaries need n >= 2");
    }
};

/// Flat `key = value` lines; '#' starts a comment. Keys are flag names without
/// the leading dashes. Returned in file order.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) return std::string_view{};
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key(trim(body.substr(0, eq)));
        std::string value(trim(body.substr(eq + 1)));
        while (!key.empty() && key.front() == '-') key.erase(key.begin());
        if (key.empty()) throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty key");
        entries.emplace_back(std::move(key), std::move(value));
    }
    return entries;
}

namespace detail {

inline bool has_flag(const std::vector<std::string>& args, std::string_view key) {
    const std::string flag = "--" + std::string(key);
    for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
}

} // namespace detail

/// Folds `--config <file>` and the QAMP_SEED fallback into an argument list.
///
/// File entries are appended as `--key value` unless the same flag already
/// appears on the command line, so flags win over the file. The file may name
/// the subcommand with `command = ...` (e.g. `experiment steps`) when the command
/// line does not. `seed_env` is appended as `--seed-base` only when neither flags
/// nor file set a seed.
inline std::vector<std::string> merge_config(std::vector<std::string> args, const std::vector<std::string>& subcommands,
                                             const char* seed_env) {
    std::optional<std::filesystem::path> config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
            config_path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }

    bool has_command = false;
    for (const auto& a : args)
        for (const auto& s : subcommands)
            if (a == s) has_command = true;

    std::vector<std::string> extra;
    if (config_path) {
        for (auto& [key, value] : read_config_file(*config_path)) {
            if (key == "command") {
                if (!has_command) {
                    std::vector<std::string> words;
                    std::size_t pos = 0;
                    while (pos < value.size()) {
                        const auto b = value.find_first_not_of(' ', pos);
                        if (b == std::string::npos) break;
                        const auto e = value.find(' ', b);
                        words.push_back(value.substr(b, e == std::string::npos ? std::string::npos : e - b));
                        pos = e == std::string::npos ? value.size() : e;
                    }
                    args.insert(args.begin(), words.begin(), words.end());
                    has_command = true;
                }
                continue;
            }
            if (detail::has_flag(args, key)) continue;
            const bool is_switch = value == "true" || value == "false";
            if (is_switch) {
                if (value == "true") extra.push_back("--" + key);
            } else {
                extra.push_back("--" + key);
                extra.push_back(value);
            }
        }
    }
    args.insert(args.end(), extra.begin(), extra.end());

    if (seed_env && *seed_env && !detail::has_flag(args, "seed-base") && !detail::has_flag(args, "seed")) {
        args.push_back("--seed-base");
        args.push_back(seed_env);
    }
    return args;
}

} // namespace qamp::harness
