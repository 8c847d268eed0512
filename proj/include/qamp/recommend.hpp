#pragma once

// Recommendation over an n-bit catalog: a similarity score against a reference
// item, an exponential selection probability in that score, and top-M
// retrieval by sampling the state left behind by a dynamic Grover run.

#include <qamp/dynamic.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace qamp {

/// S(x, y) = n - hamming(x, y): n for the reference itself, 0 for its complement.
struct SimilaritySpec {
    SimilaritySpec(unsigned bits, Index reference_item) : n(bits), reference(reference_item) {
        if (reference >= dimension(n))
            throw IndexError("reference " + std::to_string(reference) + " outside 2^" + std::to_string(n));
    }

    unsigned n;
    Index reference;
};

inline unsigned similarity(Index x, const SimilaritySpec& spec) {
    if (x >= dimension(spec.n))
        throw IndexError("item " + std::to_string(x) + " outside 2^" + std::to_string(spec.n));
    return spec.n - static_cast<unsigned>(std::popcount(x ^ spec.reference));
}

namespace detail {
inline double log_binomial(unsigned n, unsigned k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}
} // namespace detail

/// P_s(S) = min(1, c * e^(beta * S)), stored as log(c) so large n cannot underflow.
///
/// Construction enforces both limits: P_s(n) >= 1 - 1/N and P_s(0) <= 1/N.
/// K = (1 + e^-beta)^n is the alternative parametrization; beta = -ln(K^(1/n) - 1).
class SelectionProbabilityParams {
public:
    SelectionProbabilityParams(unsigned n, double beta, double log_norm_c)
        : n_(n), beta_(beta), log_norm_c_(log_norm_c) {
        const double states = static_cast<double>(dimension(n));
        if (!std::isfinite(beta) || !std::isfinite(log_norm_c) || beta < 0.0)
            throw InvalidParamsError("beta must be finite and non-negative, log(c) finite");
        // Slack of a few ulps so that boundary-exact choices such as the defaults pass.
        constexpr double slack = 1e-12;
        if (probability(n) < 1.0 - 1.0 / states - slack)
            throw InvalidParamsError("most similar item selected with probability " +
                                     std::to_string(probability(n)) + " < 1 - 1/N");
        if (probability(0) > (1.0 / states) * (1.0 + slack))
            throw InvalidParamsError("least similar item selected with probability " +
                                     std::to_string(probability(0)) + " > 1/N");
    }

    /// beta = ln 2, c = 2^-n, so P_s(S) = 2^(S - n).
    static SelectionProbabilityParams defaults(unsigned n) {
        return {n, std::numbers::ln2, -static_cast<double>(n) * std::numbers::ln2};
    }

    /// Exact top anchor: P_s(n) = 1, P_s(S) = e^(-beta (n - S)). Needs beta >= ln 2.
    static SelectionProbabilityParams from_beta(unsigned n, double beta) {
        return {n, beta, -beta * static_cast<double>(n)};
    }

    static SelectionProbabilityParams from_k(unsigned n, double k) {
        const double root = std::pow(k, 1.0 / static_cast<double>(n));
        if (!(root > 1.0)) throw InvalidParamsError("K must exceed 1");
        return from_beta(n, -std::log(root - 1.0));
    }

    [[nodiscard]] unsigned n() const noexcept { return n_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double log_norm_c() const noexcept { return log_norm_c_; }
    [[nodiscard]] double norm_c() const noexcept { return std::exp(log_norm_c_); }
    [[nodiscard]] double k_param() const noexcept {
        return std::pow(1.0 + std::exp(-beta_), static_cast<double>(n_));
    }

    [[nodiscard]] double probability(unsigned s) const {
        if (s > n_) throw IndexError("similarity " + std::to_string(s) + " exceeds n = " + std::to_string(n_));
        return std::exp(std::min(0.0, log_norm_c_ + beta_ * static_cast<double>(s)));
    }

    /// E[N_s] = sum over S of C(n, S) * P_s(S).
    [[nodiscard]] double expected_selected() const {
        double total = 0.0;
        for (unsigned s = 0; s <= n_; ++s) {
            const double log_p = std::min(0.0, log_norm_c_ + beta_ * static_cast<double>(s));
            total += std::exp(detail::log_binomial(n_, s) + log_p);
        }
        return total;
    }

private:
    unsigned n_;
    double beta_;
    double log_norm_c_;
};

inline double selection_probability(unsigned s, const SelectionProbabilityParams& params) {
    return params.probability(s);
}

struct CalibrationOptions {
    /// When positive, warn if M_target >= N / (2 * gain_target).
    double gain_target = 0.0;
    std::function<void(const std::string&)> warn;
};

/// Solves for beta so that E[N_s] lands on `m_target` (within 0.5).
///
/// Targets at or above (3/2)^n keep P_s(0) = 1/N and raise beta above ln 2.
/// Below (3/2)^n no member of that family can work (beta < ln 2 breaks the
/// P_s(n) limit), so those targets pin P_s(n) = 1 instead and raise beta further;
/// there E[N_s] = (1 + e^-beta)^n = K.
inline SelectionProbabilityParams calibrate_beta(unsigned n, double m_target, const CalibrationOptions& options = {}) {
    const double states = static_cast<double>(dimension(n));
    if (!(m_target >= 1.0) || !(m_target < states / 2.0)) {
        throw CalibrationError("expected selected count " + std::to_string(m_target) + " outside [1, N/2) for N = " +
                               std::to_string(dimension(n)));
    }
    if (options.gain_target > 0.0 && options.warn && m_target >= states / (2.0 * options.gain_target)) {
        options.warn("expected selected count " + std::to_string(m_target) + " is not below N/(2G) = " +
                     std::to_string(states / (2.0 * options.gain_target)) + "; unselected amplitudes may go negative");
    }

    const double nd = static_cast<double>(n);
    const double crossover = std::pow(1.5, nd);
    const bool bottom_pinned = m_target >= crossover;
    auto make = [&](double beta) {
        return bottom_pinned ? SelectionProbabilityParams(n, beta, -nd * std::numbers::ln2)
                             : SelectionProbabilityParams::from_beta(n, beta);
    };

    // E[N_s] rises with beta in the bottom-pinned family and falls in the top-pinned one.
    double lo = std::numbers::ln2;
    double hi = bottom_pinned ? nd * std::numbers::ln2 : 60.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double e = make(mid).expected_selected();
        if ((e < m_target) == bottom_pinned) lo = mid;
        else hi = mid;
    }
    auto params = make(0.5 * (lo + hi));
    if (std::abs(params.expected_selected() - m_target) > 0.5) {
        throw CalibrationError("no beta reaches expected count " + std::to_string(m_target) + " (closest " +
                               std::to_string(params.expected_selected()) + ")");
    }
    return params;
}

/// Items eligible for recommendation. Defaults to the whole space.
class Catalog {
public:
    static Catalog everything(unsigned n) { return Catalog(SelectionMask::full(n)); }
    static Catalog of(unsigned n, std::span<const Index> items) {
        return Catalog(SelectionMask::from_indices(n, items));
    }

    /// One item per line, either an n-character binary string or an unsigned
    /// integer. Blank lines and '#' comments are skipped.
    static Catalog parse(std::istream& in, unsigned n) {
        SelectionMask members(n);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            const auto last = line.find_last_not_of(" \t\r");
            const std::string_view token(line.data() + first, last - first + 1);

            const bool binary = token.size() == n && token.find_first_not_of("01") == std::string_view::npos;
            Index value = 0;
            const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value, binary ? 2 : 10);
            if (ec != std::errc{} || ptr != token.data() + token.size())
                throw ParseError("catalog line " + std::to_string(line_no) + ": '" + std::string(token) +
                                 "' is neither a binary string nor an unsigned integer");
            if (value >= members.size())
                throw ParseError("catalog line " + std::to_string(line_no) + ": item " + std::to_string(value) +
                                 " outside 2^" + std::to_string(n));
            members.set(value, true);
        }
        if (members.none()) throw ParseError("catalog is empty");
        return Catalog(std::move(members));
    }

    [[nodiscard]] unsigned qubits() const noexcept { return members_.qubits(); }
    [[nodiscard]] Index size() const noexcept { return members_.count(); }
    [[nodiscard]] bool contains(Index x) const noexcept { return x < members_.size() && members_[x]; }
    [[nodiscard]] const SelectionMask& members() const noexcept { return members_; }

private:
    explicit Catalog(SelectionMask members) : members_(std::move(members)) {}
    SelectionMask members_;
};

/// P_s(x) = selection_probability(similarity(x)), zero outside the catalog.
inline SelectionPolicy similarity_policy(const SimilaritySpec& spec, const SelectionProbabilityParams& params,
                                         const Catalog* catalog = nullptr) {
    if (params.n() != spec.n) throw ShapeError("params calibrated for a different bit width");
    std::vector<double> per_score(spec.n + 1);
    for (unsigned s = 0; s <= spec.n; ++s) per_score[s] = params.probability(s);
    return SelectionPolicy::from_rule(spec.n, [&](Index x) {
        if (catalog && !catalog->contains(x)) return 0.0;
        return per_score[similarity(x, spec)];
    });
}

/// Total probability per similarity score, indexed 0..n.
template <class Real>
std::vector<double> similarity_mass(const BasicStateVector<Real>& state, const SimilaritySpec& spec) {
    if (state.qubits() != spec.n) throw ShapeError("state and similarity spec differ in bit width");
    std::vector<double> mass(spec.n + 1, 0.0);
    const auto amps = state.amplitudes();
    for (Index x = 0; x < amps.size(); ++x) mass[similarity(x, spec)] += static_cast<double>(amps[x] * amps[x]);
    return mass;
}

struct RecommendedItem {
    Index index;
    unsigned similarity;
    friend bool operator==(const RecommendedItem&, const RecommendedItem&) = default;
};

struct RecommendationResult {
    /// Sorted by similarity descending, then index ascending.
    std::vector<RecommendedItem> items;
    std::size_t rounds_used = 0;
    /// Sampling probability of the final state summed per similarity score, indexed 0..n.
    std::vector<double> per_similarity_sampling;
    std::vector<GainReport> gain_trajectory;
    /// Draws made, including duplicates and non-catalog rejections.
    std::size_t draws = 0;
};

struct RecommendOptions {
    const Catalog* catalog = nullptr;
    /// Overrides default_rounds(policy).
    std::optional<std::size_t> rounds;
    bool enforce_validity = true;
};

/// Duplicates are resampled from the same final state, at most 50*M draws in total.
inline RecommendationResult recommend(const SimilaritySpec& spec, std::size_t count,
                                      const SelectionProbabilityParams& params, Rng& rng,
                                      const RecommendOptions& options = {}) {
    if (count < 1) throw InvalidParamsError("recommend: M must be at least 1");
    const Catalog* catalog = options.catalog;
    if (catalog && catalog->qubits() != spec.n) throw ShapeError("catalog bit width differs from spec");
    const Index available = catalog ? catalog->size() : dimension(spec.n);
    if (count > available)
        throw InvalidParamsError("recommend: asked for " + std::to_string(count) + " items from a catalog of " +
                                 std::to_string(available));

    const SelectionPolicy policy = similarity_policy(spec, params, catalog);
    const std::size_t rounds = options.rounds.value_or(default_rounds(policy));

    DynamicOptions dyn;
    dyn.enforce_validity = options.enforce_validity;
    dyn.record_masks = false;
    DynamicRun run = run_dynamic(spec.n, policy, rounds, rng, dyn);

    RecommendationResult result;
    result.rounds_used = run.log.rounds;
    result.per_similarity_sampling = similarity_mass(run.state, spec);
    result.gain_trajectory = std::move(run.log.gain_trajectory);

    const BornSampler sampler(run.state);
    const std::size_t cap = 50 * count;
    std::unordered_set<Index> seen;
    while (result.items.size() < count) {
        if (result.draws >= cap)
            throw UnderAmplifiedError("recommend: only " + std::to_string(result.items.size()) + " of " +
                                      std::to_string(count) + " distinct items after " + std::to_string(cap) +
                                      " draws");
        const Index x = sampler(rng);
        ++result.draws;
        if (catalog && !catalog->contains(x)) continue;
        if (seen.insert(x).second) result.items.push_back({x, similarity(x, spec)});
    }
    std::sort(result.items.begin(), result.items.end(), [](const RecommendedItem& a, const RecommendedItem& b) {
        return a.similarity != b.similarity ? a.similarity > b.similarity : a.index < b.index;
    });
    return result;
}

} // namespace qamp
