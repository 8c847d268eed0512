#pragma once

// Real-valued state-vector engine: uniform initialization, phase-flip oracle,
// inversion about the mean, probability queries and Born-rule sampling.
//
// Amplitudes are real throughout. The oracle is modeled as a sign flip on the
// index register, which is what the ancilla-based oracle reduces to when the
// ancilla is prepared in |->; the ancilla itself is not simulated.

#include <qamp/error.hpp>
#include <qamp/random.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace qamp {

using Index = std::uint64_t;

inline constexpr unsigned kMaxQubits = 30;

namespace tolerance {
inline constexpr double norm_drift = 1e-9;
inline constexpr double involution = 1e-12;
/// Largest |sum a^2 - 1| accepted by sample().
inline constexpr double sampling_norm = 1e-6;
/// "Positive" in the validity conditions means > -validity.
inline constexpr double validity = 1e-9;
} // namespace tolerance

/// 2^n, after checking 1 <= n <= kMaxQubits.
inline Index dimension(unsigned n) {
    if (n < 1 || n > kMaxQubits) {
        throw SizeError("qubit count " + std::to_string(n) + " outside [1, " +
                        std::to_string(kMaxQubits) + "]");
    }
    return Index{1} << n;
}

/// Membership of every basis state in the selected set for one oracle call.
class SelectionMask {
public:
    /// Empty mask over n qubits.
    explicit SelectionMask(unsigned n) : n_(n), bits_(dimension(n), 0) {}

    static SelectionMask full(unsigned n) {
        SelectionMask m(n);
        std::fill(m.bits_.begin(), m.bits_.end(), std::uint8_t{1});
        m.count_ = m.bits_.size();
        return m;
    }

    static SelectionMask from_indices(unsigned n, std::span<const Index> indices) {
        SelectionMask m(n);
        for (Index x : indices) m.set(x, true);
        return m;
    }

    static SelectionMask from_indices(unsigned n, std::initializer_list<Index> indices) {
        return from_indices(n, std::span<const Index>(indices.begin(), indices.size()));
    }

    template <std::predicate<Index> Pred>
    static SelectionMask from_predicate(unsigned n, Pred&& pred) {
        SelectionMask m(n);
        for (Index x = 0; x < m.size(); ++x) {
            if (pred(x)) {
                m.bits_[x] = 1;
                ++m.count_;
            }
        }
        return m;
    }

    [[nodiscard]] unsigned qubits() const noexcept { return n_; }
    [[nodiscard]] Index size() const noexcept { return bits_.size(); }
    /// N_s, the number of selected states.
    [[nodiscard]] Index count() const noexcept { return count_; }
    [[nodiscard]] bool none() const noexcept { return count_ == 0; }
    [[nodiscard]] bool all() const noexcept { return count_ == bits_.size(); }

    [[nodiscard]] bool operator[](Index x) const noexcept { return bits_[x] != 0; }

    [[nodiscard]] bool test(Index x) const {
        check_index(x);
        return bits_[x] != 0;
    }

    void set(Index x, bool selected) {
        check_index(x);
        const bool was = bits_[x] != 0;
        if (was == selected) return;
        bits_[x] = selected ? 1 : 0;
        if (selected) ++count_;
        else --count_;
    }

    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    [[nodiscard]] std::vector<Index> indices() const {
        std::vector<Index> out;
        out.reserve(count_);
        for (Index x = 0; x < size(); ++x)
            if (bits_[x]) out.push_back(x);
        return out;
    }

    friend bool operator==(const SelectionMask&, const SelectionMask&) = default;

private:
    void check_index(Index x) const {
        if (x >= bits_.size())
            throw IndexError("basis index " + std::to_string(x) + " outside 2^" + std::to_string(n_));
    }

    unsigned n_;
    Index count_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Dense array of 2^n real amplitudes.
template <std::floating_point Real = double>
class BasicStateVector {
public:
    using value_type = Real;

    /// Wraps caller-supplied amplitudes. Only the length is checked, so
    /// unnormalized vectors can be built deliberately (sample() rejects them).
    static BasicStateVector from_amplitudes(unsigned n, std::vector<Real> amps) {
        const Index dim = dimension(n);
        if (amps.size() != dim) {
            throw ShapeError("expected " + std::to_string(dim) + " amplitudes, got " +
                             std::to_string(amps.size()));
        }
        return BasicStateVector(n, std::move(amps));
    }

    [[nodiscard]] unsigned qubits() const noexcept { return n_; }
    [[nodiscard]] Index size() const noexcept { return amps_.size(); }
    [[nodiscard]] Real operator[](Index x) const noexcept { return amps_[x]; }

    [[nodiscard]] std::span<const Real> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] std::span<Real> mutable_amplitudes() noexcept { return amps_; }

    [[nodiscard]] Real norm_squared() const noexcept {
        return std::transform_reduce(amps_.begin(), amps_.end(), Real{0}, std::plus<>{},
                                     [](Real a) { return a * a; });
    }

    [[nodiscard]] Real mean() const noexcept {
        return std::accumulate(amps_.begin(), amps_.end(), Real{0}) / static_cast<Real>(amps_.size());
    }

    friend bool operator==(const BasicStateVector&, const BasicStateVector&) = default;

private:
    BasicStateVector(unsigned n, std::vector<Real> amps) : n_(n), amps_(std::move(amps)) {}

    unsigned n_;
    std::vector<Real> amps_;
};

using StateVector = BasicStateVector<double>;

/// Uniform superposition: every amplitude equals 1/sqrt(N).
template <std::floating_point Real = double>
BasicStateVector<Real> uniform_init(unsigned n) {
    const Index dim = dimension(n);
    const Real a = Real{1} / std::sqrt(static_cast<Real>(dim));
    return BasicStateVector<Real>::from_amplitudes(n, std::vector<Real>(dim, a));
}

namespace detail {
template <class Real>
void require_same_shape(const BasicStateVector<Real>& s, const SelectionMask& m) {
    if (s.qubits() != m.qubits()) {
        throw ShapeError("state has " + std::to_string(s.qubits()) + " qubits, mask has " +
                         std::to_string(m.qubits()));
    }
}
} // namespace detail

/// Negates exactly the selected amplitudes.
template <class Real>
BasicStateVector<Real> oracle_flip(BasicStateVector<Real> state, const SelectionMask& mask) {
    detail::require_same_shape(state, mask);
    auto amps = state.mutable_amplitudes();
    const auto bits = mask.bits();
    for (Index x = 0; x < amps.size(); ++x)
        if (bits[x]) amps[x] = -amps[x];
    return state;
}

/// a[x] <- 2*mu - a[x] with mu the mean amplitude.
template <class Real>
BasicStateVector<Real> invert_about_mean(BasicStateVector<Real> state) {
    const Real twice_mean = Real{2} * state.mean();
    for (Real& a : state.mutable_amplitudes()) a = twice_mean - a;
    return state;
}

/// Sum of squared amplitudes over the selected states.
template <class Real>
Real probability_of(const BasicStateVector<Real>& state, const SelectionMask& mask) {
    detail::require_same_shape(state, mask);
    const auto amps = state.amplitudes();
    const auto bits = mask.bits();
    Real p{0};
    for (Index x = 0; x < amps.size(); ++x)
        if (bits[x]) p += amps[x] * amps[x];
    return std::min(p, Real{1});
}

template <class Real>
void require_normalized(const BasicStateVector<Real>& state) {
    const double drift = std::abs(static_cast<double>(state.norm_squared()) - 1.0);
    if (!(drift <= tolerance::sampling_norm)) {
        throw NormalizationError("state norm deviates from 1 by " + std::to_string(drift));
    }
}

/// Draws one basis index with probability amps[x]^2.
template <class Real>
Index sample(const BasicStateVector<Real>& state, Rng& rng) {
    require_normalized(state);
    const auto amps = state.amplitudes();
    const double target = rng.uniform() * static_cast<double>(state.norm_squared());
    double acc = 0.0;
    Index last_nonzero = 0;
    for (Index x = 0; x < amps.size(); ++x) {
        const double p = static_cast<double>(amps[x]) * static_cast<double>(amps[x]);
        if (p == 0.0) continue;
        acc += p;
        last_nonzero = x;
        if (target < acc) return x;
    }
    return last_nonzero;
}

/// Repeated Born-rule draws from one state in O(log N) each.
class BornSampler {
public:
    template <class Real>
    explicit BornSampler(const BasicStateVector<Real>& state) {
        require_normalized(state);
        cumulative_.reserve(state.size());
        double acc = 0.0;
        for (Real a : state.amplitudes()) {
            acc += static_cast<double>(a) * static_cast<double>(a);
            cumulative_.push_back(acc);
        }
    }

    Index operator()(Rng& rng) const {
        const double target = rng.uniform() * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
        if (it == cumulative_.end()) --it;
        return static_cast<Index>(it - cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
};

/// Coefficients of a state in the two-dimensional {|alpha>, |beta>} picture.
template <class Real>
struct Decomposition {
    Real beta;   ///< selected-subspace coefficient
    Real alpha;  ///< unselected-subspace coefficient
    bool beta_signed;
    bool alpha_signed;

    /// False when either group had mixed signs and only the magnitude is reported.
    [[nodiscard]] bool is_signed() const noexcept { return beta_signed && alpha_signed; }
};

template <class Real>
Decomposition<Real> decompose(const BasicStateVector<Real>& state, const SelectionMask& mask) {
    detail::require_same_shape(state, mask);
    if (mask.none() || mask.all()) {
        throw DegenerateDecompositionError("decomposition needs a mask that is neither empty nor full");
    }
    struct Group {
        Real sum_sq{0};
        bool any_pos = false;
        bool any_neg = false;
        void add(Real a) {
            sum_sq += a * a;
            any_pos |= a > 0;
            any_neg |= a < 0;
        }
        [[nodiscard]] bool consistent() const { return !(any_pos && any_neg); }
        [[nodiscard]] Real coefficient() const {
            const Real mag = std::sqrt(sum_sq);
            return (consistent() && any_neg) ? -mag : mag;
        }
    } selected, unselected;

    const auto amps = state.amplitudes();
    for (Index x = 0; x < amps.size(); ++x) (mask[x] ? selected : unselected).add(amps[x]);

    return {selected.coefficient(), unselected.coefficient(), selected.consistent(),
            unselected.consistent()};
}

/// Euclidean distance between two states of equal size.
template <class Real>
Real l2_distance(const BasicStateVector<Real>& a, const BasicStateVector<Real>& b) {
    if (a.size() != b.size()) throw ShapeError("l2_distance on states of different size");
    Real acc{0};
    for (Index x = 0; x < a.size(); ++x) {
        const Real d = a[x] - b[x];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace qamp
