#pragma once

#include <cmath>
#include <compare>
#include <limits>

#include "lightrng/errors.hpp"

namespace lightrng {

/// A probability carried in the log2 domain.
///
/// Failure probabilities in the certification calculus underflow double
/// (values like e^-34000 appear at realistic photon numbers), so every
/// epsilon in the toolkit is stored and combined as log2(p).  The value
/// -inf represents an impossible event; 0 represents certainty.
class LogProb {
public:
    constexpr LogProb() : lg_(-inf()) {}

    static constexpr LogProb impossible() { return LogProb{}; }
    static constexpr LogProb certain() { return LogProb{0.0}; }

    static LogProb from_log2(double lg) {
        if (std::isnan(lg)) throw ContractError("LogProb: log2 value is NaN");
        return LogProb{lg > 0.0 ? 0.0 : lg};
    }
    static LogProb from_log10(double l10) {
        if (std::isinf(l10) && l10 < 0) return impossible();
        return from_log2(l10 * log2_of_10());
    }
    static LogProb from_ln(double ln) {
        if (std::isinf(ln) && ln < 0) return impossible();
        return from_log2(ln / ln_of_2());
    }
    static LogProb from_linear(double p) {
        if (!(p >= 0.0) || p > 1.0) throw ContractError("LogProb: linear value outside [0, 1]");
        return p == 0.0 ? impossible() : LogProb{std::log2(p)};
    }

    double log2() const { return lg_; }
    double log10() const { return lg_ / log2_of_10(); }
    double ln() const { return lg_ * ln_of_2(); }
    double linear() const { return lg_ == -inf() ? 0.0 : std::exp2(lg_); }

    bool is_impossible() const { return lg_ == -inf(); }
    bool is_certain() const { return lg_ == 0.0; }

    /// Product of independent-event probabilities (adds logs).
    friend LogProb operator*(LogProb a, LogProb b) {
        if (a.is_impossible() || b.is_impossible()) return impossible();
        return LogProb{a.lg_ + b.lg_};
    }
    LogProb& operator*=(LogProb o) { return *this = *this * o; }

    /// Union-bound sum, saturating at 1.
    friend LogProb operator+(LogProb a, LogProb b) {
        if (a.is_impossible()) return b;
        if (b.is_impossible()) return a;
        double hi = a.lg_, lo = b.lg_;
        if (hi < lo) std::swap(hi, lo);
        double lg = hi + std::log2(1.0 + std::exp2(lo - hi));
        return LogProb{lg > 0.0 ? 0.0 : lg};
    }
    LogProb& operator+=(LogProb o) { return *this = *this + o; }

    /// n-fold union bound (n * p, saturating at 1).
    LogProb scaled(double n) const {
        if (n < 0) throw ContractError("LogProb::scaled: negative count");
        if (n == 0 || is_impossible()) return impossible();
        double lg = lg_ + std::log2(n);
        return LogProb{lg > 0.0 ? 0.0 : lg};
    }

    /// p / n for n >= 1; used to split a failure budget.
    LogProb divided(double n) const {
        if (!(n >= 1.0)) throw ContractError("LogProb::divided: divisor must be >= 1");
        if (is_impossible()) return impossible();
        return LogProb{lg_ - std::log2(n)};
    }

    friend auto operator<=>(LogProb a, LogProb b) { return a.lg_ <=> b.lg_; }
    friend bool operator==(LogProb a, LogProb b) { return a.lg_ == b.lg_; }

private:
    explicit constexpr LogProb(double lg) : lg_(lg) {}
    static constexpr double inf() { return std::numeric_limits<double>::infinity(); }
    static constexpr double log2_of_10() { return 3.321928094887362347870; }
    static constexpr double ln_of_2() { return 0.693147180559945309417; }

    double lg_;
};

} // namespace lightrng
