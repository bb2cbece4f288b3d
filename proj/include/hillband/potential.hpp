#pragma once

// Distributional 1-periodic potentials q = C + Q' given by finite Fourier
// tables, and their L2 primitives Q. The harmonic convention is
//
//     q(x) = C + sum_{m != 0} qhat(2m) e^{2 pi i m x},   qhat(-2m) = conj(qhat(2m)),
//
// i.e. the even-integer index k = 2m survives only in the Sobolev weights
// <2m> = 1 + 2|m|. The mean C is kept out of Q and applied to spectra as an
// exact shift afterwards.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "hillband/errors.hpp"

namespace hillband {

using complexd = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Real 1-periodic distribution with finitely many harmonics.
/// Only the m >= 1 half of the table is stored; the m <= -1 coefficients
/// are synthesized as conjugates, so Hermitian symmetry holds by
/// construction and the represented q is always real-valued.
class FourierPotential {
public:
    FourierPotential() = default;

    /// Build from (m, qhat(2m)) entries, m != 0. Entries may carry either
    /// sign of m; when both signs of an index appear their values must be
    /// exact conjugates. The mean C = qhat(0) is passed separately.
    static FourierPotential from_harmonics(
        const std::vector<std::pair<int, complexd>>& entries, double mean) {
        FourierPotential p;
        p.mean_ = mean;
        std::map<int, complexd> seen;
        for (const auto& [m, value] : entries) {
            if (m == 0)
                throw format_error("harmonic index 0 not allowed; pass the mean separately");
            if (seen.count(m))
                throw format_error("duplicate harmonic index m=" + std::to_string(m));
            seen.emplace(m, value);
        }
        for (const auto& [m, value] : seen) {
            auto conj_it = seen.find(-m);
            if (conj_it != seen.end() && conj_it->second != std::conj(value))
                throw symmetry_error("conjugate mismatch between m=" + std::to_string(m) +
                                     " and m=" + std::to_string(-m));
            p.positive_[std::abs(m)] = (m > 0) ? value : std::conj(value);
        }
        p.refresh_max_harmonic();
        return p;
    }

    /// qhat(2m) for any integer m (0 outside the stored band, mean at m=0).
    complexd coefficient(int m) const {
        if (m == 0) return {mean_, 0.0};
        auto it = positive_.find(std::abs(m));
        if (it == positive_.end()) return {0.0, 0.0};
        return (m > 0) ? it->second : std::conj(it->second);
    }

    double mean() const { return mean_; }
    int max_harmonic() const { return max_harmonic_; }
    std::size_t stored_pairs() const { return positive_.size(); }

    /// Stored coefficients for m = 1..K as a dense vector (zeros included).
    std::vector<complexd> positive_half() const {
        std::vector<complexd> v(static_cast<std::size_t>(max_harmonic_), complexd{0.0, 0.0});
        for (const auto& [m, value] : positive_) v[static_cast<std::size_t>(m - 1)] = value;
        return v;
    }

    FourierPotential with_mean(double mean) const {
        FourierPotential p = *this;
        p.mean_ = mean;
        return p;
    }

    friend FourierPotential operator-(const FourierPotential& a, const FourierPotential& b) {
        FourierPotential d;
        d.mean_ = a.mean_ - b.mean_;
        d.positive_ = a.positive_;
        for (const auto& [m, value] : b.positive_) {
            auto it = d.positive_.find(m);
            if (it == d.positive_.end())
                d.positive_[m] = -value;
            else if ((it->second -= value) == complexd{0.0, 0.0})
                d.positive_.erase(it);
        }
        d.refresh_max_harmonic();
        return d;
    }

private:
    void refresh_max_harmonic() {
        max_harmonic_ = positive_.empty() ? 0 : positive_.rbegin()->first;
    }

    std::map<int, complexd> positive_; // m >= 1 -> qhat(2m)
    double mean_ = 0.0;                // C = qhat(0)
    int max_harmonic_ = 0;             // K, tight bound on stored |m|
};

/// Drop all harmonics with |m| > n; the mean is untouched.
inline FourierPotential truncate(const FourierPotential& p, int n) {
    if (n < 0) throw format_error("truncation order must be >= 0");
    std::vector<std::pair<int, complexd>> kept;
    for (int m = 1; m <= std::min(n, p.max_harmonic()); ++m)
        if (complexd c = p.coefficient(m); c != complexd{0.0, 0.0}) kept.emplace_back(m, c);
    return FourierPotential::from_harmonics(kept, p.mean());
}

/// || q ||_{H^-1}: sqrt( |C|^2 + sum_{m!=0} (1+2|m|)^-2 |qhat(2m)|^2 ).
inline double hminus1_norm(const FourierPotential& p) {
    double sum = p.mean() * p.mean();
    for (int m = 1; m <= p.max_harmonic(); ++m) {
        double w = 1.0 + 2.0 * m;
        sum += 2.0 * std::norm(p.coefficient(m)) / (w * w);
    }
    return std::sqrt(sum);
}

/// Deterministic H^-1 test potential: qhat(2m) = amplitude * m^-decay * w_m
/// with w_m drawn uniformly from the complex unit disk by a fixed-seed
/// xorshift generator (kept self-contained so outputs are identical across
/// standard-library implementations). Mean 0.
inline FourierPotential random_potential(std::uint64_t seed, int K, double amplitude,
                                         double decay) {
    if (K < 1) throw format_error("random potential needs K >= 1");
    if (decay < 0.0) throw format_error("decay must be >= 0");
    std::uint64_t state = seed * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull;
    auto next_u01 = [&state]() {
        // xorshift64* -- stable across platforms, good enough for test data
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        std::uint64_t bits = state * 0x2545F4914F6CDD1Dull;
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    };
    std::vector<std::pair<int, complexd>> entries;
    entries.reserve(static_cast<std::size_t>(K));
    for (int m = 1; m <= K; ++m) {
        double re, im;
        do {
            re = 2.0 * next_u01() - 1.0;
            im = 2.0 * next_u01() - 1.0;
        } while (re * re + im * im > 1.0);
        double scale = amplitude * std::pow(static_cast<double>(m), -decay);
        entries.emplace_back(m, complexd{scale * re, scale * im});
    }
    return FourierPotential::from_harmonics(entries, 0.0);
}

/// Zero-mean 1-periodic primitive Q with q = C + Q'. Evaluable everywhere;
/// the ODE layer additionally needs the breakpoints where Q (or its slope)
/// jumps so that integration never straddles a discontinuity.
class PrimitiveProfile {
public:
    enum class Kind { trig_sum, sawtooth_comb, piecewise_linear };

    static PrimitiveProfile zero() { return trig({}, 0.0); }

    /// Trigonometric sum with table Qhat(2m), m = 1..K (half table).
    static PrimitiveProfile trig(std::vector<complexd> qhat_positive, double mean_shift) {
        PrimitiveProfile p;
        p.kind_ = Kind::trig_sum;
        p.trig_ = std::move(qhat_positive);
        p.mean_shift_ = mean_shift;
        return p;
    }

    /// Exact primitive of the delta comb alpha*sum_n delta(x-n) minus its
    /// mean: Q(x) = alpha*(1/2 - x) on (0,1), jump +alpha at integers.
    static PrimitiveProfile sawtooth(double alpha) {
        PrimitiveProfile p;
        p.kind_ = Kind::sawtooth_comb;
        p.alpha_ = alpha;
        p.mean_shift_ = alpha;
        return p;
    }

    /// Continuous piecewise-linear Q on [0,1) from breakpoints 0 = b_0 <
    /// b_1 < ... < 1 and one slope per piece, centered to zero mean. A
    /// mismatch between Q(1^-) and Q(0^+) is a jump at the period seam
    /// (a delta of that strength in q at every integer).
    static PrimitiveProfile piecewise_linear(std::vector<double> breakpoints,
                                             std::vector<double> slopes, double mean_shift) {
        if (breakpoints.empty() || breakpoints.front() != 0.0)
            throw format_error("piecewise profile needs breakpoints starting at 0");
        if (breakpoints.size() != slopes.size())
            throw format_error("one slope per piece required");
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
            if (!(breakpoints[i] < breakpoints[i + 1]))
                throw format_error("breakpoints must increase strictly");
        if (breakpoints.back() >= 1.0)
            throw format_error("breakpoints must lie in [0,1)");
        PrimitiveProfile p;
        p.kind_ = Kind::piecewise_linear;
        p.breaks_ = std::move(breakpoints);
        p.slopes_ = std::move(slopes);
        p.mean_shift_ = mean_shift;
        // integrate the slopes once, then center so that the mean vanishes
        std::size_t n = p.breaks_.size();
        p.values_.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double right = (i + 1 < n) ? p.breaks_[i + 1] : 1.0;
            p.values_[i + 1] = p.values_[i] + p.slopes_[i] * (right - p.breaks_[i]);
        }
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double right = (i + 1 < n) ? p.breaks_[i + 1] : 1.0;
            double len = right - p.breaks_[i];
            mean += 0.5 * (p.values_[i] + p.values_[i + 1]) * len;
        }
        for (double& v : p.values_) v -= mean;
        return p;
    }

    Kind kind() const { return kind_; }
    double mean_shift() const { return mean_shift_; }
    double comb_strength() const { return alpha_; }
    const std::vector<complexd>& trig_table() const { return trig_; }

    /// Q(x), 1-periodic. At a jump the value is the midpoint of the
    /// one-sided limits (0 for the sawtooth).
    double value(double x) const {
        double t = x - std::floor(x);
        switch (kind_) {
        case Kind::trig_sum:
            return trig_value(t);
        case Kind::sawtooth_comb:
            if (t == 0.0) return 0.0;
            return alpha_ * (0.5 - t);
        case Kind::piecewise_linear: {
            if (t == 0.0) return 0.5 * (values_.front() + values_.back());
            std::size_t i = piece_index(t);
            return values_[i] + slopes_[i] * (t - breaks_[i]);
        }
        }
        return 0.0; // unreachable
    }

    /// Q(x) evaluated on the smooth piece containing hint_mid; used by the
    /// integrator so that subinterval endpoints take their one-sided limit
    /// values instead of the jump convention above.
    double value_on_piece(double x, double hint_mid) const {
        switch (kind_) {
        case Kind::trig_sum:
            return trig_value(x - std::floor(x));
        case Kind::sawtooth_comb: {
            double cell = std::floor(hint_mid);
            return alpha_ * (0.5 - (x - cell));
        }
        case Kind::piecewise_linear: {
            double cell = std::floor(hint_mid);
            std::size_t i = piece_index(hint_mid - cell);
            return values_[i] + slopes_[i] * ((x - cell) - breaks_[i]);
        }
        }
        return 0.0; // unreachable
    }

    /// Points in (a, b) where Q or Q' jumps, ascending.
    std::vector<double> breakpoints_in(double a, double b) const {
        std::vector<double> out;
        if (kind_ == Kind::trig_sum) return out;
        std::vector<double> cell_offsets{0.0};
        if (kind_ == Kind::piecewise_linear)
            cell_offsets.assign(breaks_.begin(), breaks_.end());
        for (double n = std::floor(a); n < b + 1.0; n += 1.0)
            for (double off : cell_offsets) {
                double p = n + off;
                if (p > a && p < b) out.push_back(p);
            }
        return out;
    }

    /// Crude upper estimate of ||Q||_inf used for the spectral scan floor.
    double sup_estimate() const {
        switch (kind_) {
        case Kind::trig_sum: {
            double s = 0.0;
            for (const complexd& c : trig_) s += 2.0 * std::abs(c);
            return s;
        }
        case Kind::sawtooth_comb:
            return 0.5 * std::abs(alpha_);
        case Kind::piecewise_linear: {
            double s = 0.0;
            for (double v : values_) s = std::max(s, std::abs(v));
            return s;
        }
        }
        return 0.0; // unreachable
    }

private:
    double trig_value(double t) const {
        // Q(t) = sum_m 2 Re( Qhat(2m) z^m ), z = e^{2 pi i t}
        complexd z = std::polar(1.0, two_pi * t);
        complexd zm{1.0, 0.0};
        double sum = 0.0;
        for (const complexd& c : trig_) {
            zm *= z;
            sum += 2.0 * (c.real() * zm.real() - c.imag() * zm.imag());
        }
        return sum;
    }

    std::size_t piece_index(double t) const {
        std::size_t i = breaks_.size() - 1;
        while (i > 0 && t < breaks_[i]) --i;
        return i;
    }

    Kind kind_ = Kind::trig_sum;
    double mean_shift_ = 0.0;
    std::vector<complexd> trig_;  // trig_sum
    double alpha_ = 0.0;          // sawtooth_comb
    std::vector<double> breaks_, slopes_, values_; // piecewise_linear
};

/// Termwise antiderivative: Qhat(2m) = qhat(2m) / (2 pi i m), zero mean,
/// with the mean C carried along for the spectral shift.
inline PrimitiveProfile build_primitive(const FourierPotential& p) {
    std::vector<complexd> qhat = p.positive_half();
    for (std::size_t i = 0; i < qhat.size(); ++i) {
        double m = static_cast<double>(i + 1);
        qhat[i] /= complexd{0.0, two_pi * m};
    }
    return PrimitiveProfile::trig(std::move(qhat), p.mean());
}

/// Canonical singular test potential q = alpha * sum_n delta(x - n):
/// qhat(2m) = alpha for every m, mean alpha. Returns the Fourier table
/// truncated at |m| <= K together with the exact sawtooth primitive.
inline std::pair<FourierPotential, PrimitiveProfile> delta_comb(double alpha, int K) {
    if (!std::isfinite(alpha)) throw format_error("delta comb strength must be finite");
    if (K < 0) throw format_error("delta comb truncation must be >= 0");
    std::vector<std::pair<int, complexd>> entries;
    if (alpha != 0.0)
        for (int m = 1; m <= K; ++m) entries.emplace_back(m, complexd{alpha, 0.0});
    FourierPotential p = FourierPotential::from_harmonics(entries, alpha);
    return {std::move(p), alpha == 0.0 ? PrimitiveProfile::zero()
                                       : PrimitiveProfile::sawtooth(alpha)};
}

/// Pointwise evaluation of Q (1-periodic).
inline double evaluate_Q(const PrimitiveProfile& profile, double x) { return profile.value(x); }

} // namespace hillband
