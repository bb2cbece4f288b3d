#pragma once

// Band-gap assembly: locate the spectral gap endpoints as the ordered roots
// of Delta(lambda) = +-2, classify them by parity, detect collapsed gaps,
// and run truncation-convergence studies.
//
// The scan walks a grid uniform in s = sqrt(lambda - floor). Simple
// endpoints are bracketed by sign changes and polished by Newton steps with
// the exact dDelta/dlambda from the variational system. Near-collapsed
// pairs are resolved through
//
//     F(lambda) := (M11 - M22)^2 + 4 M12 M21  ==  Delta^2 - 4,
//
// whose factors all vanish together at a gap collapse, so F keeps full
// relative accuracy exactly where Delta -+ 2 loses it to cancellation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hillband/parallel.hpp"
#include "hillband/parity.hpp"
#include "hillband/propagator.hpp"

namespace hillband {

enum class Side { minus, plus, bottom };

inline const char* to_string(Side s) {
    switch (s) {
    case Side::minus: return "minus";
    case Side::plus: return "plus";
    default: return "bottom";
    }
}

/// One gap endpoint: lambda_0 (k = 0, side bottom) or lambda_k^-+.
struct GapEndpoint {
    double lambda = 0.0;
    int k = 0;
    Side side = Side::bottom;
    Parity parity = Parity::periodic;
    bool collapsed = false;
};

struct Band {
    double lo = 0.0, hi = 0.0;
};

struct Gap {
    double lo = 0.0, hi = 0.0;
    int k = 0;
    bool collapsed = false;
};

/// Ordered endpoints lambda_0 < lambda_1^- <= lambda_1^+ < ... with the
/// derived band/gap intervals. All lambda values refer to the full
/// operator: the potential mean has already been applied as a shift.
struct BandStructure {
    std::vector<GapEndpoint> endpoints;
    double mean_shift_applied = 0.0;
    std::vector<std::string> warnings;

    int num_gaps() const {
        return endpoints.empty() ? 0 : static_cast<int>((endpoints.size() - 1) / 2);
    }

    double bottom() const {
        if (endpoints.empty()) throw usage_error("empty band structure");
        return endpoints.front().lambda;
    }

    const GapEndpoint& endpoint(int k, Side side) const {
        if (k == 0 && side == Side::bottom) return endpoints.at(0);
        if (k < 1 || side == Side::bottom) throw usage_error("no such endpoint");
        std::size_t idx = 2 * static_cast<std::size_t>(k) - 1 + (side == Side::plus ? 1 : 0);
        if (idx >= endpoints.size()) throw usage_error("endpoint index beyond computed gaps");
        const GapEndpoint& e = endpoints[idx];
        if (e.k != k || e.side != side) throw usage_error("band structure index mismatch");
        return e;
    }

    /// B_0 = [lambda_0, lambda_1^-], B_k = [lambda_k^+, lambda_{k+1}^-].
    std::vector<Band> bands() const {
        std::vector<Band> out;
        for (int k = 0; k + 1 <= num_gaps(); ++k) {
            double lo = (k == 0) ? bottom() : endpoint(k, Side::plus).lambda;
            out.push_back({lo, endpoint(k + 1, Side::minus).lambda});
        }
        return out;
    }

    /// G_0 = (-inf, lambda_0), G_k = (lambda_k^-, lambda_k^+).
    std::vector<Gap> gaps() const {
        std::vector<Gap> out;
        out.push_back({-std::numeric_limits<double>::infinity(), bottom(), 0, false});
        for (int k = 1; k <= num_gaps(); ++k)
            out.push_back({endpoint(k, Side::minus).lambda, endpoint(k, Side::plus).lambda, k,
                           endpoint(k, Side::minus).collapsed});
        return out;
    }
};

struct SearchConfig {
    int num_gaps = 3;
    double s_step = 0.02;       // grid spacing in s = sqrt(lambda - floor)
    double root_tol = 1e-10;    // in lambda, relative above |lambda| = 1
    double tangency_tol = 1e-7; // Delta-level tolerance for tangency classification
    double lambda_floor = std::numeric_limits<double>::quiet_NaN(); // NaN: automatic
    IntegratorConfig integ{};

    void validate() const {
        integ.validate();
        if (num_gaps < 1) throw format_error("num_gaps must be >= 1");
        if (!(s_step > 0.0) || !(root_tol > 0.0) || !(tangency_tol > 0.0))
            throw format_error("search tolerances must be positive");
    }

    double tol_at(double lambda) const { return root_tol * std::max(1.0, std::abs(lambda)); }
};

/// Conservative lower bound for the scan: the operators are lower
/// semibounded but no explicit bound is available for rough q, so start
/// well below anything the potential size suggests.
inline double scan_floor(const PrimitiveProfile& profile) {
    double est = profile.sup_estimate();
    return -4.0 * (1.0 + est * est + std::abs(profile.mean_shift()));
}

struct DiscSample {
    double lambda = 0.0;
    double delta = 0.0;
    bool valid = true;
};

namespace detail {

inline double gap_function(const Monodromy& M) {
    double d = M.m11 - M.m22;
    return d * d + 4.0 * M.m12 * M.m21;
}

/// Classic Brent root finder on a bracket with known endpoint values.
template <class F>
double brent(F&& f, double a, double b, double fa, double fb, double xtol) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) throw bracket_error("brent: no sign change over bracket");
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double s = fb / fa, p, q;
            if (a == c) { // secant
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else { // inverse quadratic
                double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

// Evaluation helpers bound to one profile. Scanning runs at the caller's
// tolerances; refinement tightens them so that root positions hold up at
// root_tol even where dDelta/dlambda is small.
struct Evaluator {
    const PrimitiveProfile& profile;
    IntegratorConfig scan_integ;
    IntegratorConfig fine_integ;

    Evaluator(const PrimitiveProfile& p, const SearchConfig& cfg)
        : profile(p), scan_integ(cfg.integ), fine_integ(cfg.integ.tightened(1e-3)) {}

    double delta_scan(double lam) const { return monodromy(profile, lam, 0.0, scan_integ).trace(); }
    double delta(double lam) const { return monodromy(profile, lam, 0.0, fine_integ).trace(); }
    double gap_fn(double lam) const {
        return gap_function(monodromy(profile, lam, 0.0, fine_integ));
    }
    MonodromyDerivative with_derivative(double lam) const {
        return monodromy_with_derivative(profile, lam, 0.0, fine_integ);
    }
};

/// Brent on Delta - target followed by guarded Newton polish.
inline double refine_crossing(const Evaluator& ev, double target, double lo, double hi,
                              double flo, double fhi, double xtol) {
    double root = brent([&](double lam) { return ev.delta(lam) - target; }, lo, hi, flo, fhi,
                        std::max(xtol, 1e-14));
    for (int i = 0; i < 3; ++i) {
        MonodromyDerivative d = ev.with_derivative(root);
        double g = d.M.trace() - target;
        double gp = d.dtrace();
        if (std::abs(gp) < 1e-10) break;
        double step = g / gp;
        double next = root - step;
        if (next < lo || next > hi) break; // polish never leaves the bracket
        root = next;
        if (std::abs(step) < 0.05 * xtol) break;
    }
    return root;
}

struct PairResult {
    double lo = 0.0, hi = 0.0;
    bool collapsed = false;
    bool low_confidence = false;
};

/// Resolve the gap under a grid extremum of Delta: locate the extremum as
/// the root of dDelta/dlambda, then split the pair through the gap
/// function F if it pokes above zero there.
inline PairResult refine_pair(const Evaluator& ev, double wa, double wb, double tol) {
    PairResult out;
    double da = ev.with_derivative(wa).dtrace();
    double db = ev.with_derivative(wb).dtrace();
    double span = wb - wa;
    for (int grow = 0; grow < 2 && (da > 0.0) == (db > 0.0); ++grow) {
        wa -= 0.5 * span;
        wb += 0.5 * span;
        da = ev.with_derivative(wa).dtrace();
        db = ev.with_derivative(wb).dtrace();
    }
    double fine_tol = std::max(0.25 * tol, 1e-14);
    double vertex;
    if ((da > 0.0) != (db > 0.0))
        vertex = brent([&](double lam) { return ev.with_derivative(lam).dtrace(); }, wa, wb, da,
                       db, fine_tol);
    else { // could not isolate the extremum; fall back to the window center
        vertex = 0.5 * (wa + wb);
        out.low_confidence = true;
    }

    double Fv = ev.gap_fn(vertex);
    if (Fv > 0.0) {
        double Fa = ev.gap_fn(wa);
        double Fb = ev.gap_fn(wb);
        if (Fa < 0.0 && Fb < 0.0) {
            out.lo = brent([&](double lam) { return ev.gap_fn(lam); }, wa, vertex, Fa, Fv,
                           fine_tol);
            out.hi = brent([&](double lam) { return ev.gap_fn(lam); }, vertex, wb, Fv, Fb,
                           fine_tol);
            out.collapsed = (out.hi - out.lo) <= tol;
            if (out.collapsed) out.lo = out.hi = 0.5 * (out.lo + out.hi);
            return out;
        }
        out.low_confidence = true;
    }
    out.lo = out.hi = vertex;
    out.collapsed = true;
    return out;
}

struct ScanPoint {
    double lambda = 0.0;
    double delta = 0.0;
};

/// Grid iterator in s = sqrt(lambda - floor) with bounded range extension.
class GridWalk {
public:
    GridWalk(const Evaluator& ev, double floor, double s_step, double s_max)
        : ev_(ev), floor_(floor), s_step_(s_step), s_max_(s_max) {}

    bool exhausted() const { return s_ > s_max_; }

    bool extend() {
        if (extensions_left_ == 0) return false;
        --extensions_left_;
        s_max_ *= 1.5;
        return true;
    }

    /// Next grid sample; nullopt when the integrator failed there (the
    /// sample is recorded as missing, the scan carries on).
    std::optional<ScanPoint> next() {
        double s = s_;
        s_ += s_step_;
        double lam = floor_ + s * s;
        try {
            return ScanPoint{lam, ev_.delta_scan(lam)};
        } catch (const integration_error&) {
            return std::nullopt;
        }
    }

    double grid_spacing_at(double lambda) const {
        return 2.0 * std::sqrt(std::max(lambda - floor_, 1.0)) * s_step_;
    }

private:
    const Evaluator& ev_;
    double floor_;
    double s_ = 0.0;
    double s_step_;
    double s_max_;
    int extensions_left_ = 2;
};

inline bool is_min_pattern(const std::deque<ScanPoint>& w) {
    return w[0].delta >= w[1].delta && w[1].delta >= w[2].delta && w[2].delta <= w[3].delta &&
           w[3].delta <= w[4].delta && w[2].delta < std::min(w[0].delta, w[4].delta);
}

inline bool is_max_pattern(const std::deque<ScanPoint>& w) {
    return w[0].delta <= w[1].delta && w[1].delta <= w[2].delta && w[2].delta >= w[3].delta &&
           w[3].delta >= w[4].delta && w[2].delta > std::max(w[0].delta, w[4].delta);
}

// detection window: how far an extremum may sit from +-2 and still be
// treated as a (near-)tangency candidate
inline constexpr double extremum_window = 0.05;

} // namespace detail

/// Discriminant samples over [lambda_lo, lambda_hi], uniform in sqrt(lambda)
/// above zero and uniform in lambda below. Integration failures at single
/// points are recorded as invalid samples.
inline std::vector<DiscSample> sample_discriminant(const PrimitiveProfile& profile,
                                                   double lambda_lo, double lambda_hi, int n,
                                                   const SearchConfig& cfg = {}) {
    cfg.validate();
    if (!(lambda_lo < lambda_hi)) throw format_error("sample_discriminant: empty range");
    if (n < 2) throw format_error("sample_discriminant: need at least 2 samples");

    std::vector<double> lambdas;
    lambdas.reserve(static_cast<std::size_t>(n));
    if (lambda_hi <= 0.0) {
        for (int i = 0; i < n; ++i)
            lambdas.push_back(lambda_lo + (lambda_hi - lambda_lo) * i / double(n - 1));
    } else if (lambda_lo >= 0.0) {
        double slo = std::sqrt(lambda_lo), shi = std::sqrt(lambda_hi);
        for (int i = 0; i < n; ++i) {
            double s = slo + (shi - slo) * i / double(n - 1);
            lambdas.push_back(s * s);
        }
    } else {
        // split the n-1 intervals between the lambda-uniform negative part
        // and the s-uniform positive part by their coordinate lengths
        double lneg = -lambda_lo, lpos = std::sqrt(lambda_hi);
        int kneg = static_cast<int>(std::lround((n - 1) * lneg / (lneg + lpos)));
        kneg = std::clamp(kneg, 1, n - 2);
        for (int i = 0; i < kneg; ++i) lambdas.push_back(lambda_lo + lneg * i / double(kneg));
        int kpos = n - 1 - kneg;
        for (int i = 0; i <= kpos; ++i) {
            double s = lpos * i / double(kpos);
            lambdas.push_back(s * s);
        }
    }
    lambdas.front() = lambda_lo;
    lambdas.back() = lambda_hi;

    std::vector<DiscSample> out(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        out[i].lambda = lambdas[i];
        try {
            out[i].delta = discriminant(profile, lambdas[i], cfg.integ);
            out[i].valid = true;
        } catch (const integration_error&) {
            out[i].delta = std::numeric_limits<double>::quiet_NaN();
            out[i].valid = false;
        }
    });
    return out;
}

enum class TangencyKind { crossing, tangent };

struct TangencyResult {
    TangencyKind kind = TangencyKind::crossing;
    bool low_confidence = false;
    double fitted_vertex_lambda = 0.0;
    double fitted_vertex_value = 0.0;
};

/// Classify a grid extremum candidate near Delta = target by a local
/// 5-point quadratic fit: tangent when the fitted extremum value lies
/// within tangency_tol of the target with the consistent curvature sign.
/// Ambiguous fits fall back to `crossing` with the low-confidence flag.
inline TangencyResult detect_tangency(const PrimitiveProfile& profile, double lambda_star,
                                      double target, const SearchConfig& cfg = {}) {
    cfg.validate();
    double floor =
        std::isfinite(cfg.lambda_floor) ? cfg.lambda_floor : scan_floor(profile);
    double scale = std::max(1.0, std::abs(lambda_star));
    double h = std::max(0.5 * std::sqrt(std::max(lambda_star - floor, 1.0)) * cfg.s_step,
                        100.0 * cfg.root_tol * scale);
    IntegratorConfig fine = cfg.integ.tightened(1e-2);
    double sy = 0.0, syt = 0.0, syt2 = 0.0;
    for (int j = -2; j <= 2; ++j) {
        double v = monodromy(profile, lambda_star + j * h, 0.0, fine).trace();
        sy += v;
        syt += v * j;
        syt2 += v * j * j;
    }
    // least-squares parabola on nodes t = -2..2: sum t^2 = 10, sum t^4 = 34
    double c1 = syt / 10.0;
    double c0 = (34.0 * sy - 10.0 * syt2) / 70.0;
    double c2 = (5.0 * syt2 - 10.0 * sy) / 70.0;

    TangencyResult out;
    bool curvature_ok = (target > 0.0) ? (c2 < 0.0) : (c2 > 0.0);
    if (!curvature_ok || c2 == 0.0) {
        out.low_confidence = true;
        return out;
    }
    double tv = -c1 / (2.0 * c2);
    out.fitted_vertex_lambda = lambda_star + tv * h;
    out.fitted_vertex_value = c0 - c1 * c1 / (4.0 * c2);
    if (std::abs(tv) > 3.0) {
        out.low_confidence = true;
        return out;
    }
    double excess = (target > 0.0) ? out.fitted_vertex_value - target
                                   : target - out.fitted_vertex_value;
    if (std::abs(out.fitted_vertex_value - target) <= cfg.tangency_tol)
        out.kind = TangencyKind::tangent;
    else if (excess > cfg.tangency_tol)
        out.kind = TangencyKind::crossing; // clearly pokes through
    else
        out.low_confidence = true; // extremum does not reach the target
    return out;
}

/// Refine a single root of Delta = target over a bracket. A sign change is
/// refined as a crossing (Brent, never leaves the bracket, Newton-polished
/// via dDelta/dlambda). Without a sign change the bracket may still hold a
/// tangent root (a collapsed gap, where Delta touches the target without
/// crossing): the extremum of Delta is then located as the root of
/// dDelta/dlambda and returned, provided Delta actually reaches the target
/// there. Anything else is an invalid bracket.
inline double refine_endpoint(const PrimitiveProfile& profile, double target,
                              std::pair<double, double> bracket, const SearchConfig& cfg = {},
                              bool tangency = false) {
    cfg.validate();
    detail::Evaluator ev(profile, cfg);
    auto [lo, hi] = bracket;
    if (!(lo < hi)) throw format_error("refine_endpoint: invalid bracket");
    double tol = cfg.tol_at(std::max(std::abs(lo), std::abs(hi)));

    auto tangent_root = [&]() {
        double da = ev.with_derivative(lo).dtrace();
        double db = ev.with_derivative(hi).dtrace();
        if ((da > 0.0) == (db > 0.0))
            throw bracket_error("refine_endpoint: no extremum of Delta inside the bracket");
        return detail::brent([&](double lam) { return ev.with_derivative(lam).dtrace(); }, lo,
                             hi, da, db, std::max(0.02 * tol, 1e-13));
    };
    if (tangency) return tangent_root();

    double flo = ev.delta(lo) - target;
    double fhi = ev.delta(hi) - target;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        double vertex;
        try {
            vertex = tangent_root();
        } catch (const bracket_error&) {
            throw bracket_error(
                "refine_endpoint: no sign change of Delta - target over bracket");
        }
        if (std::abs(ev.delta(vertex) - target) > std::max(cfg.tangency_tol, 10.0 * tol))
            throw bracket_error(
                "refine_endpoint: no sign change of Delta - target over bracket");
        return vertex;
    }
    return detail::refine_crossing(ev, target, lo, hi, flo, fhi, tol);
}

namespace detail {

struct ScanOutcome {
    std::vector<GapEndpoint> endpoints;
    std::vector<std::string> warnings;
    bool floor_hit = false; // first sample already below Delta = 2
};

// One pass of the grid walk. `single_target` switches between the full
// band-structure scan (alternating +-2) and a one-target eigenvalue count.
inline ScanOutcome scan_endpoints(const Evaluator& ev, const SearchConfig& cfg, double floor,
                                  bool single_target, double target, int wanted_roots) {
    ScanOutcome res;
    double periods = single_target ? (wanted_roots + 2.5) : (cfg.num_gaps + 1.5);
    double lam_hi_guess =
        std::pow(periods * std::numbers::pi, 2.0) + std::abs(ev.profile.mean_shift()) + 4.0;
    GridWalk walk(ev, floor, cfg.s_step, std::sqrt(std::max(lam_hi_guess - floor, 25.0)));

    std::deque<ScanPoint> window;
    std::optional<ScanPoint> prev;
    bool first_valid_seen = false;

    // band-structure state
    int gap_k = 0;            // 0: still before lambda_0
    bool waiting_close = false;
    double pending_minus = 0.0;
    // single-target state; the scan starts above Delta = 2, so for target
    // +2 it begins on the far side
    bool beyond = (single_target && target > 0.0);
    int roots_found = 0;
    double suppress_before = -std::numeric_limits<double>::infinity();

    auto expected_target = [&]() {
        if (single_target) return target;
        if (gap_k == 0) return 2.0;
        return (gap_k % 2 == 1) ? -2.0 : 2.0;
    };
    auto push_endpoint = [&](double lam, bool collapsed, Side side) {
        GapEndpoint e;
        e.lambda = lam;
        e.collapsed = collapsed;
        if (!single_target && gap_k == 0) {
            e.k = 0;
            e.side = Side::bottom;
            e.parity = Parity::periodic;
        } else {
            e.k = gap_k;
            e.side = side;
            e.parity = (gap_k % 2 == 0) ? Parity::periodic : Parity::semiperiodic;
        }
        res.endpoints.push_back(e);
    };
    auto done = [&]() {
        if (single_target) return roots_found >= wanted_roots;
        return gap_k > cfg.num_gaps;
    };

    while (!done()) {
        if (walk.exhausted()) {
            if (!walk.extend())
                throw bracket_error(
                    "bracketing-incomplete: discriminant scan ran out of range before finding "
                    "all requested endpoints");
        }
        std::optional<ScanPoint> cur = walk.next();
        if (!cur) {
            // missing sample: the pattern window needs contiguous points,
            // but crossing detection keeps the last valid sample so the
            // bracket just widens across the hole
            window.clear();
            continue;
        }
        if (!first_valid_seen) {
            first_valid_seen = true;
            if (cur->delta <= 2.0) res.floor_hit = true;
        }

        // crossing detection against the expected target; a sample sitting
        // exactly on the root is consumed once, as the left end of the next
        // interval
        if (prev) {
            double t = expected_target();
            double fp = prev->delta - t, fc = cur->delta - t;
            bool hit_exactly = (fp == 0.0);
            bool crossing = hit_exactly || (fc != 0.0 && (fp > 0.0) != (fc > 0.0));
            if (crossing && cur->lambda > suppress_before) {
                double tol = cfg.tol_at(std::max(std::abs(prev->lambda), std::abs(cur->lambda)));
                double root = hit_exactly
                                  ? prev->lambda
                                  : refine_crossing(ev, t, prev->lambda, cur->lambda, fp, fc, tol);
                if (single_target) {
                    ++roots_found;
                    push_endpoint(root, false, Side::minus);
                    beyond = !beyond;
                } else if (gap_k == 0) {
                    push_endpoint(root, false, Side::bottom);
                    gap_k = 1;
                } else if (!waiting_close) {
                    pending_minus = root;
                    waiting_close = true;
                } else {
                    push_endpoint(pending_minus, false, Side::minus);
                    push_endpoint(root, false, Side::plus);
                    waiting_close = false;
                    ++gap_k;
                }
                window.clear();
                prev = cur;
                continue;
            }
        }

        window.push_back(*cur);
        if (window.size() > 5) window.pop_front();
        if (window.size() == 5 && !waiting_close && window[2].lambda > suppress_before) {
            double t = expected_target();
            bool in_region = single_target ? !beyond : gap_k >= 1;
            bool pattern = (t < 0.0) ? is_min_pattern(window) : is_max_pattern(window);
            bool near = std::abs(window[2].delta - t) <= extremum_window &&
                        (t < 0.0 ? window[2].delta >= t : window[2].delta <= t);
            if (in_region && pattern && near) {
                double tol = cfg.tol_at(std::abs(window[2].lambda));
                TangencyResult cls;
                {
                    SearchConfig tcfg = cfg;
                    tcfg.lambda_floor = floor;
                    cls = detect_tangency(ev.profile, window[2].lambda, t, tcfg);
                }
                PairResult pr = refine_pair(ev, window[0].lambda, window[4].lambda, tol);
                if (pr.low_confidence || cls.low_confidence)
                    res.warnings.push_back("low-confidence gap classification near lambda = " +
                                           std::to_string(window[2].lambda));
                if (single_target) {
                    push_endpoint(pr.lo, pr.collapsed, Side::minus);
                    push_endpoint(pr.hi, pr.collapsed, Side::plus);
                    roots_found += 2;
                } else {
                    push_endpoint(pr.lo, pr.collapsed, Side::minus);
                    push_endpoint(pr.hi, pr.collapsed, Side::plus);
                    ++gap_k;
                }
                suppress_before = pr.hi + 2.0 * walk.grid_spacing_at(pr.hi);
                window.clear();
            }
        }
        prev = cur;
    }
    return res;
}

// Run the scan with automatic floor lowering when the first sample is
// already inside the spectrum.
template <class Run>
auto with_floor_retries(const PrimitiveProfile& profile, const SearchConfig& cfg, Run&& run) {
    double floor = std::isfinite(cfg.lambda_floor) ? cfg.lambda_floor : scan_floor(profile);
    for (int attempt = 0;; ++attempt) {
        ScanOutcome out = run(floor);
        if (!out.floor_hit || attempt >= 2) {
            if (out.floor_hit)
                out.warnings.push_back(
                    "scan floor still intersects the spectrum after extensions; the bottom "
                    "endpoint may be unreliable");
            return out;
        }
        floor = 3.0 * floor - 20.0;
    }
}

} // namespace detail

/// Full band structure: lambda_0 plus the first cfg.num_gaps gaps, ordered,
/// parity-classified and collapse-flagged.
inline BandStructure band_structure(const PrimitiveProfile& profile,
                                    const SearchConfig& cfg = {}) {
    cfg.validate();
    detail::Evaluator ev(profile, cfg);
    detail::ScanOutcome out = detail::with_floor_retries(
        profile, cfg, [&](double floor) {
            return detail::scan_endpoints(ev, cfg, floor, false, 0.0, 0);
        });
    BandStructure bs;
    bs.endpoints = std::move(out.endpoints);
    bs.warnings = std::move(out.warnings);
    bs.mean_shift_applied = profile.mean_shift();
    return bs;
}

namespace detail {

inline std::vector<double> eigenvalue_list(const PrimitiveProfile& profile, double target,
                                           int count, const SearchConfig& cfg) {
    cfg.validate();
    if (count < 1) throw format_error("eigenvalue count must be >= 1");
    Evaluator ev(profile, cfg);
    ScanOutcome out = with_floor_retries(profile, cfg, [&](double floor) {
        return scan_endpoints(ev, cfg, floor, true, target, count);
    });
    std::vector<double> vals;
    vals.reserve(out.endpoints.size());
    for (const GapEndpoint& e : out.endpoints) vals.push_back(e.lambda);
    std::sort(vals.begin(), vals.end());
    vals.resize(static_cast<std::size_t>(count));
    return vals;
}

} // namespace detail

/// First `count` roots of Delta = +2 in increasing order; a tangency
/// contributes its two coincident roots (multiplicity 2).
inline std::vector<double> periodic_eigenvalues(const PrimitiveProfile& profile, int count,
                                                const SearchConfig& cfg = {}) {
    return detail::eigenvalue_list(profile, +2.0, count, cfg);
}

/// First `count` roots of Delta = -2, same conventions.
inline std::vector<double> semiperiodic_eigenvalues(const PrimitiveProfile& profile, int count,
                                                    const SearchConfig& cfg = {}) {
    return detail::eigenvalue_list(profile, -2.0, count, cfg);
}

struct ValidationCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Structural checks on an assembled band structure: the even/odd parity
/// rule, the interlacing inequalities, and the absence of isolated
/// spectrum points at collapsed gaps.
inline ValidationReport classify_and_validate(const PrimitiveProfile& profile,
                                              const BandStructure& bs,
                                              const SearchConfig& cfg = {}) {
    cfg.validate();
    ValidationReport report;
    IntegratorConfig fine = cfg.integ.tightened(1e-3);

    bool parity_ok = true;
    std::string parity_detail;
    for (const GapEndpoint& e : bs.endpoints) {
        Parity expect = (e.k % 2 == 0) ? Parity::periodic : Parity::semiperiodic;
        double target = (expect == Parity::periodic) ? 2.0 : -2.0;
        double dev = std::abs(discriminant(profile, e.lambda, fine) - target);
        if (e.parity != expect || dev >= 10.0 * cfg.root_tol) {
            parity_ok = false;
            parity_detail = "endpoint k=" + std::to_string(e.k) +
                            " |Delta - target| = " + std::to_string(dev);
            break;
        }
    }
    report.checks.push_back({"parity-rule", parity_ok, parity_detail});

    bool inter_ok = true;
    std::string inter_detail;
    for (std::size_t i = 0; i + 1 < bs.endpoints.size(); ++i) {
        const GapEndpoint& a = bs.endpoints[i];
        const GapEndpoint& b = bs.endpoints[i + 1];
        bool within_gap = (a.k == b.k && a.k >= 1);
        double tol = cfg.tol_at(std::max(std::abs(a.lambda), std::abs(b.lambda)));
        bool ok = within_gap ? (b.lambda >= a.lambda - tol)     // weak inside a gap
                             : (b.lambda > a.lambda + tol);     // strict across a band
        if (!ok) {
            inter_ok = false;
            inter_detail = "between endpoints " + std::to_string(i) + " and " +
                           std::to_string(i + 1);
            break;
        }
    }
    report.checks.push_back({"interlacing", inter_ok, inter_detail});

    bool isolated_ok = true;
    std::string iso_detail;
    for (const GapEndpoint& e : bs.endpoints) {
        if (!e.collapsed || e.side == Side::plus) continue;
        double off = 10.0 * cfg.tol_at(e.lambda);
        for (double lam : {e.lambda - off, e.lambda + off}) {
            double d = discriminant(profile, lam, fine);
            if (std::abs(d) > 2.0 + 1e-8) {
                isolated_ok = false;
                iso_detail = "collapsed endpoint at lambda = " + std::to_string(e.lambda) +
                             " not interior to the surrounding bands";
            }
        }
    }
    report.checks.push_back({"no-isolated-points", isolated_ok, iso_detail});
    return report;
}

struct ConvergenceRow {
    int n = 0;
    BandStructure structure;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;

    /// |lambda(row j+1) - lambda(row j)| per endpoint position.
    std::vector<std::vector<double>> successive_differences() const {
        std::vector<std::vector<double>> out;
        for (std::size_t j = 0; j + 1 < rows.size(); ++j) {
            const auto& a = rows[j].structure.endpoints;
            const auto& b = rows[j + 1].structure.endpoints;
            std::vector<double> d;
            for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
                d.push_back(std::abs(b[i].lambda - a[i].lambda));
            out.push_back(std::move(d));
        }
        return out;
    }
};

/// Band structures of the Fourier truncations q_n for each n in n_list.
inline ConvergenceTable convergence_study(const FourierPotential& q,
                                          const std::vector<int>& n_list,
                                          const SearchConfig& cfg = {}) {
    cfg.validate();
    if (n_list.empty()) throw format_error("convergence study needs at least one truncation");
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
        if (n_list[i] >= n_list[i + 1])
            throw format_error("truncation list must increase strictly");
    ConvergenceTable table;
    for (int n : n_list) {
        PrimitiveProfile profile = build_primitive(truncate(q, n));
        table.rows.push_back({n, band_structure(profile, cfg)});
    }
    return table;
}

} // namespace hillband
