#pragma once

// Propagation of the quasi-derivative first-order system
//
//     u'    = Q(x) u + u1
//     u1'   = (-lambda_c - Q(x)^2) u - Q(x) u1,      u1 := u' - Q u,
//
// over one period, and the resulting monodromy matrix / Floquet
// discriminant. The coordinates (u, u1) stay absolutely continuous across
// jumps of Q, which is what makes the ODE well-posed for distributional q.
//
// The spectral parameter passed to propagate/monodromy/discriminant refers
// to the full operator -u'' + (C + Q')u: the mean C stored on the profile
// is subtracted internally, so spectra come out already shifted.

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "hillband/potential.hpp"
#include "hillband/rk45.hpp"

namespace hillband {

/// Solution value and quasi-derivative at a point.
struct PropState {
    double u = 0.0;
    double u1 = 0.0;
    double x = 0.0;
};

/// Wronskian-type tolerance for |det M - 1| maintained by the trace-free
/// system; exceeding it signals a mis-integrated monodromy.
inline constexpr double monodromy_det_tol = 1e-9;

/// 2x2 transfer matrix of (u, u1) over one period at fixed lambda.
struct Monodromy {
    // column-major pairs: column 0 propagates (1,0), column 1 propagates (0,1)
    double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;
    double lambda = 0.0;
    double base_point = 0.0;

    double trace() const { return m11 + m22; }
    double det() const { return m11 * m22 - m12 * m21; }

    PropState apply(const PropState& s) const {
        return {m11 * s.u + m12 * s.u1, m21 * s.u + m22 * s.u1, s.x + 1.0};
    }
};

/// Right-hand side of the first-order system exactly as written above,
/// with lambda taken literally (no mean shift).
inline std::pair<double, double> system_rhs(const PrimitiveProfile& profile, double lambda,
                                            const PropState& state) {
    double Q = profile.value(state.x);
    return {Q * state.u + state.u1, (-lambda - Q * Q) * state.u - Q * state.u1};
}

namespace detail {

// Integrate an N-dimensional profile-driven system over [x0, x1], split at
// the profile's breakpoints so no step straddles a jump of Q. Within each
// smooth piece Q is evaluated by its one-sided formula (piece hinted by the
// subinterval midpoint).
template <std::size_t N, class PieceRHS>
void integrate_split(const PrimitiveProfile& profile, std::array<double, N>& y, double x0,
                     double x1, const IntegratorConfig& cfg, long& steps_left, PieceRHS&& rhs) {
    std::vector<double> cuts;
    if (cfg.breakpoint_splitting) cuts = profile.breakpoints_in(x0, x1);
    double a = x0;
    for (std::size_t j = 0; j <= cuts.size(); ++j) {
        double b = (j < cuts.size()) ? cuts[j] : x1;
        if (b <= a) continue;
        double mid = 0.5 * (a + b);
        auto f = [&](double x, const std::array<double, N>& s, std::array<double, N>& ds) {
            rhs(profile.value_on_piece(x, mid), s, ds);
        };
        rk45::integrate<N>(f, y, a, b, cfg, steps_left);
        a = b;
    }
}

template <std::size_t N>
void quasi_rhs_columns(double Q, double lambda_c, const std::array<double, N>& s,
                       std::array<double, N>& ds) {
    static_assert(N % 2 == 0);
    for (std::size_t c = 0; c + 1 < N; c += 2) {
        ds[c] = Q * s[c] + s[c + 1];
        ds[c + 1] = (-lambda_c - Q * Q) * s[c] - Q * s[c + 1];
    }
}

} // namespace detail

/// Propagate one state from state.x to x1 (x1 >= state.x).
inline PropState propagate(const PrimitiveProfile& profile, double lambda, const PropState& state,
                           double x1, const IntegratorConfig& cfg = {}) {
    cfg.validate();
    if (x1 < state.x) throw usage_error("propagate: x1 must be >= state.x");
    double lambda_c = lambda - profile.mean_shift();
    std::array<double, 2> y{state.u, state.u1};
    long budget = cfg.max_steps;
    detail::integrate_split<2>(profile, y, state.x, x1, cfg, budget,
                               [lambda_c](double Q, const std::array<double, 2>& s,
                                          std::array<double, 2>& ds) {
                                   detail::quasi_rhs_columns<2>(Q, lambda_c, s, ds);
                               });
    return {y[0], y[1], x1};
}

/// Monodromy over [x0, x0+1]. Both canonical columns are propagated in one
/// adaptive pass (a single 4-dimensional integration), so the computed M is
/// a product of per-step linear maps and det M stays pinned to 1.
inline Monodromy monodromy(const PrimitiveProfile& profile, double lambda, double x0 = 0.0,
                           const IntegratorConfig& cfg = {}) {
    cfg.validate();
    double lambda_c = lambda - profile.mean_shift();
    std::array<double, 4> y{1.0, 0.0, 0.0, 1.0}; // (u_a, u1_a, u_b, u1_b)
    long budget = cfg.max_steps;
    detail::integrate_split<4>(profile, y, x0, x0 + 1.0, cfg, budget,
                               [lambda_c](double Q, const std::array<double, 4>& s,
                                          std::array<double, 4>& ds) {
                                   detail::quasi_rhs_columns<4>(Q, lambda_c, s, ds);
                               });
    Monodromy M;
    M.m11 = y[0];
    M.m21 = y[1];
    M.m12 = y[2];
    M.m22 = y[3];
    M.lambda = lambda;
    M.base_point = x0;
    return M;
}

/// Monodromy together with its lambda-derivative, from the variational
/// system dM/dlambda' = A dM/dlambda + (dA/dlambda) M integrated alongside
/// the fundamental matrix. tr(dM) is the derivative of the discriminant.
struct MonodromyDerivative {
    Monodromy M;
    double d11 = 0.0, d12 = 0.0, d21 = 0.0, d22 = 0.0;
    double dtrace() const { return d11 + d22; }
};

inline MonodromyDerivative monodromy_with_derivative(const PrimitiveProfile& profile,
                                                     double lambda, double x0 = 0.0,
                                                     const IntegratorConfig& cfg = {}) {
    cfg.validate();
    double lambda_c = lambda - profile.mean_shift();
    // layout: (u_a, u1_a, u_b, u1_b, du_a, du1_a, du_b, du1_b)
    std::array<double, 8> y{1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
    long budget = cfg.max_steps;
    auto rhs = [lambda_c](double Q, const std::array<double, 8>& s, std::array<double, 8>& ds) {
        detail::quasi_rhs_columns<8>(Q, lambda_c, s, ds);
        ds[5] -= s[0]; // dA/dlambda couples -u into the u1 rows
        ds[7] -= s[2];
    };
    detail::integrate_split<8>(profile, y, x0, x0 + 1.0, cfg, budget, rhs);
    MonodromyDerivative out;
    out.M.m11 = y[0];
    out.M.m21 = y[1];
    out.M.m12 = y[2];
    out.M.m22 = y[3];
    out.M.lambda = lambda;
    out.M.base_point = x0;
    out.d11 = y[4];
    out.d21 = y[5];
    out.d12 = y[6];
    out.d22 = y[7];
    return out;
}

/// Floquet discriminant Delta(lambda) = tr M(lambda), base point 0.
inline double discriminant(const PrimitiveProfile& profile, double lambda,
                           const IntegratorConfig& cfg = {}) {
    return monodromy(profile, lambda, 0.0, cfg).trace();
}

/// Real Lagrange bracket [u, v]_x = u(x) v1(x) - u1(x) v(x); constant in x
/// for two solutions at the same real lambda.
inline double lagrange_bracket(const PropState& a, const PropState& b) {
    if (a.x != b.x) throw usage_error("lagrange_bracket: states at different positions");
    return a.u * b.u1 - a.u1 * b.u;
}

} // namespace hillband
