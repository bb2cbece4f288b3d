#pragma once

// Adaptive Dormand-Prince 5(4) embedded pair on fixed-size state vectors.
// Coefficients from Dormand & Prince (1980); FSAL form, standard error
// controller with order-1/5 step adaptation.

#include <array>
#include <cmath>
#include <cstddef>

#include "hillband/errors.hpp"

namespace hillband {

/// Tolerances and limits for one-period propagation.
struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 1'000'000;
    bool breakpoint_splitting = true;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw format_error("integrator tolerances must be positive");
        if (max_steps < 1) throw format_error("max_steps must be >= 1");
    }

    IntegratorConfig tightened(double factor) const {
        IntegratorConfig c = *this;
        c.rel_tol *= factor;
        c.abs_tol *= factor;
        return c;
    }
};

namespace rk45 {

// Butcher tableau
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// difference between the 5th and the embedded 4th order weights
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

template <std::size_t N>
bool finite(const std::array<double, N>& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Integrate y' = f(x, y) from x0 to x1 (x1 >= x0). `steps_left` is a
/// shared budget so that split integrations respect one global limit.
/// Throws blowup_error on non-finite state, integration_error when the
/// budget is exhausted or the step size underflows.
template <std::size_t N, class RHS>
void integrate(RHS&& f, std::array<double, N>& y, double x0, double x1,
               const IntegratorConfig& cfg, long& steps_left) {
    using Vec = std::array<double, N>;
    if (!(x1 >= x0)) throw usage_error("rk45: backward integration not supported");
    if (x1 == x0) return;

    double x = x0;
    Vec k1;
    f(x, y, k1);

    // initial step from the ratio of state and derivative scales
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
        d0 = std::max(d0, std::abs(y[i]) / sc);
        d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    double h = (d1 > 0.0) ? 0.01 * d0 / d1 : 1e-3;
    h = std::min(std::max(h, 1e-8), x1 - x0);

    Vec k2, k3, k4, k5, k6, k7, ytmp, ynew;
    while (x < x1) {
        if (--steps_left < 0) throw integration_error("rk45: step limit exceeded");
        if (x + h >= x1) h = x1 - x;
        if (!(h > std::abs(x) * 1e-14 + 1e-300))
            throw integration_error("rk45: step size underflow");

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        f(x + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(x + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(x + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(x + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        f(x + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(x + h, ynew, k7);

        if (!finite(ynew) || !finite(k7)) throw blowup_error("rk45: solution not finite");

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                             e7 * k7[i]);
            double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / static_cast<double>(N));

        double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        factor = std::min(5.0, std::max(0.2, factor));
        if (err <= 1.0) {
            x += h;
            y = ynew;
            k1 = k7; // FSAL
            h *= factor;
        } else {
            h *= std::min(factor, 1.0); // k1 is still the slope at (x, y)
        }
    }
}

} // namespace rk45
} // namespace hillband
