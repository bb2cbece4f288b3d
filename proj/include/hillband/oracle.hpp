#pragma once

// Cross-validation routes that do not touch the ODE engine:
//   * closed-form Kronig-Penney transfer matrix and discriminant for the
//     delta comb  q = alpha * sum_n delta(x - n);
//   * a Fourier-Galerkin matrix eigensolver for the periodic/semiperiodic
//     problems on [0,1].
// Everything here is used by tests and the CLI `verify` subcommand to pin
// down expected values independently of the propagator.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "hillband/parity.hpp"
#include "hillband/potential.hpp"

namespace hillband::oracle {

/// cos(sqrt(lambda)) continued through lambda <= 0 (cosh branch).
inline double cos_sqrt(double lambda) {
    if (lambda > 1e-12) return std::cos(std::sqrt(lambda));
    if (lambda < -1e-12) return std::cosh(std::sqrt(-lambda));
    return 1.0 - lambda / 2.0 + lambda * lambda / 24.0;
}

/// sin(sqrt(lambda))/sqrt(lambda), entire in lambda; sinh branch for
/// lambda < 0, series near 0.
inline double sinc_sqrt(double lambda) {
    if (lambda > 1e-6) {
        double s = std::sqrt(lambda);
        return std::sin(s) / s;
    }
    if (lambda < -1e-6) {
        double t = std::sqrt(-lambda);
        return std::sinh(t) / t;
    }
    return 1.0 - lambda / 6.0 + lambda * lambda / 120.0 - lambda * lambda * lambda / 5040.0;
}

struct TransferMatrix {
    double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;
    double trace() const { return m11 + m22; }
    double det() const { return m11 * m22 - m12 * m21; }
};

/// Free monodromy [[cos s, sin s / s], [-s sin s, cos s]], s = sqrt(lambda),
/// valid for all real lambda through the entire-function forms.
inline TransferMatrix free_monodromy(double lambda) {
    double c = cos_sqrt(lambda);
    double sn = sinc_sqrt(lambda);
    return {c, sn, -lambda * sn, c};
}

/// Classical delta-comb transfer over one period in (u, u') coordinates:
/// free propagation F followed by the jump J = [[1,0],[alpha,1]].
inline TransferMatrix kp_transfer(double alpha, double lambda) {
    TransferMatrix F = free_monodromy(lambda);
    return {F.m11, F.m12, alpha * F.m11 + F.m21, alpha * F.m12 + F.m22};
}

/// The same period map in quasi-derivative coordinates (u, u' - Qu) with
/// the sawtooth primitive and base point on the jump: G F G with
/// G = [[1,0],[alpha/2,1]]. Similar to kp_transfer (equal trace and det)
/// but not entrywise equal; this is what the engine's monodromy matches.
inline TransferMatrix kp_transfer_quasi(double alpha, double lambda) {
    TransferMatrix F = free_monodromy(lambda);
    double g = 0.5 * alpha;
    double a21 = g * F.m11 + F.m21;
    double a22 = g * F.m12 + F.m22;
    return {F.m11 + g * F.m12, F.m12, a21 + g * a22, a22};
}

/// Discriminant 2 cos s + alpha sin s / s (cosh/sinh for lambda < 0,
/// value 2 + alpha at lambda = 0).
inline double kp_discriminant(double alpha, double lambda) {
    return 2.0 * cos_sqrt(lambda) + alpha * sinc_sqrt(lambda);
}

/// Periodic/semiperiodic eigenproblem discretized in the Fourier basis
/// e^{2 pi i m x} resp. e^{i pi (2m+1) x}. `size` is rounded to the largest
/// symmetric basis not exceeding it (odd for periodic, even for
/// semiperiodic) so that growing sizes give nested trial spaces.
struct GalerkinProblem {
    FourierPotential potential;
    Parity parity = Parity::periodic;
    int size = 256;

    // sizes below 8 are fine for hand-checked cases; oracle-grade accuracy
    // wants >= 8 (use the 256 default for cross-validation)
    int actual_size() const {
        if (size < 2) throw format_error("Galerkin basis needs size >= 2");
        return (parity == Parity::periodic) ? (size % 2 ? size : size - 1)
                                            : (size % 2 ? size - 1 : size);
    }
};

/// Dense Hermitian matrix: diagonal = squared frequency + mean, entry
/// (j,l) = qhat(2(m_j - m_l)) otherwise.
inline Eigen::MatrixXcd galerkin_matrix(const GalerkinProblem& gp) {
    int n = gp.actual_size();
    int M = n / 2; // periodic: m in [-M, M]; semiperiodic: m in [-M, M-1]
    auto freq = [&](int j) {
        int m = j - M;
        return (gp.parity == Parity::periodic) ? two_pi * m : std::numbers::pi * (2 * m + 1);
    };
    Eigen::MatrixXcd H(n, n);
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
            if (j == l) {
                double w = freq(j);
                H(j, l) = complexd{w * w + gp.potential.mean(), 0.0};
            } else {
                H(j, l) = gp.potential.coefficient(j - l);
            }
        }
    }
    return H;
}

/// Lowest `count` eigenvalues, ascending.
inline std::vector<double> galerkin_eigenvalues(const GalerkinProblem& gp, int count) {
    Eigen::MatrixXcd H = galerkin_matrix(gp);
    if (count < 1 || count > H.rows())
        throw format_error("eigenvalue count out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw integration_error("Galerkin eigensolve did not converge");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return out;
}

} // namespace hillband::oracle
