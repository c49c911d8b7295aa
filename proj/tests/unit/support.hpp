#pragma once

#include <cmath>
#include <random>

#include "biphoton/source.hpp"

namespace testing {

inline biphoton::BiphotonModel rect_model(double sigma_p = 25.0, double t0 = 1.0,
                                          biphoton::KernelShape shape = biphoton::KernelShape::Rect) {
    biphoton::BiphotonModel m;
    m.pump = biphoton::PumpSpec{sigma_p, 0.0, 1.0};
    biphoton::KernelSpec k;
    k.shape = shape;
    k.t0 = t0;
    m.form = biphoton::Factored{k};
    return m;
}

inline biphoton::ComplexMatrix random_matrix(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    biphoton::ComplexMatrix m(n, n);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = {nd(rng), nd(rng)};
    }
    return m;
}

// Random unitary from the QR factorization of a Gaussian matrix.
inline biphoton::ComplexMatrix random_unitary(std::size_t n, unsigned seed) {
    Eigen::HouseholderQR<biphoton::ComplexMatrix> qr(random_matrix(n, seed));
    return qr.householderQ() * biphoton::ComplexMatrix::Identity(n, n);
}

// Photon-2 spectrum for time t1: a cos² bump of half-width h·ω̄ centred at
// ω̄ (1 + a tanh(t1)), summed on the FFT lattice of the grid. The centre
// tracks t1, so photon 2's frequency is correlated with photon 1's time, and
// the bump never reaches ω <= 0 when a + h < 1.
inline biphoton::JointAmplitude tracked_spectrum(double omega_bar, double a, double h) {
    const biphoton::TimeGrid g(640, -40.0, 40.0 - 80.0 / 640);
    const std::size_t n = g.size();
    const double dw = 2.0 * M_PI / (static_cast<double>(n) * g.dt());
    biphoton::JointAmplitude out(g);
    for (std::size_t i = 0; i < n; ++i) {
        const double t1 = g.time(i);
        const double c = omega_bar * (1.0 + a * std::tanh(t1));
        const double half = h * omega_bar;
        const double env = std::exp(-t1 * t1 / 8.0);
        for (long k = static_cast<long>(std::ceil((c - half) / dw)); k * dw < c + half; ++k) {
            const double w = k * dw;
            const double x = std::cos(0.5 * M_PI * (w - c) / half);
            for (std::size_t j = 0; j < n; ++j) {
                out.values()(i, j) += env * x * x * std::exp(biphoton::Complex(0.0, -w * g.time(j)));
            }
        }
    }
    return out.normalized();
}

}  // namespace testing
