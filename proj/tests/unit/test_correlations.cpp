#include <doctest.h>

#include <cmath>

#include "biphoton/correlations.hpp"
#include "support.hpp"

using namespace biphoton;

namespace {

double triangle_dip(double tau, double t0 = 1.0) {
    if (tau < 0.0 || tau > t0) return 1.0;
    return 1.0 - 2.0 * std::min(tau, t0 - tau) / t0;
}

// Brute-force double quadrature of the coincidence rate straight from the
// model function: |A(t1 + tau, t2) - A(t2 + tau, t1)|² / 2 summed over the
// lattice, normalized by the same sum without the cross term.
double brute_force_dip(const BiphotonModel& m, const TimeGrid& g, double tau) {
    const auto& u = std::get<Factored>(m.form).u;
    const double tol = 1e-9 * g.dt();
    auto amp = [&](double t1, double t2) {
        const double tp = 0.5 * (t1 + t2);
        const Complex v = m.pump.value(tp);
        return std::abs(v) < kPumpCutoff ? Complex(0.0) : v * u.value(t1 - t2, tol);
    };
    double rate = 0.0, base = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double t1 = g.time(i), t2 = g.time(j);
            const Complex a = amp(t1 + tau, t2), b = amp(t2 + tau, t1);
            rate += 0.5 * std::norm(a - b);
            base += 0.5 * (std::norm(a) + std::norm(b));
        }
    }
    return rate / base;
}

// R(tau) = 1 - ∫u(x + tau)u(tau - x)dx / ∫u² by fine 1D quadrature.
double kernel_dip(const KernelSpec& u, double tau) {
    const int n = 200000;
    const double lo = -2.0 * u.t0, hi = 2.0 * u.t0, h = (hi - lo) / n;
    double cross = 0.0, norm = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = lo + (k + 0.5) * h;
        cross += u.value(x + tau) * u.value(tau - x);
        norm += u.value(x) * u.value(x);
    }
    return 1.0 - cross / norm;
}

}  // namespace

TEST_CASE("coincidence rate at the closed-form points") {
    const auto m = testing::rect_model(25.0);
    const auto g = fit_grid(m, 512, {-0.5, 1.5}, {});
    const auto a = build_biphoton(m, g);
    const CoincidenceWindow w{4.0, std::nullopt};
    const double tol = 2.0 / 512;

    auto rbar = [&](double tau) { return evaluate_point(a, {snap_delay(g, tau).snapped, true, 0.0}, w).normalized(); };
    CHECK(rbar(0.5) <= tol);
    CHECK(std::abs(rbar(0.25) - triangle_dip(snap_delay(g, 0.25).snapped)) <= tol);
    // tau1 = 0 shares the t- = 0 diagonal between the terms: 2/n, not exact.
    CHECK(std::abs(rbar(0.0) - 1.0) < tol);
    CHECK(std::abs(rbar(1.0) - 1.0) < tol);
    CHECK(std::abs(rbar(1.5) - 1.0) < 1e-12);
    CHECK(std::abs(rbar(-0.25) - 1.0) < 1e-12);

    const auto p = evaluate_point(a, {1.5, true, 0.0}, w);
    CHECK(std::abs(p.rate - p.baseline) < 1e-12);
}

TEST_CASE("dip scan against brute-force quadrature") {
    const auto m = testing::rect_model(25.0);
    const auto g = fit_grid(m, 128, {-0.5, 1.5}, {});
    const auto taus = linspace(-0.5, 1.5, 17);
    const auto curve = dip_scan(m, g, taus, CoincidenceWindow{});
    REQUIRE(curve.rates.size() == 17);
    for (std::size_t k = 0; k < 17; ++k) {
        CHECK(curve.rates[k] == doctest::Approx(brute_force_dip(m, g, curve.tau_values[k])).epsilon(1e-10));
    }
}

TEST_CASE("triangle kernel dip matches the kernel autocorrelation") {
    const auto m = testing::rect_model(25.0, 1.0, KernelShape::Triangle);
    const auto g = fit_grid(m, 384, {-0.5, 1.5}, {});
    const auto taus = linspace(-0.25, 1.25, 13);
    const auto curve = dip_scan(m, g, taus, CoincidenceWindow{});
    const auto& u = std::get<Factored>(m.form).u;
    for (std::size_t k = 0; k < curve.rates.size(); ++k) {
        CHECK(std::abs(curve.rates[k] - kernel_dip(u, curve.tau_values[k])) < 1e-3);
    }
}

TEST_CASE("dip scan bookkeeping") {
    const auto m = testing::rect_model(25.0);
    const auto g = fit_grid(m, 256, {-0.5, 1.5}, {});
    const auto taus = linspace(-0.5, 1.5, 41);
    const auto one = dip_scan(m, g, taus, CoincidenceWindow{}, std::nullopt, 1);
    const auto many = dip_scan(m, g, taus, CoincidenceWindow{}, std::nullopt, 4);
    CHECK(one.rates == many.rates);
    CHECK(one.requested == taus);
    for (std::size_t k = 0; k < taus.size(); ++k) {
        CHECK(std::abs(one.tau_values[k] - taus[k]) <= 0.5 * g.dt() + 1e-12);
    }
    CHECK_THROWS_AS(linspace(0.0, 1.0, 1), Error);
}

TEST_CASE("compensation scan recovers the dip at tau1 - t0/2") {
    const auto m = testing::rect_model(25.0);
    const auto deltas = linspace(0.5, 2.5, 81);
    const auto g = fit_grid(m, 384, {1.5, 1.5}, {0.5, 2.5});
    const auto curve = compensation_scan(m, g, 1.5, deltas, CoincidenceWindow{});
    CHECK(curve.variable == "delta");
    const auto it = std::min_element(curve.rates.begin(), curve.rates.end());
    const double at = curve.tau_values[static_cast<std::size_t>(it - curve.rates.begin())];
    CHECK(*it <= 0.01);
    CHECK(std::abs(at - 1.0) <= 2.0 / 80);
    // Interference only for tau1 - t0 < delta < tau1.
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        const double d = curve.tau_values[k];
        if (d < 0.5 - 1e-9 || d > 1.5 + 1e-9) CHECK(std::abs(curve.rates[k] - 1.0) < 1e-12);
        if (std::abs(d - 0.5) < 1e-9 || std::abs(d - 1.5) < 1e-9) CHECK(std::abs(curve.rates[k] - 1.0) < 2.0 / 384);
    }
}

TEST_CASE("g2 density") {
    const auto m = testing::rect_model(25.0);
    const auto g = fit_grid(m, 128, {0.0, 1.5}, {});
    const auto a = build_biphoton(m, g);

    TermSum zero;
    zero.terms.push_back({JointAmplitude(g), +1, 1, std::nullopt});
    CHECK(g2_density(zero).maxCoeff() == 0.0);

    TermSum one;
    one.terms.push_back({a, +1, 1, std::nullopt});
    CHECK(std::abs(integrate_2d(g, g2_density(one)) - 1.0) < 1e-12);

    const auto s = beam_splitter(delay_signal(a, snap_delay(g, 1.5).snapped));
    const RealMatrix sep = s.terms[0].amp.values().cwiseAbs2() + s.terms[1].amp.values().cwiseAbs2();
    CHECK((g2_density(s) - sep).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("window validation and masking") {
    CHECK_THROWS_AS((CoincidenceWindow{0.0, std::nullopt}.validate()), Error);
    CHECK_THROWS_AS((CoincidenceWindow{1.0, std::make_pair(1.0, 0.0)}.validate()), Error);
    const TimeGrid g(11, 0.0, 1.0);
    const auto w = window_weights(g, CoincidenceWindow{0.2, std::nullopt});
    CHECK(w(0, 2) > 0.0);
    CHECK(w(0, 3) == 0.0);
    const auto all = window_weights(g, CoincidenceWindow{});
    CHECK((all - trapezoid_weights_2d(g)).cwiseAbs().maxCoeff() == 0.0);
}

namespace {

JointAmplitude chirped(double carrier) {
    const TimeGrid g(256, -6.0, 6.0);
    JointAmplitude a(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double t1 = g.time(i), t2 = g.time(j);
            a.values()(i, j) = std::exp(-0.5 * (t1 * t1 + t2 * t2)) *
                               std::exp(Complex(0.0, -(t1 * t2 + carrier * t2)));
        }
    }
    return a.normalized();
}

}  // namespace

TEST_CASE("reduced state") {
    const TimeGrid g(64, -3.0, 3.0);
    ComplexVector f(64), h(64);
    for (int k = 0; k < 64; ++k) {
        const double t = g.time(k);
        f(k) = std::exp(-t * t) * Complex(std::cos(t), std::sin(2 * t));
        h(k) = std::exp(-0.5 * (t - 0.5) * (t - 0.5));
    }
    const auto a = JointAmplitude(g, f * h.transpose()).normalized();
    const auto r = g1_reduced(a);
    CHECK(std::abs(r.trace - 1.0) < 1e-12);

    // Separable: rho1 = f f^dagger, up to the normalization of f.
    const double nh = Field1D(g, h).norm_squared();
    const double scale = 1.0 / (Field1D(g, f).norm_squared() * nh);
    const ComplexMatrix expected = f * f.adjoint() * (scale * nh);
    CHECK((r.rho - expected).cwiseAbs().maxCoeff() < 1e-12);

    const auto b = chirped(3.0);
    const auto rb = g1_reduced(b);
    for (std::size_t i = 0; i < b.size(); ++i) {
        double marginal = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) marginal += std::norm(b(i, j)) * b.grid().trapezoid_weight(j);
        marginal *= b.grid().dt();
        CHECK(std::abs(rb.diagonal(static_cast<Eigen::Index>(i)) - marginal) < 1e-12);
    }
}

TEST_CASE("G1 versus frequency-weighted G2 marginals") {
    const auto narrow = testing::tracked_spectrum(20.0, 0.011, 0.02);
    const auto broad = testing::tracked_spectrum(2.0, 0.69, 0.2);

    CHECK(g1_vs_integrated_g2(narrow, 0.0).l2_discrepancy == 0.0);
    CHECK(g1_vs_integrated_g2(broad, 0.0).l2_discrepancy == 0.0);

    const auto rn = g1_vs_integrated_g2(narrow, 1.0);
    const auto rb = g1_vs_integrated_g2(broad, 1.0);
    MESSAGE("narrow: bw " << rn.relative_bandwidth << " d " << rn.l2_discrepancy);
    MESSAGE("broad: bw " << rb.relative_bandwidth << " d " << rb.l2_discrepancy);
    CHECK(rn.mean_frequency == doctest::Approx(20.0).epsilon(1e-2));
    CHECK(rn.relative_bandwidth == doctest::Approx(0.01).epsilon(0.1));
    CHECK(rb.relative_bandwidth == doctest::Approx(0.5).epsilon(0.1));
    CHECK(rn.l2_discrepancy < 0.02);
    CHECK(rb.l2_discrepancy > rn.l2_discrepancy);

    // A product amplitude has no time-frequency correlation: no discrepancy.
    const TimeGrid g(256, -6.0, 6.0);
    ComplexVector f(256);
    for (int k = 0; k < 256; ++k) f(k) = std::exp(-0.5 * g.time(k) * g.time(k));
    ComplexVector h = f;
    for (int k = 0; k < 256; ++k) h(k) *= std::exp(Complex(0.0, -5.0 * g.time(k)));
    const auto sep = JointAmplitude(g, f * h.transpose()).normalized();
    CHECK(g1_vs_integrated_g2(sep, 1.0).l2_discrepancy < 1e-10);
}

TEST_CASE("negative weights are rejected") {
    const auto broad = chirped(2.0);
    try {
        g1_vs_integrated_g2(broad, 10.0);
        FAIL("expected NegativeWeight");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NegativeWeight);
    }
}

TEST_CASE("dip scan is independent of the pump carrier") {
    auto m0 = testing::rect_model(25.0);
    auto m10 = m0;
    m10.pump.omega_p = 10.0;
    const auto g = fit_grid(m0, 256, {-0.5, 1.5}, {});
    const auto taus = linspace(-0.5, 1.5, 41);
    const auto c0 = dip_scan(m0, g, taus, CoincidenceWindow{});
    const auto c10 = dip_scan(m10, g, taus, CoincidenceWindow{});
    for (std::size_t k = 0; k < taus.size(); ++k) CHECK(std::abs(c0.rates[k] - c10.rates[k]) < 1e-12);
}

TEST_CASE("rate equals term norms plus the cross term") {
    const auto m = testing::rect_model(25.0);
    const auto g = fit_grid(m, 256, {0.0, 1.0}, {});
    const auto a = build_biphoton(m, g);
    const CoincidenceWindow w{0.3, std::nullopt};
    const auto s = beam_splitter(delay_signal(a, snap_delay(g, 0.3).snapped));
    const RealMatrix mask = window_weights(g, w);
    const ComplexMatrix p = s.terms[0].signed_amplitude().values();
    const ComplexMatrix q = s.terms[1].signed_amplitude().values();
    const double n1 = mask.cwiseProduct(p.cwiseAbs2()).sum();
    const double n2 = mask.cwiseProduct(q.cwiseAbs2()).sum();
    const double cross = mask.cast<Complex>().cwiseProduct(p.conjugate().cwiseProduct(q)).sum().real();
    const double rate = coincidence_rate(s, w);
    CHECK(std::abs(rate - (n1 + n2 + 2.0 * cross)) <= 1e-10 * rate);
    CHECK(std::abs(distinguishable_rate(s, w) - (n1 + n2)) <= 1e-12 * (n1 + n2));
}

TEST_CASE("rho1 is Hermitian and positive semidefinite") {
    const auto m = testing::rect_model(25.0);
    const auto g = fit_grid(m, 128, {}, {});
    const auto r = g1_reduced(build_biphoton(m, g));
    CHECK((r.rho - r.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r.rho);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK(std::abs(r.trace - 1.0) < 1e-9);
}
