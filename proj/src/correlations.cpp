#include "biphoton/correlations.hpp"

#include <cmath>

#include <unsupported/Eigen/FFT>

#include "biphoton/parallel.hpp"

namespace biphoton {

void CoincidenceWindow::validate() const {
    if (!(half_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "window half-width must be positive");
    if (t_plus && !(t_plus->second > t_plus->first)) {
        throw Error(ErrorKind::InvalidArgument, "t+ acceptance range must have hi > lo");
    }
}

RealMatrix window_weights(const TimeGrid& grid, const CoincidenceWindow& w) {
    w.validate();
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double dt = grid.dt();
    const double tol = 1e-9 * dt;
    RealMatrix out = trapezoid_weights_2d(grid);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            bool keep = std::abs(static_cast<double>(i - j) * dt) <= w.half_width + tol;
            if (keep && w.t_plus) {
                const double tp = grid.t_min() + 0.5 * static_cast<double>(i + j) * dt;
                keep = tp >= w.t_plus->first - tol && tp <= w.t_plus->second + tol;
            }
            if (!keep) out(i, j) = 0.0;
        }
    }
    return out;
}

RealMatrix g2_density(const TermSum& s) { return total_amplitude(s).values().cwiseAbs2(); }

namespace {

double masked_rate(const TermSum& s, const RealMatrix& mask) {
    return mask.cwiseProduct(g2_density(s)).sum();
}

double masked_baseline(const TermSum& s, const RealMatrix& mask) {
    double acc = 0.0;
    for (const auto& term : s.terms) acc += mask.cwiseProduct(term.amp.values().cwiseAbs2()).sum();
    return acc;
}

RatePoint evaluate_masked(const JointAmplitude& a, const PipelineConfig& cfg, const RealMatrix& mask) {
    const TermSum s = run_pipeline(a, std::nullopt, cfg);
    return {masked_rate(s, mask), masked_baseline(s, mask)};
}

DipCurve run_scan(const JointAmplitude& a, std::span<const double> values, const CoincidenceWindow& w,
                  unsigned threads, const std::string& variable,
                  const std::function<PipelineConfig(double snapped)>& configure) {
    const RealMatrix mask = window_weights(a.grid(), w);
    DipCurve curve;
    curve.variable = variable;
    curve.requested.assign(values.begin(), values.end());
    curve.tau_values.resize(values.size());
    curve.rates.resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) curve.tau_values[k] = snap_delay(a.grid(), values[k]).snapped;
    parallel_for(values.size(), threads, [&](std::size_t k) {
        curve.rates[k] = evaluate_masked(a, configure(curve.tau_values[k]), mask).normalized();
    });
    return curve;
}

}  // namespace

double coincidence_rate(const TermSum& s, const CoincidenceWindow& w) {
    return masked_rate(s, window_weights(s.grid(), w));
}

double distinguishable_rate(const TermSum& s, const CoincidenceWindow& w) {
    return masked_baseline(s, window_weights(s.grid(), w));
}

TermSum run_pipeline(const JointAmplitude& a, std::optional<SupportBand> band, const PipelineConfig& cfg) {
    JointAmplitude delayed = a;
    try {
        delayed = delay_signal(a, cfg.tau1);
    } catch (const Error& e) {
        throw PipelineStageError(e, PipelineStage::Delay);
    }
    if (band) band = delay_band(*band, cfg.tau1);
    if (!cfg.splitter) {
        TermSum single;
        single.terms.push_back(Term{std::move(delayed), +1, 1, band});
        return single;
    }
    TermSum split = beam_splitter(delayed, band);
    if (cfg.delta == 0.0) return split;
    try {
        return compensate(split, cfg.delta);
    } catch (const Error& e) {
        throw PipelineStageError(e, PipelineStage::Compensate);
    }
}

RatePoint evaluate_point(const JointAmplitude& a, const PipelineConfig& cfg, const CoincidenceWindow& w) {
    return evaluate_masked(a, cfg, window_weights(a.grid(), w));
}

DipCurve dip_scan(const JointAmplitude& a, std::span<const double> taus, const CoincidenceWindow& w,
                  std::optional<Compensation> compensation, unsigned threads) {
    const TimeGrid grid = a.grid();
    return run_scan(a, taus, w, threads, "tau1", [&](double tau) {
        PipelineConfig cfg{tau, true, 0.0};
        if (compensation) cfg.delta = snap_delay(grid, compensation->delta_for(tau)).snapped;
        return cfg;
    });
}

DipCurve dip_scan(const BiphotonModel& model, const TimeGrid& grid, std::span<const double> taus,
                  const CoincidenceWindow& w, std::optional<Compensation> compensation, unsigned threads) {
    return dip_scan(build_biphoton(model, grid), taus, w, compensation, threads);
}

DipCurve compensation_scan(const JointAmplitude& a, double tau1, std::span<const double> deltas,
                           const CoincidenceWindow& w, unsigned threads) {
    const double tau = snap_delay(a.grid(), tau1).snapped;
    return run_scan(a, deltas, w, threads, "delta", [&](double delta) { return PipelineConfig{tau, true, delta}; });
}

DipCurve compensation_scan(const BiphotonModel& model, const TimeGrid& grid, double tau1,
                           std::span<const double> deltas, const CoincidenceWindow& w, unsigned threads) {
    return compensation_scan(build_biphoton(model, grid), tau1, deltas, w, threads);
}

std::vector<double> linspace(double lo, double hi, std::size_t steps) {
    if (steps < 2) throw Error(ErrorKind::InvalidArgument, "steps must be ≥ 2");
    std::vector<double> out(steps);
    const double h = (hi - lo) / static_cast<double>(steps - 1);
    for (std::size_t k = 0; k < steps; ++k) out[k] = lo + static_cast<double>(k) * h;
    out.back() = hi;
    return out;
}

ReducedState g1_reduced(const JointAmplitude& a) {
    const auto& g = a.grid();
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::VectorXd w(n);
    for (Eigen::Index k = 0; k < n; ++k) w(k) = g.trapezoid_weight(static_cast<std::size_t>(k)) * g.dt();

    ReducedState out;
    out.rho = a.values() * w.asDiagonal() * a.values().adjoint();
    out.diagonal = out.rho.diagonal().real();
    out.trace = w.dot(out.diagonal);
    return out;
}

MarginalReport g1_vs_integrated_g2(const JointAmplitude& a, double weight_scale) {
    if (!(weight_scale >= 0.0)) throw Error(ErrorKind::InvalidArgument, "weight_scale must be non-negative");
    const auto& g = a.grid();
    const std::size_t n = g.size();
    const double dt = g.dt();

    // Spectrum of photon 2 for each t1: X(t1, ω_k) = Σ_j A(t1, t2_j) e^{+iω_k t2_j}.
    Eigen::FFT<double> fft;
    RealMatrix power(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<Complex> row(n), spec(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row[j] = a(i, j);
        fft.inv(spec, row);
        for (std::size_t k = 0; k < n; ++k) {
            power(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                std::norm(spec[k]) * static_cast<double>(n) * dt;  // Parseval: Σ_k power = ∫|A|² dt2
        }
    }
    std::vector<double> omega(n);
    for (std::size_t k = 0; k < n; ++k) {
        const long signed_k = k < (n + 1) / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
        omega[k] = 2.0 * M_PI * static_cast<double>(signed_k) / (static_cast<double>(n) * dt);
    }

    Eigen::VectorXd row_w(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) row_w(static_cast<Eigen::Index>(i)) = g.trapezoid_weight(i) * dt;
    const Eigen::VectorXd spectrum = power.transpose() * row_w;  // photon-2 power per bin
    const double total = spectrum.sum();
    if (!(total > 0.0)) throw Error(ErrorKind::ZeroAmplitude, "amplitude is identically zero");

    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += omega[k] * spectrum(static_cast<Eigen::Index>(k));
    mean /= total;
    double var = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        var += (omega[k] - mean) * (omega[k] - mean) * spectrum(static_cast<Eigen::Index>(k));
    }
    var /= total;

    Eigen::VectorXd weight = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    if (weight_scale > 0.0) {
        if (!(mean > 0.0)) {
            throw Error(ErrorKind::NegativeWeight, "photon-2 mean frequency is not positive; frequency weight undefined");
        }
        const double peak = spectrum.maxCoeff();
        for (std::size_t k = 0; k < n; ++k) {
            const double wk = 1.0 + weight_scale * (omega[k] - mean) / mean;
            if (wk < 0.0 && spectrum(static_cast<Eigen::Index>(k)) >= 1e-10 * peak) {
                throw Error(ErrorKind::NegativeWeight,
                            "frequency weight is negative at omega = " + std::to_string(omega[k]) +
                                " inside the occupied band");
            }
            weight(static_cast<Eigen::Index>(k)) = wk;
        }
    }

    const Eigen::VectorXd plain = power * Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    const Eigen::VectorXd weighted = power * weight;
    const double plain_norm = row_w.dot(plain);
    const double weighted_norm = row_w.dot(weighted);

    MarginalReport out{Field1D(g), Field1D(g), 0.0, mean, mean != 0.0 ? std::sqrt(var) / std::abs(mean) : 0.0};
    out.unweighted.values = (plain / plain_norm).cast<Complex>();
    out.weighted.values = (weighted / weighted_norm).cast<Complex>();
    const Eigen::VectorXd diff = (plain / plain_norm) - (weighted / weighted_norm);
    out.l2_discrepancy = std::sqrt(row_w.dot(diff.cwiseAbs2()));
    return out;
}

}  // namespace biphoton
