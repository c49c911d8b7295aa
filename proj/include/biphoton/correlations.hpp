#pragma once

// Coincidence (G2) quantities, HOM dip scans, and the single-photon (G1)
// reduced state with its frequency-weighted counterpart.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/optics.hpp"
#include "biphoton/source.hpp"

namespace biphoton {

/// Accepts |t1 - t2| <= half_width, optionally gated on t+ = (t1 + t2)/2.
struct CoincidenceWindow {
    double half_width = 4.0;
    std::optional<std::pair<double, double>> t_plus;

    void validate() const;
};

/// Trapezoid weights (dt² included) masked by the window.
RealMatrix window_weights(const TimeGrid& grid, const CoincidenceWindow& w);

/// |total_amplitude(s)|² pointwise.
RealMatrix g2_density(const TermSum& s);

double coincidence_rate(const TermSum& s, const CoincidenceWindow& w);

/// Rate with the cross terms dropped: Σ ∬_W |term_i|². Equal to the rate at
/// any delay where the terms are disjoint, and used as the normalization.
double distinguishable_rate(const TermSum& s, const CoincidenceWindow& w);

struct DipCurve {
    std::string variable = "tau1";
    std::vector<double> requested;
    std::vector<double> tau_values;  // grid-snapped
    std::vector<double> rates;       // R / R_baseline
};

/// Compensation applied at each scan point: a fixed delta, or delta that
/// tracks the scanned delay (delta = tau1 + offset).
struct Compensation {
    enum class Mode { Fixed, Track };
    Mode mode = Mode::Fixed;
    double value = 0.0;

    double delta_for(double tau1) const { return mode == Mode::Fixed ? value : tau1 + value; }
};

enum class PipelineStage { Delay, Compensate };

/// Error raised by one stage of the delay / splitter / compensator chain.
class PipelineStageError : public Error {
public:
    PipelineStageError(const Error& cause, PipelineStage stage)
        : Error(cause.kind(), cause.what()), stage_(stage) {}
    PipelineStage stage() const noexcept { return stage_; }

private:
    PipelineStage stage_;
};

struct PipelineConfig {
    double tau1 = 0.0;
    bool splitter = true;
    double delta = 0.0;
};

struct RatePoint {
    double rate = 0.0;
    double baseline = 0.0;
    double normalized() const { return baseline > 0.0 ? rate / baseline : 0.0; }
};

/// Runs one delay -> splitter -> compensator chain on a built amplitude.
/// Delays must already be grid multiples.
RatePoint evaluate_point(const JointAmplitude& a, const PipelineConfig& cfg, const CoincidenceWindow& w);

/// Builds the terms of the chain without integrating them.
TermSum run_pipeline(const JointAmplitude& a, std::optional<SupportBand> band, const PipelineConfig& cfg);

/// Normalized coincidence rate versus signal delay. Delays are snapped to
/// the grid; scan points are independent and may run on `threads` workers.
DipCurve dip_scan(const BiphotonModel& model, const TimeGrid& grid, std::span<const double> taus,
                  const CoincidenceWindow& w, std::optional<Compensation> compensation = std::nullopt,
                  unsigned threads = 1);

/// Same scan over a prebuilt amplitude.
DipCurve dip_scan(const JointAmplitude& a, std::span<const double> taus, const CoincidenceWindow& w,
                  std::optional<Compensation> compensation = std::nullopt, unsigned threads = 1);

/// Normalized rate versus compensation delta at a fixed signal delay.
DipCurve compensation_scan(const BiphotonModel& model, const TimeGrid& grid, double tau1,
                           std::span<const double> deltas, const CoincidenceWindow& w, unsigned threads = 1);

DipCurve compensation_scan(const JointAmplitude& a, double tau1, std::span<const double> deltas,
                           const CoincidenceWindow& w, unsigned threads = 1);

/// Evenly spaced values lo..hi inclusive; steps >= 2.
std::vector<double> linspace(double lo, double hi, std::size_t steps);

struct ReducedState {
    ComplexMatrix rho;        // rho1(t_i, t_k) = ∫ A(t_i, t2) A*(t_k, t2) dt2
    Eigen::VectorXd diagonal;  // G1(t_i)
    double trace = 0.0;
};

ReducedState g1_reduced(const JointAmplitude& a);

struct MarginalReport {
    Field1D unweighted;
    Field1D weighted;
    double l2_discrepancy = 0.0;
    double mean_frequency = 0.0;      // photon 2
    double relative_bandwidth = 0.0;  // rms width / mean, photon 2
};

/// Marginal of photon 1 with photon 2 traced out plainly, versus weighted
/// by (1 + weight_scale (ω - ω̄)/ω̄) over photon 2's spectrum. Both are
/// L¹-normalized. Throws NegativeWeight if the weight is negative anywhere
/// the spectrum is occupied.
MarginalReport g1_vs_integrated_g2(const JointAmplitude& a, double weight_scale);

}  // namespace biphoton
