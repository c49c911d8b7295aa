#pragma once

// Delay line, 50:50 beam splitter and postponed-compensation delays acting
// on biphoton amplitudes.
//
// Sign convention: a signal delay tau1 maps A(t1, t2) to A(t1 + tau1, t2),
// i.e. the kernel argument V_s(t1 - t + tau1). A compensator delta acts on
// the signal coordinate of each term with the opposite sign, so the
// effective delay after compensation is tau1 - delta.

#include <optional>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/source.hpp"

namespace biphoton {

/// Support interval of an amplitude in t- = t1 - t2.
struct SupportBand {
    double lo;
    double hi;

    double length() const noexcept { return hi - lo; }
    bool operator==(const SupportBand&) const = default;
};

/// Open-interval intersection; nullopt when empty or a single point.
std::optional<SupportBand> intersect(const SupportBand& a, const SupportBand& b);

struct Term {
    JointAmplitude amp;
    int sign = +1;
    int signal_axis = 1;
    std::optional<SupportBand> band;

    JointAmplitude signed_amplitude() const { return amp * static_cast<double>(sign); }
};

struct TermSum {
    std::vector<Term> terms;

    const TimeGrid& grid() const;
};

/// A(t1, t2) -> A(t1 + tau1, t2). Throws NonCommensurateDelay or
/// SupportClipped.
JointAmplitude delay_signal(const JointAmplitude& a, double tau1);
SupportBand delay_band(const SupportBand& band, double tau1);

/// Antisymmetric two-term output of the splitter, 1/sqrt(2) folded into
/// each term: (+, a, signal axis 1) and (-, swap(a), signal axis 2).
TermSum beam_splitter(const JointAmplitude& a, std::optional<SupportBand> band = std::nullopt);

/// Always throws PipelineError: a pipeline holds a single splitter.
[[noreturn]] TermSum beam_splitter(const TermSum& already_split);

/// Shifts each term by delta along its signal axis.
TermSum compensate(const TermSum& s, double delta);

JointAmplitude total_amplitude(const TermSum& s);

/// Closed interval of delays, always widened to contain 0.
struct DelayRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// Grid of n samples with dt = t0/m that contains the model's support
/// through every delay in `taus` and every compensation in `deltas`.
/// Throws GridTooSmall if fewer than 4 samples would span t0.
TimeGrid fit_grid(const BiphotonModel& model, std::size_t n, DelayRange taus, DelayRange deltas = {});

}  // namespace biphoton
