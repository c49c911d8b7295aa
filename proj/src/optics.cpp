#include "biphoton/optics.hpp"

#include <algorithm>
#include <cmath>

namespace biphoton {

std::optional<SupportBand> intersect(const SupportBand& a, const SupportBand& b) {
    const double lo = std::max(a.lo, b.lo);
    const double hi = std::min(a.hi, b.hi);
    if (!(hi > lo)) return std::nullopt;
    return SupportBand{lo, hi};
}

const TimeGrid& TermSum::grid() const {
    if (terms.empty()) throw Error(ErrorKind::InvalidArgument, "empty term sum has no grid");
    return terms.front().amp.grid();
}

JointAmplitude delay_signal(const JointAmplitude& a, double tau1) {
    const long steps = commensurate_steps(a.grid(), tau1);
    if (shift_clips(a, 1, steps)) {
        throw Error(ErrorKind::SupportClipped,
                    "signal delay " + std::to_string(tau1) + " pushes nonzero amplitude off the grid");
    }
    return shift_axis(a, 1, tau1);
}

SupportBand delay_band(const SupportBand& band, double tau1) { return {band.lo - tau1, band.hi - tau1}; }

TermSum beam_splitter(const JointAmplitude& a, std::optional<SupportBand> band) {
    const double r = 1.0 / std::sqrt(2.0);
    TermSum out;
    out.terms.push_back(Term{a * r, +1, 1, band});
    std::optional<SupportBand> mirrored;
    if (band) mirrored = SupportBand{-band->hi, -band->lo};
    out.terms.push_back(Term{swap_axes(a) * r, -1, 2, mirrored});
    return out;
}

TermSum beam_splitter(const TermSum&) {
    throw Error(ErrorKind::PipelineError, "the pipeline already contains a beam splitter");
}

TermSum compensate(const TermSum& s, double delta) {
    TermSum out;
    out.terms.reserve(s.terms.size());
    for (const auto& term : s.terms) {
        const long steps = commensurate_steps(term.amp.grid(), -delta);
        if (shift_clips(term.amp, term.signal_axis, steps)) {
            throw Error(ErrorKind::SupportClipped,
                        "compensation " + std::to_string(delta) + " pushes nonzero amplitude off the grid");
        }
        Term shifted{shift_axis(term.amp, term.signal_axis, -delta), term.sign, term.signal_axis, term.band};
        if (term.band) {
            const double d = term.signal_axis == 1 ? delta : -delta;
            shifted.band = SupportBand{term.band->lo + d, term.band->hi + d};
        }
        out.terms.push_back(std::move(shifted));
    }
    return out;
}

JointAmplitude total_amplitude(const TermSum& s) {
    JointAmplitude total(s.grid());
    for (const auto& term : s.terms) total.values() += static_cast<double>(term.sign) * term.amp.values();
    return total;
}

TimeGrid fit_grid(const BiphotonModel& model, std::size_t n, DelayRange taus, DelayRange deltas) {
    model.validate();
    const double tau_lo = std::min(taus.lo, 0.0), tau_hi = std::max(taus.hi, 0.0);
    const double d_lo = std::min(deltas.lo, 0.0), d_hi = std::max(deltas.hi, 0.0);
    const auto [a1, b1] = model.t1_extent();
    const auto [a2, b2] = model.t2_extent();

    // Signal coordinate after delay and compensation; idler coordinate fixed.
    const double lo = std::min({a1 - tau_hi + d_lo, a1 - tau_hi, a1, a2});
    const double hi = std::max({b1 - tau_lo + d_hi, b1 - tau_lo, b1, b2});
    const double span = hi - lo;

    const double t0 = std::holds_alternative<Factored>(model.form) ? std::get<Factored>(model.form).u.t0
                                                                   : std::get<KernelIntegral>(model.form).v_s.t0;
    if (n < 8) throw Error(ErrorKind::GridTooSmall, "grid needs at least 8 samples");
    // Three samples of slack: one for floor(), two for delay snapping.
    // Even m puts half-integer multiples of t0 on the lattice.
    const double m = 2.0 * std::floor(0.5 * std::floor(static_cast<double>(n - 4) * t0 / span));
    if (m < 4.0) {
        throw Error(ErrorKind::GridTooSmall,
                    "a " + std::to_string(n) + "-point grid cannot hold the amplitude support of width " +
                        std::to_string(span) + " with 4 samples per t0; increase the grid size or the pump bandwidth");
    }
    const double dt = t0 / m;
    const double t_min = dt * (std::floor(lo / dt) - 1.0);
    return TimeGrid::with_spacing(n, t_min, dt);
}

}  // namespace biphoton
