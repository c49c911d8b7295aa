#pragma once

// Biphoton construction. Times are in units of the kernel support length
// t0 by convention; nothing here assumes t0 == 1.

#include <optional>
#include <string>
#include <variant>

#include "biphoton/grid.hpp"

namespace biphoton {

/// Gaussian pump v(t) = amp * exp(-sigma_p² t² / 2) * exp(-i omega_p t).
/// value() is the smooth formula; samplers and builders apply the cutoff.
struct PumpSpec {
    double sigma_p = 25.0;
    double omega_p = 0.0;
    double amp = 1.0;

    void validate() const;
    Complex value(double t) const;
    /// |t| beyond which |v| < 1e-12 amp; the pump is treated as zero there.
    double half_extent() const;
};

/// Relative pump cutoff used by both builders.
inline constexpr double kPumpCutoff = 1e-12;

enum class KernelShape { Rect, Triangle, GaussianWindowed };

const char* to_string(KernelShape shape);
std::optional<KernelShape> parse_kernel_shape(const std::string& name);

/// Source kernel supported on (0, t0).
///
/// At a sample landing exactly on 0 or t0 (within `edge_tol`) a kernel with
/// a jump there returns half its interior limit, which keeps trapezoid sums
/// of the sampled kernel second-order accurate.
struct KernelSpec {
    KernelShape shape = KernelShape::Rect;
    double t0 = 1.0;
    // GaussianWindowed only; default centre t0/2 and width t0/8.
    std::optional<double> center;
    std::optional<double> width;

    void validate() const;
    double gauss_center() const { return center.value_or(0.5 * t0); }
    double gauss_width() const { return width.value_or(0.125 * t0); }

    double value(double t, double edge_tol = 0.0) const;
};

struct Factored {
    KernelSpec u;
};

struct KernelIntegral {
    KernelSpec v_s;
    KernelSpec v_i;
};

struct BiphotonModel {
    PumpSpec pump;
    std::variant<Factored, KernelIntegral> form;

    void validate() const;
    /// Support (lo, hi) of the amplitude in t- = t1 - t2.
    std::pair<double, double> t_minus_band() const;
    /// Support of the amplitude along t1 and t2 before any delay.
    std::pair<double, double> t1_extent() const;
    std::pair<double, double> t2_extent() const;
};

Field1D sample_pump(const PumpSpec& p, const TimeGrid& g);

/// Throws GridTooSmall unless [0, t0] lies inside the grid.
Field1D sample_kernel(const KernelSpec& k, const TimeGrid& g);

/// A(t1, t2) = v((t1 + t2)/2) u(t1 - t2), L²-normalized.
JointAmplitude build_biphoton_factored(const PumpSpec& pump, const KernelSpec& u, const TimeGrid& g);

/// Same product without the normalization step; exposed for direct checks.
JointAmplitude build_biphoton_factored_raw(const PumpSpec& pump, const KernelSpec& u, const TimeGrid& g);

/// A(t1, t2) = ∫ v(t) V_s(t1 - t) V_i(t2 - t) dt on the grid lattice,
/// L²-normalized.
JointAmplitude build_biphoton_kernel(const PumpSpec& pump, const KernelSpec& v_s, const KernelSpec& v_i,
                                     const TimeGrid& g);

JointAmplitude build_biphoton(const BiphotonModel& model, const TimeGrid& g);

}  // namespace biphoton
