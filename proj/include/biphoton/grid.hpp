#pragma once

// Uniform retarded-time grid, 1D/2D complex fields on it, and trapezoid
// quadrature. Every other module is built on these types.

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "biphoton/error.hpp"

namespace biphoton {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

class TimeGrid {
public:
    /// Throws InvalidArgument unless n >= 2 and t_max > t_min.
    TimeGrid(std::size_t n, double t_min, double t_max);

    /// Grid of n samples with spacing dt whose first sample is t_min.
    static TimeGrid with_spacing(std::size_t n, double t_min, double dt);

    std::size_t size() const noexcept { return n_; }
    double t_min() const noexcept { return t_min_; }
    double t_max() const noexcept { return t_max_; }
    double dt() const noexcept { return dt_; }
    double span() const noexcept { return t_max_ - t_min_; }

    double time(std::size_t k) const noexcept { return t_min_ + static_cast<double>(k) * dt_; }
    std::vector<double> times() const;

    /// Trapezoid weight of sample k in units of dt (1/2 at the ends).
    double trapezoid_weight(std::size_t k) const noexcept {
        return (k == 0 || k + 1 == n_) ? 0.5 : 1.0;
    }

    bool contains(double t, double tol = 0.0) const noexcept {
        return t >= t_min_ - tol && t <= t_max_ + tol;
    }

    bool operator==(const TimeGrid& other) const noexcept {
        return n_ == other.n_ && t_min_ == other.t_min_ && t_max_ == other.t_max_;
    }

private:
    std::size_t n_;
    double t_min_;
    double t_max_;
    double dt_;
};

/// A delay expressed as a whole number of grid steps.
struct SnappedDelay {
    double requested;
    double snapped;
    long steps;
};

/// Rounds a delay to the nearest multiple of dt.
SnappedDelay snap_delay(const TimeGrid& grid, double delay);

/// Grid steps for a delay; throws NonCommensurateDelay if the delay is off
/// the dt lattice by more than 1e-9 dt.
long commensurate_steps(const TimeGrid& grid, double delay);

struct Field1D {
    TimeGrid grid;
    ComplexVector values;

    explicit Field1D(TimeGrid g) : grid(g), values(ComplexVector::Zero(static_cast<Eigen::Index>(g.size()))) {}
    Field1D(TimeGrid g, ComplexVector v);

    Complex operator()(std::size_t k) const { return values(static_cast<Eigen::Index>(k)); }
    double norm_squared() const;
};

/// Complex A(t1, t2) on grid x grid; entry (i, j) = A(t1_i, t2_j).
class JointAmplitude {
public:
    explicit JointAmplitude(TimeGrid g);
    JointAmplitude(TimeGrid g, ComplexMatrix values);

    const TimeGrid& grid() const noexcept { return grid_; }
    const ComplexMatrix& values() const noexcept { return values_; }
    ComplexMatrix& values() noexcept { return values_; }
    std::size_t size() const noexcept { return grid_.size(); }

    Complex operator()(std::size_t i, std::size_t j) const {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    /// Trapezoid ∬|A|² dt1 dt2.
    double norm_squared() const;
    double norm() const;

    /// Scales to unit trapezoid norm; throws ZeroAmplitude for a zero field.
    JointAmplitude normalized() const;

    JointAmplitude operator+(const JointAmplitude& other) const;
    JointAmplitude operator-(const JointAmplitude& other) const;
    JointAmplitude operator*(Complex scale) const;

    /// Largest |A| over the grid.
    double max_abs() const;

private:
    TimeGrid grid_;
    ComplexMatrix values_;
};

using Weight2D = std::function<double(double t1, double t2)>;

/// Trapezoid weights w_i * w_j * dt² as a matrix.
RealMatrix trapezoid_weights_2d(const TimeGrid& grid);

Complex integrate_2d(const JointAmplitude& a, const Weight2D& weight = {});

/// Trapezoid integral of a real field sampled on grid x grid.
double integrate_2d(const TimeGrid& grid, const RealMatrix& values);

/// Trapezoid ∫ f dt of 1D samples.
Complex integrate_1d(const Field1D& f);

/// A'(t1, t2) = A(t1 + delta, t2) for axis 1, A(t1, t2 + delta) for axis 2.
/// Samples arriving from outside the grid are zero.
JointAmplitude shift_axis(const JointAmplitude& a, int axis, double delta);

/// True if shifting by `steps` along `axis` drops a nonzero sample off the grid.
bool shift_clips(const JointAmplitude& a, int axis, long steps);

/// A'(t1, t2) = A(t2, t1).
JointAmplitude swap_axes(const JointAmplitude& a);

/// Trapezoid ⟨a, b⟩ = ∬ conj(a) b.
Complex inner_product(const JointAmplitude& a, const JointAmplitude& b);

}  // namespace biphoton
