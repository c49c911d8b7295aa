#include "biphoton/grid.hpp"

#include <cmath>
#include <string>

namespace biphoton {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NonCommensurateDelay: return "NonCommensurateDelay";
        case ErrorKind::SupportClipped: return "SupportClipped";
        case ErrorKind::GridTooSmall: return "GridTooSmall";
        case ErrorKind::ZeroAmplitude: return "ZeroAmplitude";
        case ErrorKind::WrongTermCount: return "WrongTermCount";
        case ErrorKind::NegativeWeight: return "NegativeWeight";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::SemanticError: return "SemanticError";
        case ErrorKind::PipelineError: return "PipelineError";
    }
    return "Unknown";
}

TimeGrid::TimeGrid(std::size_t n, double t_min, double t_max)
    : n_(n), t_min_(t_min), t_max_(t_max), dt_(0.0) {
    if (n < 2) {
        throw Error(ErrorKind::InvalidArgument, "grid needs at least 2 samples");
    }
    if (!(t_max > t_min) || !std::isfinite(t_min) || !std::isfinite(t_max)) {
        throw Error(ErrorKind::InvalidArgument, "grid requires t_max > t_min");
    }
    dt_ = (t_max - t_min) / static_cast<double>(n - 1);
}

TimeGrid TimeGrid::with_spacing(std::size_t n, double t_min, double dt) {
    if (!(dt > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
    }
    TimeGrid g(n, t_min, t_min + dt * static_cast<double>(n - 1));
    g.dt_ = dt;
    return g;
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> t(n_);
    for (std::size_t k = 0; k < n_; ++k) t[k] = time(k);
    return t;
}

SnappedDelay snap_delay(const TimeGrid& grid, double delay) {
    const double ratio = delay / grid.dt();
    const long steps = std::lround(ratio);
    return {delay, static_cast<double>(steps) * grid.dt(), steps};
}

long commensurate_steps(const TimeGrid& grid, double delay) {
    const double ratio = delay / grid.dt();
    const long steps = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9) {
        throw Error(ErrorKind::NonCommensurateDelay,
                    "delay " + std::to_string(delay) + " is not a multiple of the grid step " +
                        std::to_string(grid.dt()));
    }
    return steps;
}

Field1D::Field1D(TimeGrid g, ComplexVector v) : grid(g), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != grid.size()) {
        throw Error(ErrorKind::InvalidArgument, "field length does not match grid");
    }
}

double Field1D::norm_squared() const {
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        acc += grid.trapezoid_weight(k) * std::norm(values(static_cast<Eigen::Index>(k)));
    }
    return acc * grid.dt();
}

JointAmplitude::JointAmplitude(TimeGrid g)
    : grid_(g),
      values_(ComplexMatrix::Zero(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()))) {}

JointAmplitude::JointAmplitude(TimeGrid g, ComplexMatrix values) : grid_(g), values_(std::move(values)) {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    if (values_.rows() != n || values_.cols() != n) {
        throw Error(ErrorKind::InvalidArgument, "joint amplitude must be n x n for its grid");
    }
}

double JointAmplitude::norm_squared() const {
    return integrate_2d(grid_, values_.cwiseAbs2());
}

double JointAmplitude::norm() const { return std::sqrt(norm_squared()); }

JointAmplitude JointAmplitude::normalized() const {
    const double nrm = norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw Error(ErrorKind::ZeroAmplitude, "amplitude is identically zero on the grid");
    }
    return JointAmplitude(grid_, values_ / nrm);
}

JointAmplitude JointAmplitude::operator+(const JointAmplitude& other) const {
    if (!(grid_ == other.grid_)) throw Error(ErrorKind::InvalidArgument, "grid mismatch");
    return JointAmplitude(grid_, values_ + other.values_);
}

JointAmplitude JointAmplitude::operator-(const JointAmplitude& other) const {
    if (!(grid_ == other.grid_)) throw Error(ErrorKind::InvalidArgument, "grid mismatch");
    return JointAmplitude(grid_, values_ - other.values_);
}

JointAmplitude JointAmplitude::operator*(Complex scale) const {
    return JointAmplitude(grid_, values_ * scale);
}

double JointAmplitude::max_abs() const {
    return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff();
}

RealMatrix trapezoid_weights_2d(const TimeGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::VectorXd w(n);
    for (Eigen::Index k = 0; k < n; ++k) w(k) = grid.trapezoid_weight(static_cast<std::size_t>(k));
    return (w * w.transpose()) * (grid.dt() * grid.dt());
}

Complex integrate_2d(const JointAmplitude& a, const Weight2D& weight) {
    const auto& g = a.grid();
    const std::size_t n = g.size();
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
        const double wj = g.trapezoid_weight(j);
        Complex col{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            double w = g.trapezoid_weight(i);
            if (weight) w *= weight(g.time(i), g.time(j));
            col += w * a(i, j);
        }
        acc += wj * col;
    }
    return acc * (g.dt() * g.dt());
}

double integrate_2d(const TimeGrid& grid, const RealMatrix& values) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (values.rows() != n || values.cols() != n) {
        throw Error(ErrorKind::InvalidArgument, "field shape does not match grid");
    }
    // Interior sum plus half-weight edges, then corners.
    double acc = values.sum();
    acc -= 0.5 * (values.row(0).sum() + values.row(n - 1).sum() + values.col(0).sum() + values.col(n - 1).sum());
    acc += 0.25 * (values(0, 0) + values(0, n - 1) + values(n - 1, 0) + values(n - 1, n - 1));
    return acc * grid.dt() * grid.dt();
}

Complex integrate_1d(const Field1D& f) {
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < f.grid.size(); ++k) acc += f.grid.trapezoid_weight(k) * f(k);
    return acc * f.grid.dt();
}

namespace {

void check_axis(int axis) {
    if (axis != 1 && axis != 2) throw Error(ErrorKind::InvalidArgument, "axis must be 1 or 2");
}

}  // namespace

JointAmplitude shift_axis(const JointAmplitude& a, int axis, double delta) {
    check_axis(axis);
    const long steps = commensurate_steps(a.grid(), delta);
    if (steps == 0) return a;
    const auto n = static_cast<Eigen::Index>(a.size());
    const Eigen::Index s = steps;
    JointAmplitude out(a.grid());
    if (std::abs(s) >= n) return out;
    const Eigen::Index len = n - std::abs(s);
    const Eigen::Index src = s > 0 ? s : 0;
    const Eigen::Index dst = s > 0 ? 0 : -s;
    if (axis == 1) {
        out.values().middleRows(dst, len) = a.values().middleRows(src, len);
    } else {
        out.values().middleCols(dst, len) = a.values().middleCols(src, len);
    }
    return out;
}

bool shift_clips(const JointAmplitude& a, int axis, long steps) {
    check_axis(axis);
    if (steps == 0) return false;
    const auto n = static_cast<Eigen::Index>(a.size());
    const Eigen::Index count = std::min<Eigen::Index>(std::abs(steps), n);
    // Source rows (cols) that no output sample reads from.
    const Eigen::Index first = steps > 0 ? 0 : n - count;
    const auto& v = a.values();
    if (axis == 1) return v.middleRows(first, count).cwiseAbs().maxCoeff() > 0.0;
    return v.middleCols(first, count).cwiseAbs().maxCoeff() > 0.0;
}

JointAmplitude swap_axes(const JointAmplitude& a) {
    return JointAmplitude(a.grid(), a.values().transpose());
}

Complex inner_product(const JointAmplitude& a, const JointAmplitude& b) {
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::InvalidArgument, "grid mismatch");
    const RealMatrix w = trapezoid_weights_2d(a.grid());
    return (w.cast<Complex>().cwiseProduct(a.values().conjugate().cwiseProduct(b.values()))).sum();
}

}  // namespace biphoton
