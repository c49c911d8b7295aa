#include "biphoton/source.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace biphoton {

namespace {

void require_grid_covers(const KernelSpec& k, const TimeGrid& g) {
    const double tol = 1e-9 * g.dt();
    if (!g.contains(0.0, tol) || !g.contains(k.t0, tol)) {
        throw Error(ErrorKind::GridTooSmall, "grid [" + std::to_string(g.t_min()) + ", " +
                                                 std::to_string(g.t_max()) + "] does not cover the kernel support [0, " +
                                                 std::to_string(k.t0) + "]");
    }
}

void require_band_fits(double band_width, const TimeGrid& g) {
    if (band_width > g.span() * (1.0 + 1e-12)) {
        throw Error(ErrorKind::GridTooSmall, "grid span " + std::to_string(g.span()) +
                                                 " is shorter than the kernel support " + std::to_string(band_width));
    }
}

// Largest d with d*dt inside [0, t0] (within tol).
long support_steps(const KernelSpec& k, double dt) {
    return static_cast<long>(std::floor(k.t0 / dt + 1e-9));
}

}  // namespace

void PumpSpec::validate() const {
    if (!(sigma_p > 0.0) || !std::isfinite(sigma_p)) {
        throw Error(ErrorKind::InvalidArgument, "sigma_p must be positive");
    }
    if (!(omega_p >= 0.0) || !std::isfinite(omega_p)) {
        throw Error(ErrorKind::InvalidArgument, "omega_p must be non-negative");
    }
    if (!(amp > 0.0) || !std::isfinite(amp)) {
        throw Error(ErrorKind::InvalidArgument, "pump amplitude must be positive");
    }
}

Complex PumpSpec::value(double t) const {
    return amp * std::exp(-0.5 * sigma_p * sigma_p * t * t) * std::polar(1.0, -omega_p * t);
}

double PumpSpec::half_extent() const {
    return std::sqrt(-2.0 * std::log(kPumpCutoff)) / sigma_p;
}

const char* to_string(KernelShape shape) {
    switch (shape) {
        case KernelShape::Rect: return "rect";
        case KernelShape::Triangle: return "triangle";
        case KernelShape::GaussianWindowed: return "gauss";
    }
    return "rect";
}

std::optional<KernelShape> parse_kernel_shape(const std::string& name) {
    if (name == "rect") return KernelShape::Rect;
    if (name == "triangle") return KernelShape::Triangle;
    if (name == "gauss") return KernelShape::GaussianWindowed;
    return std::nullopt;
}

void KernelSpec::validate() const {
    if (!(t0 > 0.0) || !std::isfinite(t0)) throw Error(ErrorKind::InvalidArgument, "t0 must be positive");
    if (shape == KernelShape::GaussianWindowed) {
        if (!(gauss_width() > 0.0)) throw Error(ErrorKind::InvalidArgument, "gauss width must be positive");
    }
}

double KernelSpec::value(double t, double edge_tol) const {
    if (t < -edge_tol || t > t0 + edge_tol) return 0.0;
    const bool at_start = std::abs(t) <= edge_tol;
    const bool at_end = std::abs(t - t0) <= edge_tol;
    switch (shape) {
        case KernelShape::Rect:
            return (at_start || at_end) ? 0.5 : 1.0;
        case KernelShape::Triangle:
            if (at_start || at_end) return 0.0;
            return 1.0 - std::abs(2.0 * t / t0 - 1.0);
        case KernelShape::GaussianWindowed: {
            const double c = gauss_center();
            const double w = gauss_width();
            const double x = at_start ? 0.0 : (at_end ? t0 : t);
            const double g = std::exp(-0.5 * (x - c) * (x - c) / (w * w));
            return (at_start || at_end) ? 0.5 * g : g;
        }
    }
    return 0.0;
}

void BiphotonModel::validate() const {
    pump.validate();
    std::visit([](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Factored>) {
            f.u.validate();
        } else {
            f.v_s.validate();
            f.v_i.validate();
        }
    }, form);
}

std::pair<double, double> BiphotonModel::t_minus_band() const {
    if (const auto* f = std::get_if<Factored>(&form)) return {0.0, f->u.t0};
    const auto& k = std::get<KernelIntegral>(form);
    return {-k.v_i.t0, k.v_s.t0};
}

std::pair<double, double> BiphotonModel::t1_extent() const {
    const double p = pump.half_extent();
    if (const auto* f = std::get_if<Factored>(&form)) return {-p, p + 0.5 * f->u.t0};
    return {-p, p + std::get<KernelIntegral>(form).v_s.t0};
}

std::pair<double, double> BiphotonModel::t2_extent() const {
    const double p = pump.half_extent();
    if (const auto* f = std::get_if<Factored>(&form)) return {-p - 0.5 * f->u.t0, p};
    return {-p, p + std::get<KernelIntegral>(form).v_i.t0};
}

Field1D sample_pump(const PumpSpec& p, const TimeGrid& g) {
    p.validate();
    Field1D out(g);
    const double cutoff = kPumpCutoff * p.amp;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Complex v = p.value(g.time(k));
        out.values(static_cast<Eigen::Index>(k)) = std::abs(v) < cutoff ? Complex{0.0, 0.0} : v;
    }
    return out;
}

Field1D sample_kernel(const KernelSpec& k, const TimeGrid& g) {
    k.validate();
    require_grid_covers(k, g);
    Field1D out(g);
    const double tol = 1e-9 * g.dt();
    for (std::size_t i = 0; i < g.size(); ++i) out.values(static_cast<Eigen::Index>(i)) = k.value(g.time(i), tol);
    return out;
}

JointAmplitude build_biphoton_factored_raw(const PumpSpec& pump, const KernelSpec& u, const TimeGrid& g) {
    pump.validate();
    u.validate();
    require_band_fits(u.t0, g);

    const std::size_t n = g.size();
    const double dt = g.dt();
    const double tol = 1e-9 * dt;
    const double cutoff = kPumpCutoff * pump.amp;
    const long m = support_steps(u, dt);

    // u depends only on i - j and v only on i + j, so tabulate both.
    std::vector<double> u_tab(static_cast<std::size_t>(m) + 1);
    for (long d = 0; d <= m; ++d) u_tab[static_cast<std::size_t>(d)] = u.value(static_cast<double>(d) * dt, tol);
    std::vector<Complex> v_tab(2 * n - 1);
    for (std::size_t s = 0; s < v_tab.size(); ++s) {
        const double t_plus = g.t_min() + 0.5 * static_cast<double>(s) * dt;
        const Complex v = pump.value(t_plus);
        v_tab[s] = std::abs(v) < cutoff ? Complex{0.0, 0.0} : v;
    }

    JointAmplitude a(g);
    auto& vals = a.values();
    for (std::size_t j = 0; j < n; ++j) {
        for (long d = 0; d <= m; ++d) {
            const std::size_t i = j + static_cast<std::size_t>(d);
            if (i >= n) break;
            const double uu = u_tab[static_cast<std::size_t>(d)];
            if (uu == 0.0) continue;
            vals(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v_tab[i + j] * uu;
        }
    }
    return a;
}

JointAmplitude build_biphoton_factored(const PumpSpec& pump, const KernelSpec& u, const TimeGrid& g) {
    return build_biphoton_factored_raw(pump, u, g).normalized();
}

JointAmplitude build_biphoton_kernel(const PumpSpec& pump, const KernelSpec& v_s, const KernelSpec& v_i,
                                     const TimeGrid& g) {
    pump.validate();
    v_s.validate();
    v_i.validate();
    require_band_fits(std::max(v_s.t0, v_i.t0), g);

    const long n = static_cast<long>(g.size());
    const double dt = g.dt();
    const double tol = 1e-9 * dt;
    const double cutoff = kPumpCutoff * pump.amp;
    const long ms = support_steps(v_s, dt);
    const long mi = support_steps(v_i, dt);

    // Interior limits at the support ends (twice the jump midpoint); the
    // trapezoid end weights below supply the halving.
    auto table = [&](const KernelSpec& k, long m) {
        std::vector<double> v(static_cast<std::size_t>(m) + 1);
        for (long d = 0; d <= m; ++d) {
            const double x = static_cast<double>(d) * dt;
            const bool edge = std::abs(x) <= tol || std::abs(x - k.t0) <= tol;
            v[static_cast<std::size_t>(d)] = edge ? 2.0 * k.value(x, tol) : k.value(x, tol);
        }
        return v;
    };
    const auto vs = table(v_s, ms);
    const auto vi = table(v_i, mi);

    // Integration nodes t_k = t_min + k dt share the detector lattice so the
    // kernel arguments t1 - t_k land on multiples of dt.
    const long k_lo = -std::max(ms, mi);
    const long k_hi = n - 1;
    std::vector<Complex> pump_tab(static_cast<std::size_t>(k_hi - k_lo + 1));
    for (long k = k_lo; k <= k_hi; ++k) {
        const Complex v = pump.value(g.t_min() + static_cast<double>(k) * dt);
        pump_tab[static_cast<std::size_t>(k - k_lo)] = std::abs(v) < cutoff ? Complex{0.0, 0.0} : v;
    }

    JointAmplitude a(g);
    auto& vals = a.values();
    for (long j = 0; j < n; ++j) {
        for (long i = 0; i < n; ++i) {
            const long lo = std::max(i - ms, j - mi);
            const long hi = std::min(i, j);
            if (lo >= hi) continue;  // empty or zero-length interval
            auto term = [&](long k) {
                return pump_tab[static_cast<std::size_t>(k - k_lo)] *
                       (vs[static_cast<std::size_t>(i - k)] * vi[static_cast<std::size_t>(j - k)]);
            };
            Complex acc = 0.5 * (term(lo) + term(hi));
            for (long k = lo + 1; k < hi; ++k) acc += term(k);
            vals(i, j) = acc * dt;
        }
    }
    return a.normalized();
}

JointAmplitude build_biphoton(const BiphotonModel& model, const TimeGrid& g) {
    model.validate();
    if (const auto* f = std::get_if<Factored>(&model.form)) return build_biphoton_factored(model.pump, f->u, g);
    const auto& k = std::get<KernelIntegral>(model.form);
    return build_biphoton_kernel(model.pump, k.v_s, k.v_i, g);
}

}  // namespace biphoton
