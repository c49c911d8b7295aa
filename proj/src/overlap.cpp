#include "biphoton/overlap.hpp"

#include <algorithm>
#include <cmath>

namespace biphoton {

std::optional<SupportBand> numeric_band(const JointAmplitude& a) {
    const double peak = a.max_abs();
    if (!(peak > 0.0)) return std::nullopt;
    const double cut = 1e-14 * peak;
    const auto n = static_cast<Eigen::Index>(a.size());
    long lo = n, hi = -n;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(a.values()(i, j)) > cut) {
                lo = std::min<long>(lo, i - j);
                hi = std::max<long>(hi, i - j);
            }
        }
    }
    const double dt = a.grid().dt();
    return SupportBand{static_cast<double>(lo) * dt, static_cast<double>(hi) * dt};
}

OverlapReport overlap_report(const TermSum& s, const CoincidenceWindow& w) {
    if (s.terms.size() != 2) {
        throw Error(ErrorKind::WrongTermCount,
                    "overlap needs exactly two terms, got " + std::to_string(s.terms.size()));
    }
    const RealMatrix mask = window_weights(s.grid(), w);
    const ComplexMatrix a = s.terms[0].signed_amplitude().values();
    const ComplexMatrix b = s.terms[1].signed_amplitude().values();

    OverlapReport r;
    r.inner_product = mask.cast<Complex>().cwiseProduct(a.conjugate().cwiseProduct(b)).sum();
    r.overlap_mass = mask.cwiseProduct(a.cwiseAbs().cwiseProduct(b.cwiseAbs())).sum();
    r.term_norms = {s.terms[0].amp.norm(), s.terms[1].amp.norm()};
    r.epsilon = 1e-12 * r.term_norms[0] * r.term_norms[1];
    r.interferes = r.overlap_mass > r.epsilon;

    const bool analytic = s.terms[0].band && s.terms[1].band;
    r.band_source = analytic ? "analytic" : "numeric";
    for (const auto& term : s.terms) {
        if (analytic) {
            r.bands.push_back(*term.band);
        } else {
            r.bands.push_back(numeric_band(term.amp).value_or(SupportBand{0.0, 0.0}));
        }
    }
    r.intersection = intersect(r.bands[0], r.bands[1]);
    return r;
}

bool interference_predicate(double tau1, double t0) {
    if (!(t0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "t0 must be positive");
    return tau1 > 0.0 && tau1 < t0;
}

double polygon_area(const Polygon& p) {
    if (p.size() < 3) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const auto& a = p[k];
        const auto& b = p[(k + 1) % p.size()];
        acc += a.t_prime * b.t_minus - b.t_prime * a.t_minus;
    }
    return 0.5 * std::abs(acc);
}

namespace {

// Half-plane c_p t' + c_m t- + c_0 >= 0.
struct HalfPlane {
    double c_p, c_m, c_0;
    double eval(const Point2& q) const { return c_p * q.t_prime + c_m * q.t_minus + c_0; }
};

Polygon clip(const Polygon& poly, const HalfPlane& h) {
    Polygon out;
    if (poly.empty()) return out;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point2& cur = poly[k];
        const Point2& nxt = poly[(k + 1) % poly.size()];
        const double fc = h.eval(cur), fn = h.eval(nxt);
        if (fc >= 0.0) out.push_back(cur);
        if ((fc >= 0.0) != (fn >= 0.0)) {
            const double s = fc / (fc - fn);
            out.push_back({cur.t_prime + s * (nxt.t_prime - cur.t_prime), cur.t_minus + s * (nxt.t_minus - cur.t_minus)});
        }
    }
    return out;
}

// lo < c_p t' + c_m t- + shift < hi as two half-planes.
void clip_strip(Polygon& poly, double c_p, double c_m, double shift, double lo, double hi) {
    poly = clip(poly, {c_p, c_m, shift - lo});
    poly = clip(poly, {-c_p, -c_m, hi - shift});
}

Polygon term_region(const Polygon& box, double tau1, double ts, double ti, double sign) {
    // sign = +1: V_s(t' + t-/2 + tau1) V_i(t' - t-/2); sign = -1 swaps t- -> -t-.
    Polygon p = box;
    clip_strip(p, 1.0, 0.5 * sign, tau1, 0.0, ts);
    clip_strip(p, 1.0, -0.5 * sign, 0.0, 0.0, ti);
    return p;
}

}  // namespace

Figure1Regions figure1_regions(double tau1, double t0, std::pair<double, double> t_prime_range,
                               std::optional<double> idler_t0) {
    if (!(t0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "t0 must be positive");
    const double ti = idler_t0.value_or(t0);
    if (!(ti > 0.0)) throw Error(ErrorKind::InvalidArgument, "idler support must be positive");
    if (!(t_prime_range.second > t_prime_range.first)) {
        throw Error(ErrorKind::InvalidArgument, "t' range must have hi > lo");
    }
    const double reach = 2.0 * (std::abs(tau1) + t0 + ti) + 1.0;
    const Polygon box = {{t_prime_range.first, -reach},
                         {t_prime_range.second, -reach},
                         {t_prime_range.second, reach},
                         {t_prime_range.first, reach}};
    Figure1Regions out;
    out.term1 = term_region(box, tau1, t0, ti, +1.0);
    out.term2 = term_region(box, tau1, t0, ti, -1.0);
    out.intersection = term_region(out.term1, tau1, t0, ti, -1.0);
    out.area1 = polygon_area(out.term1);
    out.area2 = polygon_area(out.term2);
    out.intersection_area = polygon_area(out.intersection);
    // Regions touching along an edge clip to a sliver of roundoff area.
    if (out.intersection_area <= 1e-12 * t0 * ti) {
        out.intersection.clear();
        out.intersection_area = 0.0;
    }
    return out;
}

}  // namespace biphoton
