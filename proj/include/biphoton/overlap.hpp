#pragma once

// Do the two post-splitter amplitudes overlap? Numeric overlap functionals
// plus the analytic support geometry in (t', t-).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/correlations.hpp"
#include "biphoton/optics.hpp"

namespace biphoton {

struct OverlapReport {
    Complex inner_product{0.0, 0.0};  // ⟨A(a), A(b)⟩ within the window, signs included
    double overlap_mass = 0.0;        // ∬_W |A(a)| |A(b)|
    std::vector<SupportBand> bands;
    std::string band_source;  // "analytic" or "numeric"
    std::optional<SupportBand> intersection;
    std::vector<double> term_norms;
    double epsilon = 0.0;  // 1e-12 * product of term norms
    bool interferes = false;
};

/// Requires exactly two terms (WrongTermCount otherwise). Bands come from
/// the terms' tracked supports when present, else from the sampled data.
OverlapReport overlap_report(const TermSum& s, const CoincidenceWindow& w);

/// Smallest t- band holding every sample with |A| > 1e-14 max|A|.
std::optional<SupportBand> numeric_band(const JointAmplitude& a);

/// 0 < tau1 < t0 (factored source, u supported on (0, t0)).
bool interference_predicate(double tau1, double t0);

struct Point2 {
    double t_prime;
    double t_minus;
};

using Polygon = std::vector<Point2>;

double polygon_area(const Polygon& p);

struct Figure1Regions {
    Polygon term1;
    Polygon term2;
    Polygon intersection;
    double area1 = 0.0;
    double area2 = 0.0;
    double intersection_area = 0.0;
};

/// Supports of the two integrand terms of the post-splitter kernel integral
/// in the (t', t-) plane:
///   term 1: V_s(t' + t-/2 + tau1) V_i(t' - t-/2)
///   term 2: V_s(t' - t-/2 + tau1) V_i(t' + t-/2)
/// with V_s on (0, t0) and V_i on (0, idler_t0) (default t0), clipped to
/// t' in t_prime_range.
Figure1Regions figure1_regions(double tau1, double t0, std::pair<double, double> t_prime_range,
                               std::optional<double> idler_t0 = std::nullopt);

}  // namespace biphoton
