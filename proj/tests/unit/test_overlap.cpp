#include <doctest.h>

#include "biphoton/correlations.hpp"
#include "biphoton/overlap.hpp"
#include "support.hpp"

using namespace biphoton;

namespace {

struct Fixture {
    BiphotonModel model = testing::rect_model(25.0);
    TimeGrid grid = fit_grid(model, 384, {-0.5, 2.0}, {});
    JointAmplitude amp = build_biphoton(model, grid);
    SupportBand band{0.0, 1.0};

    OverlapReport at(double tau, const CoincidenceWindow& w = {}) const {
        return overlap_report(run_pipeline(amp, band, {snap_delay(grid, tau).snapped, true, 0.0}), w);
    }
};

// Direct predicate for the two term support regions at (t', t-).
bool in_term(double tp, double tm, double tau, double ts, double ti, double sign) {
    const double s = tp + 0.5 * sign * tm + tau;
    const double i = tp - 0.5 * sign * tm;
    return s > 0.0 && s < ts && i > 0.0 && i < ti;
}

double brute_intersection_area(double tau, double ts, double ti, double lo, double hi) {
    const int n = 1200;
    const double reach = 2.0 * (std::abs(tau) + ts + ti) + 1.0;
    const double hp = (hi - lo) / n, hm = 2.0 * reach / n;
    long count = 0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double tp = lo + (a + 0.5) * hp, tm = -reach + (b + 0.5) * hm;
            count += in_term(tp, tm, tau, ts, ti, +1.0) && in_term(tp, tm, tau, ts, ti, -1.0);
        }
    }
    return static_cast<double>(count) * hp * hm;
}

}  // namespace

TEST_CASE_FIXTURE(Fixture, "overlap report at the spec points") {
    SUBCASE("tau1 = 1.5 t0: disjoint") {
        const auto r = at(1.5);
        CHECK(r.overlap_mass == 0.0);
        CHECK_FALSE(r.interferes);
        CHECK_FALSE(r.intersection.has_value());
    }
    SUBCASE("tau1 = t0/2: both bands (-t0/2, t0/2)") {
        const auto r = at(0.5);
        CHECK(r.band_source == "analytic");
        CHECK(r.bands[0].lo == doctest::Approx(-0.5));
        CHECK(r.bands[0].hi == doctest::Approx(0.5));
        CHECK(r.bands[1].lo == doctest::Approx(-0.5));
        CHECK(r.bands[1].hi == doctest::Approx(0.5));
        REQUIRE(r.intersection.has_value());
        CHECK(r.intersection->length() == doctest::Approx(1.0));
        CHECK(r.interferes);
        CHECK(r.overlap_mass > 0.4);
    }
    SUBCASE("tau1 = 0: bands (0, t0) and (-t0, 0), empty intersection") {
        const auto r = at(0.0);
        CHECK(r.bands[0] == SupportBand{0.0, 1.0});
        CHECK(r.bands[1] == SupportBand{-1.0, 0.0});
        CHECK_FALSE(r.intersection.has_value());
    }
    SUBCASE("a narrow window suppresses overlap") {
        CHECK(at(0.5, CoincidenceWindow{0.1, std::nullopt}).overlap_mass < at(0.5).overlap_mass);
    }
    SUBCASE("numeric bands agree with the analytic ones") {
        const auto s = run_pipeline(amp, std::nullopt, {snap_delay(grid, 0.25).snapped, true, 0.0});
        const auto r = overlap_report(s, CoincidenceWindow{});
        CHECK(r.band_source == "numeric");
        CHECK(r.bands[0].lo == doctest::Approx(-0.25).epsilon(1e-9));
        CHECK(r.bands[0].hi == doctest::Approx(0.75).epsilon(1e-9));
        CHECK(r.bands[1].lo == doctest::Approx(-0.75).epsilon(1e-9));
        CHECK(r.bands[1].hi == doctest::Approx(0.25).epsilon(1e-9));
    }
    SUBCASE("wrong term count") {
        TermSum one;
        one.terms.push_back({amp, +1, 1, std::nullopt});
        try {
            overlap_report(one, CoincidenceWindow{});
            FAIL("expected WrongTermCount");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::WrongTermCount);
        }
    }
}

TEST_CASE("interference predicate") {
    CHECK(interference_predicate(0.5, 1.0));
    CHECK_FALSE(interference_predicate(0.0, 1.0));
    CHECK_FALSE(interference_predicate(1.0, 1.0));
    CHECK_FALSE(interference_predicate(-0.25, 1.0));
    CHECK_THROWS_AS(interference_predicate(0.5, 0.0), Error);
}

TEST_CASE("polygon area") {
    CHECK(polygon_area({{0, 0}, {2, 0}, {2, 1}, {0, 1}}) == doctest::Approx(2.0));
    CHECK(polygon_area({{0, 0}, {1, 1}}) == 0.0);
}

TEST_CASE("support regions, equal kernel supports") {
    const std::pair<double, double> range{-3.0, 3.0};

    SUBCASE("tau1 = 0: mirror images under t- -> -t-") {
        const auto r = figure1_regions(0.0, 1.0, range);
        REQUIRE(r.term1.size() == r.term2.size());
        for (const auto& p : r.term1) {
            bool found = false;
            for (const auto& q : r.term2) {
                found = found || (std::abs(p.t_prime - q.t_prime) < 1e-12 && std::abs(p.t_minus + q.t_minus) < 1e-12);
            }
            CHECK(found);
        }
        CHECK(r.area1 == doctest::Approx(r.area2));
    }

    SUBCASE("tau1 = t0/2 overlaps, tau1 = 2 t0 does not") {
        CHECK(figure1_regions(0.5, 1.0, range).intersection_area > 0.0);
        CHECK(figure1_regions(2.0, 1.0, range).intersection_area == 0.0);
        CHECK(figure1_regions(1.0, 1.0, range).intersection.empty());
        CHECK(figure1_regions(0.99, 1.0, range).intersection_area > 0.0);
    }

    SUBCASE("areas match a brute-force raster") {
        for (double tau : {-0.6, 0.0, 0.3, 0.5, 0.9, 1.2}) {
            const auto r = figure1_regions(tau, 1.0, range);
            CHECK(r.intersection_area == doctest::Approx(brute_intersection_area(tau, 1.0, 1.0, -3.0, 3.0)).epsilon(0.02));
        }
        const auto r = figure1_regions(0.4, 1.0, range, 0.6);
        CHECK(r.intersection_area == doctest::Approx(brute_intersection_area(0.4, 1.0, 0.6, -3.0, 3.0)).epsilon(0.02));
    }

    SUBCASE("each region has the area of the kernel support rectangle") {
        // (t', t-) -> (s, i) has unit Jacobian, so area = ts * ti.
        const auto r = figure1_regions(0.7, 1.0, range, 0.5);
        CHECK(r.area1 == doctest::Approx(0.5));
        CHECK(r.area2 == doctest::Approx(0.5));
    }
}

TEST_CASE("support regions with a short idler kernel follow 0 < tau1 < t0") {
    // tau1 = 0 is left out: a patch of size idler_t0² survives there.
    const std::pair<double, double> range{-3.0, 3.0};
    for (double tau : {-0.5, -0.1, 0.1, 0.5, 0.9, 1.0, 1.1, 2.0}) {
        const bool overlap = figure1_regions(tau, 1.0, range, 1e-3).intersection_area > 0.0;
        CHECK_MESSAGE(overlap == interference_predicate(tau, 1.0), "tau1 = " << tau);
    }
}
