#include "biphoton/io.hpp"

#include <cmath>
#include <cstdio>

namespace biphoton::io {

using nlohmann::json;

std::string format_number(double x) {
    if (x == 0.0) x = 0.0;  // no "-0"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

namespace {

double clean(double x) { return x == 0.0 ? 0.0 : x; }

json band_json(const SupportBand& b) { return {{"lo", clean(b.lo)}, {"hi", clean(b.hi)}}; }

json polygon_json(const Polygon& p) {
    json out = json::array();
    for (const auto& q : p) out.push_back({clean(q.t_prime), clean(q.t_minus)});
    return out;
}

}  // namespace

std::string dip_curve_csv(const DipCurve& c) {
    std::string out = c.variable + ",rate\n";
    for (std::size_t k = 0; k < c.rates.size(); ++k) {
        out += format_number(c.tau_values[k]) + "," + format_number(c.rates[k]) + "\n";
    }
    return out;
}

json dip_curve_json(const DipCurve& c) {
    json values = json::array(), requested = json::array(), rates = json::array();
    for (std::size_t k = 0; k < c.rates.size(); ++k) {
        values.push_back(clean(c.tau_values[k]));
        requested.push_back(clean(c.requested[k]));
        rates.push_back(clean(c.rates[k]));
    }
    return {{"schema_version", kSchemaVersion}, {"kind", "dip_curve"}, {"variable", c.variable},
            {"values", values}, {"requested", requested}, {"rates", rates}};
}

json overlap_json(const OverlapReport& r, const OverlapContext& ctx) {
    json bands = json::array();
    for (const auto& b : r.bands) bands.push_back(band_json(b));
    json window = {{"half_width", ctx.window.half_width}};
    window["t_plus"] = ctx.window.t_plus ? json{ctx.window.t_plus->first, ctx.window.t_plus->second} : json(nullptr);
    json out = {{"schema_version", kSchemaVersion},
                {"kind", "overlap_report"},
                {"tau1", clean(ctx.tau1)},
                {"delta", clean(ctx.delta)},
                {"inner_product", {{"re", clean(r.inner_product.real())}, {"im", clean(r.inner_product.imag())}}},
                {"overlap_mass", clean(r.overlap_mass)},
                {"epsilon", r.epsilon},
                {"interferes", r.interferes},
                {"term_norms", r.term_norms},
                {"band_coordinate", "t_minus"},
                {"band_source", r.band_source},
                {"bands", bands},
                {"intersection", r.intersection ? band_json(*r.intersection) : json(nullptr)},
                {"window", window}};
    if (ctx.sigma_p) {
        // Pump envelope |v|² = exp(-sigma_p² t+²): standard deviation 1/(sqrt(2) sigma_p).
        const double sd = 1.0 / (std::sqrt(2.0) * *ctx.sigma_p);
        out["t_plus_support"] = {{"lo", -5.0 * sd}, {"hi", 5.0 * sd}, {"label", "5-sigma pump envelope"}};
    }
    return out;
}

json schmidt_json(const SchmidtSpectrum& s) {
    const auto m = entanglement_metrics(s);
    double sum_c2 = 0.0;
    for (double c : s.coeffs) sum_c2 += c * c;
    json coeffs = json::array();
    for (std::size_t j = 0; j < s.rank; ++j) coeffs.push_back(s.coeffs[j]);
    return {{"schema_version", kSchemaVersion}, {"kind", "schmidt_spectrum"},
            {"coeffs", coeffs},                 {"rank", s.rank},
            {"threshold", s.threshold},         {"sum_c2", sum_c2},
            {"entropy", clean(m.entropy)},      {"purity", m.purity},
            {"schmidt_number", m.schmidt_number}};
}

std::string schmidt_modes_csv(const SchmidtSpectrum& s) {
    std::string out = "mode,t,phi_re,phi_im,chi_re,chi_im\n";
    for (std::size_t j = 0; j < s.rank; ++j) {
        const auto& phi = s.modes_1[j];
        const auto& chi = s.modes_2[j];
        for (std::size_t k = 0; k < phi.grid.size(); ++k) {
            out += std::to_string(j) + "," + format_number(phi.grid.time(k)) + "," + format_number(phi(k).real()) +
                   "," + format_number(phi(k).imag()) + "," + format_number(chi(k).real()) + "," +
                   format_number(chi(k).imag()) + "\n";
        }
    }
    return out;
}

std::string regions_csv(const Figure1Regions& r) {
    std::string out = "term,vertex_index,t_prime,t_minus\n";
    auto emit = [&](const std::string& label, const Polygon& p) {
        for (std::size_t k = 0; k < p.size(); ++k) {
            out += label + "," + std::to_string(k) + "," + format_number(p[k].t_prime) + "," +
                   format_number(p[k].t_minus) + "\n";
        }
    };
    emit("1", r.term1);
    emit("2", r.term2);
    emit("intersection", r.intersection);
    return out;
}

json regions_json(const Figure1Regions& r, double tau1, double t0, double idler_t0) {
    return {{"schema_version", kSchemaVersion},
            {"kind", "figure1_regions"},
            {"tau1", clean(tau1)},
            {"t0", t0},
            {"idler_t0", idler_t0},
            {"term1", polygon_json(r.term1)},
            {"term2", polygon_json(r.term2)},
            {"intersection", polygon_json(r.intersection)},
            {"area1", r.area1},
            {"area2", r.area2},
            {"intersection_area", r.intersection_area}};
}

json grid_json(const TimeGrid& g) {
    return {{"n", g.size()}, {"t_min", g.t_min()}, {"t_max", g.t_max()}, {"dt", g.dt()}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace biphoton::io
