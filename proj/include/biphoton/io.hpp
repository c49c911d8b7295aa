#pragma once

// Fixed CSV/JSON layouts for every artifact the tools emit. Column order and
// JSON keys are part of the external interface (see docs/FORMATS.md).

#include <string>

#include <json.hpp>

#include "biphoton/correlations.hpp"
#include "biphoton/entanglement.hpp"
#include "biphoton/overlap.hpp"

namespace biphoton::io {

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kVersion = "0.1.0";

/// "%.10g"; the CSV number format.
std::string format_number(double x);

std::string dip_curve_csv(const DipCurve& c);
nlohmann::json dip_curve_json(const DipCurve& c);

struct OverlapContext {
    double tau1 = 0.0;
    double delta = 0.0;
    CoincidenceWindow window;
    std::optional<double> sigma_p;  // for the t+ envelope range
};

nlohmann::json overlap_json(const OverlapReport& r, const OverlapContext& ctx);

nlohmann::json schmidt_json(const SchmidtSpectrum& s);
std::string schmidt_modes_csv(const SchmidtSpectrum& s);

std::string regions_csv(const Figure1Regions& r);
nlohmann::json regions_json(const Figure1Regions& r, double tau1, double t0, double idler_t0);

nlohmann::json grid_json(const TimeGrid& g);

/// Pretty-printed JSON followed by a newline.
std::string dump(const nlohmann::json& j);

}  // namespace biphoton::io
