#pragma once

// JSON and CSV serialization of reports. Every JSON report carries
// report_version, the software version, the cutoff fingerprint, the echoed
// configuration and the parameter provenance where parameters exist.

#include <string>
#include <vector>

#include <json.hpp>

#include "siegel/approximants.hpp"
#include "siegel/correlations.hpp"
#include "siegel/quad_char.hpp"

namespace siegel {

using json = nlohmann::ordered_json;

inline constexpr int kReportVersion = 1;

std::string software_version();

json envelope(const std::string& command, const json& config);

json to_json(const QualityProxy& q);
QualityProxy quality_from_json(const json& j);

json to_json(const SiegelParams& p);
SiegelParams params_from_json(const json& j);

json to_json(const SingularSeries& s);
SingularSeries series_from_json(const json& j);

json to_json(const ExceptionalSumReport& r);

// Timings are left out unless requested, so that identical runs produce
// identical bytes.
json to_json(const ChainReport& r, bool include_timings = false);
ChainReport chain_from_json(const json& j);

json to_json(const LevelScan& s);

// Doubles that may be NaN or infinite are written as null.
json number_or_null(double v);
double number_from(const json& j);

// Header row plus rows; values are written with 17 significant digits.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows);
std::string csv_number(double v);

}  // namespace siegel
