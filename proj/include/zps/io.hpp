#pragma once

#include <istream>
#include <span>
#include <string>

#include <json.hpp>

#include "zps/detectors.hpp"
#include "zps/engine.hpp"
#include "zps/mc.hpp"
#include "zps/scan.hpp"
#include "zps/states.hpp"
#include "zps/witness.hpp"

namespace zps {

nlohmann::json to_json(const StateSpec& spec);
StateSpec state_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DetectorModel& model);
DetectorModel detector_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LimitValue& limit);
nlohmann::json to_json(const Extremum& extremum);
nlohmann::json to_json(const TransformabilityReport& report);
nlohmann::json to_json(const EstimateResult& result);
nlohmann::json extrema_to_json(std::span<const Extremum> extrema);

/// CSV with header `R,K,dKdR,Qout`, one row per grid point, full double
/// precision (round-trips bit-exactly).
std::string curve_to_csv(const AttenuationCurve& curve);

/// CSV with header `param1,param2,qsign,has_min,has_max,klyshko`; failed
/// cells carry qsign "error".
std::string region_scan_to_csv(const RegionScan& scan);

/// Custom distribution from single-column CSV: header `p_n`, rows in order
/// n = 0, 1, 2, ...
PhotonNumberDistribution custom_from_csv(std::istream& in);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

}  // namespace zps
