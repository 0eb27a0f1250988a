#include "zps/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace zps {
namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& what) {
    throw std::invalid_argument("malformed JSON: " + what);
}

double number_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
        bad_field(std::string("missing numeric field '") + key + "'");
    }
    return j[key].get<double>();
}

std::string limit_to_string(const LimitValue& limit) {
    switch (limit.kind) {
        case LimitValue::Kind::divergent:
            return "infinity";
        case LimitValue::Kind::indeterminate:
            return "indeterminate";
        case LimitValue::Kind::finite:
            break;
    }
    return "";
}

const char* extremum_kind(const Extremum& e) {
    return e.kind == Extremum::Kind::minimum ? "min" : "max";
}

}  // namespace

std::string format_double(double value) {
    char buffer[40];
    for (int precision : {15, 16, 17}) {
        std::snprintf(buffer, sizeof buffer, "%.*g", precision, value);
        if (std::strtod(buffer, nullptr) == value) {
            break;
        }
    }
    return buffer;
}

nlohmann::json to_json(const StateSpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CoherentSpec>) {
                return {{"kind", "coherent"}, {"mean_n", s.mean_n}};
            } else if constexpr (std::is_same_v<T, FockSpec>) {
                return {{"kind", "fock"}, {"n", s.n}};
            } else if constexpr (std::is_same_v<T, ThermalSpec>) {
                return {{"kind", "thermal"}, {"nbar", s.nbar}};
            } else if constexpr (std::is_same_v<T, SuperpositionSpec>) {
                json terms = json::array();
                for (const auto& term : s.terms) {
                    if (term.phase != 0.0) {
                        terms.push_back({term.n, term.amplitude, term.phase});
                    } else {
                        terms.push_back({term.n, term.amplitude});
                    }
                }
                return {{"kind", "superposition"}, {"terms", terms}};
            } else if constexpr (std::is_same_v<T, DsqSpec>) {
                return {{"kind", "dsq"}, {"z", s.z}, {"r", s.r}};
            } else if constexpr (std::is_same_v<T, CcsSpec>) {
                return {{"kind", "ccs"}, {"lambda", s.lambda}, {"alpha", s.alpha}};
            } else {
                return {{"kind", "custom"}, {"probs", s.probs}};
            }
        },
        spec);
}

StateSpec state_spec_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        bad_field("state spec needs a string field 'kind'");
    }
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "coherent") {
        return CoherentSpec{number_field(j, "mean_n")};
    }
    if (kind == "fock") {
        if (!j.contains("n") || !j["n"].is_number_integer()) {
            bad_field("fock state needs an integer field 'n'");
        }
        return FockSpec{j["n"].get<int>()};
    }
    if (kind == "thermal") {
        return ThermalSpec{number_field(j, "nbar")};
    }
    if (kind == "superposition") {
        if (!j.contains("terms") || !j["terms"].is_array()) {
            bad_field("superposition needs an array field 'terms'");
        }
        SuperpositionSpec spec;
        for (const auto& t : j["terms"]) {
            if (!t.is_array() || t.size() < 2 || t.size() > 3 || !t[0].is_number_integer()) {
                bad_field("superposition terms must be [n, amplitude] or [n, amplitude, phase]");
            }
            SuperpositionTerm term;
            term.n = t[0].get<int>();
            term.amplitude = t[1].get<double>();
            term.phase = t.size() == 3 ? t[2].get<double>() : 0.0;
            spec.terms.push_back(term);
        }
        return spec;
    }
    if (kind == "dsq") {
        return DsqSpec{number_field(j, "z"), number_field(j, "r")};
    }
    if (kind == "ccs") {
        return CcsSpec{number_field(j, "lambda"), number_field(j, "alpha")};
    }
    if (kind == "custom") {
        if (!j.contains("probs") || !j["probs"].is_array()) {
            bad_field("custom state needs an array field 'probs'");
        }
        return CustomSpec{j["probs"].get<std::vector<double>>()};
    }
    throw std::invalid_argument("unknown state kind '" + kind + "'");
}

nlohmann::json to_json(const DetectorModel& model) {
    return {{"eta1", model.eta1}, {"eta2", model.eta2}, {"dark2", model.dark2}, {"pnr", model.pnr}};
}

DetectorModel detector_model_from_json(const json& j) {
    if (!j.is_object()) {
        bad_field("detector model must be a JSON object");
    }
    DetectorModel model;
    if (j.contains("eta1")) model.eta1 = number_field(j, "eta1");
    if (j.contains("eta2")) model.eta2 = number_field(j, "eta2");
    if (j.contains("dark2")) model.dark2 = number_field(j, "dark2");
    if (j.contains("pnr")) {
        if (!j["pnr"].is_boolean()) bad_field("'pnr' must be a boolean");
        model.pnr = j["pnr"].get<bool>();
    }
    return model;
}

nlohmann::json to_json(const ExperimentConfig& config) {
    return {{"state", to_json(config.state)},
            {"reflectance", config.reflectance},
            {"detector", to_json(config.detectors)},
            {"shots", config.shots},
            {"seed", config.seed},
            {"partitions", config.partitions}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
    if (!j.is_object() || !j.contains("state")) {
        bad_field("experiment config needs a 'state' object");
    }
    ExperimentConfig config;
    config.state = state_spec_from_json(j["state"]);
    config.reflectance = number_field(j, "reflectance");
    if (j.contains("detector")) {
        config.detectors = detector_model_from_json(j["detector"]);
    }
    if (j.contains("shots")) config.shots = j["shots"].get<std::uint64_t>();
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("partitions")) config.partitions = j["partitions"].get<std::uint32_t>();
    return config;
}

nlohmann::json to_json(const LimitValue& limit) {
    if (limit.is_finite()) {
        return limit.value;
    }
    return limit_to_string(limit);
}

nlohmann::json to_json(const Extremum& extremum) {
    return {{"R", extremum.r_star}, {"kind", extremum_kind(extremum)}, {"K", extremum.k_value}};
}

nlohmann::json extrema_to_json(std::span<const Extremum> extrema) {
    json list = json::array();
    for (const Extremum& e : extrema) {
        list.push_back(to_json(e));
    }
    return {{"extrema", list}};
}

nlohmann::json to_json(const TransformabilityReport& report) {
    json extrema = json::array();
    bool has_min = false;
    bool has_max = false;
    for (const Extremum& e : report.observed_extrema) {
        extrema.push_back(to_json(e));
        (e.kind == Extremum::Kind::minimum ? has_min : has_max) = true;
    }
    return {{"q_in", report.q_in},
            {"initially_sub", report.initially_sub},
            {"lee", report.lee},
            {"mean_ratio", report.mean_ratio},
            {"klyshko", report.klyshko},
            {"limit_k", to_json(report.limit_k)},
            {"limit_dkdr", to_json(report.limit_dkdr)},
            {"predicted_transformable", report.predicted_transformable},
            {"observed_extrema", extrema},
            {"has_min", has_min},
            {"has_max", has_max},
            {"nonclassical_by_slope", report.nonclassical_by_slope},
            {"nonclassical_by_magnitude", report.nonclassical_by_magnitude}};
}

nlohmann::json to_json(const EstimateResult& result) {
    return {{"k_estimate", result.k_estimate},
            {"std_error", result.std_error},
            {"herald_rate", result.herald_rate},
            {"defined", result.defined},
            {"counts",
             {{"shots", result.shots},
              {"herald_no_click", result.herald_no_click},
              {"output_clicks", result.output_clicks},
              {"conditioned_clicks", result.conditioned_clicks}}},
            {"partitions", result.partitions},
            {"prng", result.prng}};
}

std::string curve_to_csv(const AttenuationCurve& curve) {
    std::string csv = "R,K,dKdR,Qout\n";
    for (std::size_t i = 0; i < curve.r_grid.size(); ++i) {
        csv += format_double(curve.r_grid[i]);
        csv += ',';
        csv += format_double(curve.k_values[i]);
        csv += ',';
        csv += format_double(curve.dkdr_values[i]);
        csv += ',';
        csv += format_double(curve.q_out_values[i]);
        csv += '\n';
    }
    return csv;
}

std::string region_scan_to_csv(const RegionScan& scan) {
    std::string csv = "param1,param2,qsign,has_min,has_max,klyshko\n";
    for (std::size_t i1 = 0; i1 < scan.grid1.size(); ++i1) {
        for (std::size_t i2 = 0; i2 < scan.grid2.size(); ++i2) {
            const CellClass& cell = scan.at(i1, i2);
            csv += format_double(scan.grid1[i1]);
            csv += ',';
            csv += format_double(scan.grid2[i2]);
            csv += ',';
            if (!cell.error.empty()) {
                csv += "error";
            } else {
                csv += cell.q_sign == QSign::super ? "super"
                       : cell.q_sign == QSign::sub ? "sub"
                                                   : "poissonian";
            }
            csv += ',';
            csv += cell.has_min ? '1' : '0';
            csv += ',';
            csv += cell.has_max ? '1' : '0';
            csv += ',';
            csv += cell.klyshko ? '1' : '0';
            csv += '\n';
        }
    }
    return csv;
}

PhotonNumberDistribution custom_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empty CSV input");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "p_n") {
        throw std::invalid_argument("custom distribution CSV must start with header 'p_n'");
    }
    std::vector<double> probs;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(line, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("invalid probability row '" + line + "'");
        }
        if (used != line.size()) {
            throw std::invalid_argument("invalid probability row '" + line + "'");
        }
        probs.push_back(value);
    }
    return make_custom(probs);
}

}  // namespace zps
