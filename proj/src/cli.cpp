#include "zps/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "zps/io.hpp"

namespace zps {
namespace {

using nlohmann::json;

/// Failures that should map to exit code 3 rather than 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading file '" + path + "'");
    }
    return buffer.str();
}

/// `--state`/`--detector`/`--config` accept inline JSON or @path-to-file.
json json_argument(const std::string& arg) {
    const std::string text = arg.starts_with('@') ? read_file(arg.substr(1)) : arg;
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) {
        throw std::invalid_argument("argument is not valid JSON: " + arg);
    }
    return parsed;
}

/// State argument; a @file ending in .csv is loaded as a single-column
/// custom distribution instead of JSON.
StateSpec parse_state(const std::string& arg) {
    if (arg.starts_with('@') && arg.ends_with(".csv")) {
        std::ifstream in(arg.substr(1));
        if (!in) {
            throw IoError("cannot open file '" + arg.substr(1) + "'");
        }
        const PhotonNumberDistribution dist = custom_from_csv(in);
        return CustomSpec{{dist.probs().begin(), dist.probs().end()}};
    }
    return state_spec_from_json(json_argument(arg));
}

void write_output(const std::string& path, const std::string& content, std::ostream& fallback) {
    if (path.empty()) {
        fallback << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open output file '" + path + "'");
    }
    out << content;
    if (!out) {
        throw IoError("failed writing output file '" + path + "'");
    }
}

std::vector<double> parse_grid(const std::string& arg) {
    double lo = 0.0;
    double hi = 0.0;
    unsigned long n = 0;
    char c1 = 0;
    char c2 = 0;
    std::istringstream in(arg);
    if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || !in.eof() || n == 0) {
        throw std::invalid_argument("grid must be formatted lo:hi:count, got '" + arg + "'");
    }
    return linear_grid(lo, hi, n);
}

std::pair<double, double> parse_range(const std::string& arg) {
    double lo = 0.0;
    double hi = 0.0;
    char c = 0;
    std::istringstream in(arg);
    if (!(in >> lo >> c >> hi) || c != ':' || !in.eof()) {
        throw std::invalid_argument("range must be formatted lo:hi, got '" + arg + "'");
    }
    return {lo, hi};
}

Truncation truncation_from_env() {
    Truncation trunc;
    if (const char* cap = std::getenv("ZPS_MAX_NMAX")) {
        char* end = nullptr;
        const unsigned long parsed = std::strtoul(cap, &end, 10);
        if (end == cap || *end != '\0' || parsed == 0) {
            throw std::invalid_argument("ZPS_MAX_NMAX must be a positive integer");
        }
        trunc.max_terms = parsed;
    }
    return trunc;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Zero-photon-subtraction toolkit: attenuation curves, nonclassicality "
                 "witnesses, detector models and Monte-Carlo estimates"};
    app.require_subcommand(1);

    std::string state_arg;
    std::string detector_arg;
    std::string config_arg;
    std::string out_path;
    std::string format = "csv";
    double r_stop = 0.999;
    std::size_t points = 512;

    auto add_common = [&](CLI::App* cmd, bool with_state = true) {
        if (with_state) {
            cmd->add_option("--state", state_arg, "state spec as inline JSON or @file (@*.csv "
                                                  "loads a custom distribution)")
                ->required();
        }
        cmd->add_option("--out", out_path, "output path (default: stdout)");
    };

    auto* curve = app.add_subcommand("curve", "sample K(R), dK/dR and Q_out over [0, r_stop]");
    add_common(curve);
    curve->add_option("--r-stop", r_stop, "end of the reflectance grid (default 0.999)");
    curve->add_option("--points", points, "number of grid points (default 512)");
    curve->add_option("--format", format,
                      "csv (default; with --out, extrema go to a .extrema.json sidecar) or json");

    auto* classify = app.add_subcommand("classify", "transformability and nonclassicality report");
    add_common(classify);
    classify->add_option("--r-stop", r_stop, "extrema scan endpoint (default 0.999)");

    auto* limits = app.add_subcommand("limits", "K and dK/dR in the R -> 1 limit");
    add_common(limits);

    auto* detector_curve =
        app.add_subcommand("detector-curve", "K_exp, K_click and K_dark over [0, r_stop]");
    add_common(detector_curve);
    detector_curve->add_option("--detector", detector_arg, "detector model as inline JSON or @file")
        ->required();
    detector_curve->add_option("--r-stop", r_stop, "end of the reflectance grid (default 0.999)");
    detector_curve->add_option("--points", points, "number of grid points (default 512)");
    detector_curve->add_option("--format", format, "csv (default) or json");

    std::string family_arg = "dsq";
    std::string grid1_arg;
    std::string grid2_arg;
    auto* scan = app.add_subcommand("scan", "classify a dsq/ccs parameter grid");
    scan->add_option("--family", family_arg, "dsq or ccs")->required();
    scan->add_option("--grid1", grid1_arg, "z/lambda grid as lo:hi:count (defaults per family)");
    scan->add_option("--grid2", grid2_arg, "r/alpha grid as lo:hi:count (defaults per family)");
    scan->add_option("--r-stop", r_stop, "extrema scan endpoint (default 0.999)");
    scan->add_option("--out", out_path, "output path (default: stdout)");
    scan->add_option("--format", format, "csv (default) or json");

    std::string criterion_arg;
    std::string axis_arg;
    std::string range_arg;
    double fixed_other = 0.0;
    std::size_t probes = 256;
    auto* boundary = app.add_subcommand("boundary", "trace a criterion boundary along one axis");
    boundary->add_option("--family", family_arg, "dsq or ccs")->required();
    boundary
        ->add_option("--criterion", criterion_arg, "q_in_zero, klyshko, has_min or has_max")
        ->required();
    boundary->add_option("--axis", axis_arg, "parameter to vary: z, r, lambda or alpha")->required();
    boundary->add_option("--range", range_arg, "search interval as lo:hi")->required();
    boundary->add_option("--fixed", fixed_other, "value of the other parameter")->required();
    boundary->add_option("--probes", probes, "coarse probe count (default 256)");
    boundary->add_option("--r-stop", r_stop, "extrema scan endpoint (default 0.999)");
    boundary->add_option("--out", out_path, "output path (default: stdout)");

    std::uint64_t shots = 1'000'000;
    std::uint64_t seed = 0;
    std::uint32_t partitions = 1;
    double reflectance = 0.5;
    auto* mc = app.add_subcommand("mc", "Monte-Carlo estimate of the click-ratio K");
    mc->add_option("--config", config_arg, "full experiment config as inline JSON or @file");
    mc->add_option("--state", state_arg, "state spec (alternative to --config)");
    mc->add_option("--detector", detector_arg, "detector model JSON");
    mc->add_option("--reflectance", reflectance, "beamsplitter reflectance");
    mc->add_option("--shots", shots, "number of shots (default 1e6)");
    mc->add_option("--seed", seed, "PRNG seed (default 0)");
    mc->add_option("--partitions", partitions, "worker substreams (default 1)");
    mc->add_option("--out", out_path, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const Truncation trunc = truncation_from_env();

    if (curve->parsed()) {
        const PhotonNumberDistribution dist = build_state(parse_state(state_arg), trunc);
        const AttenuationCurve sampled = sample_curve(dist, r_stop, points);
        if (format == "json") {
            json doc = {{"R", sampled.r_grid},
                        {"K", sampled.k_values},
                        {"dKdR", sampled.dkdr_values},
                        {"Qout", sampled.q_out_values}};
            doc["extrema"] = extrema_to_json(sampled.extrema)["extrema"];
            write_output(out_path, dump(doc), out);
        } else if (format == "csv") {
            write_output(out_path, curve_to_csv(sampled), out);
            if (!out_path.empty()) {
                write_output(out_path + ".extrema.json", dump(extrema_to_json(sampled.extrema)),
                             out);
            }
        } else {
            throw std::invalid_argument("format must be csv or json");
        }
        return 0;
    }

    if (classify->parsed()) {
        const StateSpec spec = parse_state(state_arg);
        const PhotonNumberDistribution dist = build_state(spec, trunc);
        nlohmann::json doc = to_json(zps::classify(dist, r_stop));
        doc["state"] = to_json(spec);
        write_output(out_path, dump(doc), out);
        return 0;
    }

    if (limits->parsed()) {
        const PhotonNumberDistribution dist = build_state(parse_state(state_arg), trunc);
        const json doc = {{"K_limit", to_json(k_limit_r1(dist))},
                          {"dKdR_limit", to_json(dkdr_limit_r1(dist))}};
        write_output(out_path, dump(doc), out);
        return 0;
    }

    if (detector_curve->parsed()) {
        if (points < 2) {
            throw std::invalid_argument("detector-curve needs at least two grid points");
        }
        const PhotonNumberDistribution dist = build_state(parse_state(state_arg), trunc);
        const DetectorModel model = detector_model_from_json(json_argument(detector_arg));
        std::string csv = "R,K_exp,K_click,K_dark\n";
        json cols = {{"R", json::array()},
                     {"K_exp", json::array()},
                     {"K_click", json::array()},
                     {"K_dark", json::array()}};
        for (std::size_t i = 0; i < points; ++i) {
            const double r = r_stop * double(i) / double(points - 1);
            const double kexp = k_exp(dist, r, model.eta1);
            const double kclick = k_click(dist, r, model).value;
            const double kdark = k_dark(dist, r, model);
            csv += format_double(r);
            csv += ',';
            csv += format_double(kexp);
            csv += ',';
            csv += format_double(kclick);
            csv += ',';
            csv += format_double(kdark);
            csv += '\n';
            cols["R"].push_back(r);
            cols["K_exp"].push_back(kexp);
            cols["K_click"].push_back(kclick);
            cols["K_dark"].push_back(kdark);
        }
        if (format == "json") {
            write_output(out_path, dump(cols), out);
        } else if (format == "csv") {
            write_output(out_path, csv, out);
        } else {
            throw std::invalid_argument("format must be csv or json");
        }
        return 0;
    }

    if (scan->parsed()) {
        const StateFamily family = family_arg == "dsq"   ? StateFamily::dsq
                                   : family_arg == "ccs" ? StateFamily::ccs
                                                         : throw std::invalid_argument(
                                                               "family must be dsq or ccs");
        ScanOptions opts;
        opts.r_stop = r_stop;
        opts.truncation = trunc;
        std::vector<double> grid1;
        std::vector<double> grid2;
        if (family == StateFamily::dsq) {
            grid1 = grid1_arg.empty() ? linear_grid(0.0, 2.5, 101) : parse_grid(grid1_arg);
            grid2 = grid2_arg.empty() ? linear_grid(0.0, 2.5, 101) : parse_grid(grid2_arg);
        } else {
            grid1 = grid1_arg.empty() ? linear_grid(0.01, 0.95, 101) : parse_grid(grid1_arg);
            grid2 = grid2_arg.empty() ? linear_grid(0.1, 5.0, 101) : parse_grid(grid2_arg);
        }
        const RegionScan result = scan_family(family, std::move(grid1), std::move(grid2), opts);
        if (format == "json") {
            json cells = json::array();
            for (std::size_t i1 = 0; i1 < result.grid1.size(); ++i1) {
                for (std::size_t i2 = 0; i2 < result.grid2.size(); ++i2) {
                    const CellClass& cell = result.at(i1, i2);
                    cells.push_back({{result.axis1, result.grid1[i1]},
                                     {result.axis2, result.grid2[i2]},
                                     {"qsign", !cell.error.empty()           ? "error"
                                               : cell.q_sign == QSign::super ? "super"
                                               : cell.q_sign == QSign::sub   ? "sub"
                                                                             : "poissonian"},
                                     {"has_min", cell.has_min},
                                     {"has_max", cell.has_max},
                                     {"klyshko", cell.klyshko}});
                }
            }
            write_output(out_path, dump({{"family", family_arg}, {"cells", cells}}), out);
        } else if (format == "csv") {
            write_output(out_path, region_scan_to_csv(result), out);
        } else {
            throw std::invalid_argument("format must be csv or json");
        }
        return 0;
    }

    if (boundary->parsed()) {
        const StateFamily family = family_arg == "dsq"   ? StateFamily::dsq
                                   : family_arg == "ccs" ? StateFamily::ccs
                                                         : throw std::invalid_argument(
                                                               "family must be dsq or ccs");
        BoundaryCriterion criterion = BoundaryCriterion::q_in_zero;
        if (criterion_arg == "q_in_zero") {
            criterion = BoundaryCriterion::q_in_zero;
        } else if (criterion_arg == "klyshko") {
            criterion = BoundaryCriterion::klyshko;
        } else if (criterion_arg == "has_min") {
            criterion = BoundaryCriterion::has_min;
        } else if (criterion_arg == "has_max") {
            criterion = BoundaryCriterion::has_max;
        } else {
            throw std::invalid_argument("criterion must be q_in_zero, klyshko, has_min or has_max");
        }
        int axis = -1;
        if (family == StateFamily::dsq) {
            axis = axis_arg == "z" ? 0 : axis_arg == "r" ? 1 : -1;
        } else {
            axis = axis_arg == "lambda" ? 0 : axis_arg == "alpha" ? 1 : -1;
        }
        if (axis < 0) {
            throw std::invalid_argument("axis must name a parameter of the chosen family");
        }
        const auto [lo, hi] = parse_range(range_arg);
        ScanOptions opts;
        opts.r_stop = r_stop;
        opts.truncation = trunc;
        const BoundaryTrace trace =
            trace_boundary(family, criterion, axis, lo, hi, fixed_other, opts, probes);
        json doc = {{"family", family_arg}, {"criterion", criterion_arg}, {"axis", axis_arg},
                    {"fixed", fixed_other}, {"points", trace.points}};
        if (!trace.note.empty()) {
            doc["note"] = trace.note;
        }
        write_output(out_path, dump(doc), out);
        return 0;
    }

    if (mc->parsed()) {
        ExperimentConfig config;
        if (!config_arg.empty() && !state_arg.empty()) {
            throw std::invalid_argument("mc takes exactly one state source: --config or --state");
        }
        if (!config_arg.empty()) {
            config = experiment_config_from_json(json_argument(config_arg));
        } else {
            if (state_arg.empty()) {
                throw std::invalid_argument("mc needs --config or --state");
            }
            config.state = parse_state(state_arg);
            if (!detector_arg.empty()) {
                config.detectors = detector_model_from_json(json_argument(detector_arg));
            }
            config.reflectance = reflectance;
            config.shots = shots;
            config.seed = seed;
            config.partitions = partitions;
        }
        config.truncation = trunc;
        nlohmann::json doc = to_json(run_experiment(config));
        doc["config"] = to_json(config);
        write_output(out_path, dump(doc), out);
        return 0;
    }

    return 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(argc, argv, out, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::ios_base::failure& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace zps
