#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "zps/cli.hpp"
#include "zps/io.hpp"

using namespace zps;
using nlohmann::json;

namespace {

int run(std::initializer_list<std::string> args, std::string& out_text, std::string& err_text) {
    std::vector<std::string> storage{"zps"};
    storage.insert(storage.end(), args);
    std::vector<const char*> argv;
    argv.reserve(storage.size());
    for (const auto& s : storage) {
        argv.push_back(s.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(int(argv.size()), argv.data(), out, err);
    out_text = out.str();
    err_text = err.str();
    return code;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("state specs round-trip through JSON") {
    std::vector<StateSpec> specs = {
        CoherentSpec{2.5},
        FockSpec{4},
        ThermalSpec{1.25},
        DsqSpec{1.0, 0.75},
        CcsSpec{0.3, 1.5},
        CustomSpec{{0.04, 0.0, 0.48, 0.0, 0.0, 0.0, 0.48}},
    };
    SuperpositionSpec sup;
    sup.terms = {{1, 1.0, 0.0}, {5, 3.0, 0.5}};
    specs.push_back(sup);

    for (const StateSpec& spec : specs) {
        const json emitted = to_json(spec);
        const StateSpec reparsed = state_spec_from_json(emitted);
        CHECK(to_json(reparsed) == emitted);
        // the rebuilt state is identical, not merely close
        const auto a = build_state(spec);
        const auto b = build_state(reparsed);
        REQUIRE(a.n_max() == b.n_max());
        for (std::size_t n = 0; n <= a.n_max(); ++n) {
            CHECK(a[n] == b[n]);
        }
    }
}

TEST_CASE("random custom specs round-trip bit-exactly") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> weight(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        CustomSpec spec;
        spec.probs.resize(1 + rng() % 10);
        for (double& p : spec.probs) {
            p = weight(rng);
        }
        spec.probs[rng() % spec.probs.size()] += 0.1;
        const json emitted = to_json(StateSpec{spec});
        CHECK(to_json(state_spec_from_json(emitted)) == emitted);
    }
}

TEST_CASE("detector model JSON") {
    const DetectorModel model{0.8, 0.25, 0.001, false};
    const json j = to_json(model);
    const DetectorModel back = detector_model_from_json(j);
    CHECK(back.eta1 == model.eta1);
    CHECK(back.eta2 == model.eta2);
    CHECK(back.dark2 == model.dark2);
    CHECK(back.pnr == model.pnr);
    // omitted fields fall back to defaults
    const DetectorModel partial = detector_model_from_json(json{{"eta1", 0.5}});
    CHECK(partial.eta1 == 0.5);
    CHECK(partial.eta2 == 1.0);
}

TEST_CASE("experiment config JSON") {
    ExperimentConfig config;
    config.state = ThermalSpec{3.0};
    config.reflectance = 0.5;
    config.detectors = {0.9, 0.1, 0.001, false};
    config.shots = 12345;
    config.seed = 42;
    config.partitions = 2;
    const ExperimentConfig back = experiment_config_from_json(to_json(config));
    CHECK(back.reflectance == config.reflectance);
    CHECK(back.shots == config.shots);
    CHECK(back.seed == config.seed);
    CHECK(back.partitions == config.partitions);
    CHECK(to_json(back.state) == to_json(config.state));
}

TEST_CASE("custom distributions load from csv") {
    std::istringstream in("p_n\n0.04\n0\n0.48\n0\n0\n0\n0.48\n");
    const auto dist = custom_from_csv(in);
    CHECK(dist[0] == doctest::Approx(0.04));
    CHECK(dist[6] == doctest::Approx(0.48));

    std::istringstream bad_header("q_n\n0.5\n");
    CHECK_THROWS_AS(custom_from_csv(bad_header), std::invalid_argument);
    std::istringstream bad_row("p_n\n0.5\nabc\n");
    CHECK_THROWS_AS(custom_from_csv(bad_row), std::invalid_argument);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 16.0 / 17.0, 1e-300, 3.0, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("cli limits") {
    std::string out;
    std::string err;
    const int code = run({"limits", "--state", R"({"kind":"thermal","nbar":3})"}, out, err);
    REQUIRE(code == 0);
    const json doc = json::parse(out);
    CHECK(doc["K_limit"].get<double>() == doctest::Approx(0.25));
    CHECK(doc["dKdR_limit"].get<double>() == doctest::Approx(-0.1875));
}

TEST_CASE("cli curve writes csv plus extrema sidecar") {
    const auto path = temp_file("zps_test_curve.csv");
    std::string out;
    std::string err;
    const int code = run({"curve", "--state", R"({"kind":"superposition","terms":[[1,1],[5,1]]})",
                          "--points", "101", "--out", path.string()},
                         out, err);
    REQUIRE(code == 0);
    std::ifstream csv(path);
    std::string header;
    REQUIRE(std::getline(csv, header));
    CHECK(header == "R,K,dKdR,Qout");
    std::string line;
    std::string first;
    double best_k = 1e300;
    double best_r = 0.0;
    bool first_row = true;
    while (std::getline(csv, line)) {
        if (first_row) {
            first = line;
            first_row = false;
        }
        std::istringstream row(line);
        std::string r_text;
        std::string k_text;
        std::getline(row, r_text, ',');
        std::getline(row, k_text, ',');
        if (std::stod(k_text) < best_k) {
            best_k = std::stod(k_text);
            best_r = std::stod(r_text);
        }
    }
    CHECK(first.substr(0, 4) == "0,1,");  // K(0) = 1 exactly
    CHECK(std::abs(best_r - 0.43) < 0.01);

    const json sidecar = json::parse(std::ifstream(path.string() + ".extrema.json"));
    REQUIRE(sidecar["extrema"].size() == 1);
    CHECK(sidecar["extrema"][0]["kind"] == "min");
    CHECK(std::abs(sidecar["extrema"][0]["R"].get<double>() - 0.4300) < 1e-3);
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".extrema.json");
}

TEST_CASE("cli curve csv output is byte-stable across runs") {
    const auto path_a = temp_file("zps_curve_a.csv");
    const auto path_b = temp_file("zps_curve_b.csv");
    std::string out;
    std::string err;
    for (const auto& path : {path_a, path_b}) {
        REQUIRE(run({"curve", "--state", R"({"kind":"thermal","nbar":3})", "--points", "33",
                     "--out", path.string()},
                    out, err) == 0);
    }
    std::ostringstream a;
    a << std::ifstream(path_a).rdbuf();
    std::ostringstream b;
    b << std::ifstream(path_b).rdbuf();
    CHECK(a.str() == b.str());
    for (const auto& path : {path_a, path_b}) {
        std::filesystem::remove(path);
        std::filesystem::remove(path.string() + ".extrema.json");
    }
}

TEST_CASE("cli classify reports the ccs maximum") {
    std::string out;
    std::string err;
    const int code =
        run({"classify", "--state", R"({"kind":"ccs","lambda":0.75,"alpha":1})"}, out, err);
    REQUIRE(code == 0);
    const json doc = json::parse(out);
    CHECK(doc["has_max"] == true);
    CHECK(doc["has_min"] == false);
    CHECK(doc["initially_sub"] == true);
    CHECK(doc["limit_k"].is_number());
}

TEST_CASE("cli detector-curve") {
    std::string out;
    std::string err;
    const int code = run({"detector-curve", "--state", R"({"kind":"thermal","nbar":3})",
                          "--detector", R"({"eta1":0.9,"eta2":0.01,"dark2":0.0001,"pnr":false})",
                          "--points", "5", "--r-stop", "0.9"},
                         out, err);
    REQUIRE(code == 0);
    std::istringstream csv(out);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "R,K_exp,K_click,K_dark");
    int rows = 0;
    std::string line;
    while (std::getline(csv, line)) {
        ++rows;
    }
    CHECK(rows == 5);
}

TEST_CASE("cli scan and boundary") {
    std::string out;
    std::string err;
    int code = run({"scan", "--family", "ccs", "--grid1", "0.2:0.9:4", "--grid2", "1:4:2",
                    "--format", "json"},
                   out, err);
    REQUIRE(code == 0);
    const json scan = json::parse(out);
    CHECK(scan["cells"].size() == 8);

    code = run({"boundary", "--family", "ccs", "--criterion", "klyshko", "--axis", "lambda",
                "--range", "0.05:0.95", "--fixed", "1.0"},
               out, err);
    REQUIRE(code == 0);
    const json boundary = json::parse(out);
    REQUIRE(boundary["points"].size() == 2);
    CHECK(std::abs(boundary["points"][0].get<double>() - 0.3694) < 1e-3);
    CHECK(std::abs(boundary["points"][1].get<double>() - 0.7735) < 1e-3);
}

TEST_CASE("cli mc accepts a config file") {
    const auto path = temp_file("zps_mc_config.json");
    {
        std::ofstream config(path);
        config << R"({"state":{"kind":"coherent","mean_n":1.0},"reflectance":0.5,)"
               << R"("detector":{"eta1":0.8,"eta2":0.4,"dark2":0.01,"pnr":false},)"
               << R"("shots":20000,"seed":5})";
    }
    std::string out;
    std::string err;
    const int code = run({"mc", "--config", "@" + path.string()}, out, err);
    REQUIRE(code == 0);
    const json doc = json::parse(out);
    CHECK(doc["defined"] == true);
    CHECK(doc["counts"]["shots"] == 20000);
    CHECK(doc["prng"] == "mt19937_64+splitmix64");
    CHECK(std::abs(doc["k_estimate"].get<double>() - 1.0) <
          5.0 * doc["std_error"].get<double>());
    std::filesystem::remove(path);
}

TEST_CASE("cli error paths") {
    std::string out;
    std::string err;
    SUBCASE("unknown state kind exits 2 with a one-line diagnostic") {
        const int code = run({"limits", "--state", R"({"kind":"weird"})"}, out, err);
        CHECK(code == 2);
        CHECK(err.find("unknown state kind") != std::string::npos);
        CHECK(std::count(err.begin(), err.end(), '\n') == 1);
    }
    SUBCASE("out-of-range parameter exits 2") {
        const int code = run({"limits", "--state", R"({"kind":"ccs","lambda":1.5,"alpha":1})"},
                             out, err);
        CHECK(code == 2);
        CHECK(err.find("lambda") != std::string::npos);
    }
    SUBCASE("unwritable output path exits 3") {
        const int code = run({"curve", "--state", R"({"kind":"thermal","nbar":3})", "--out",
                              "/nonexistent-dir/foo.csv"},
                             out, err);
        CHECK(code == 3);
    }
    SUBCASE("missing state file exits 3") {
        const int code = run({"limits", "--state", "@/nonexistent-dir/state.json"}, out, err);
        CHECK(code == 3);
    }
    SUBCASE("mc rejects two state sources") {
        const int code = run({"mc", "--config", R"({"state":{"kind":"thermal","nbar":1},"reflectance":0.5})",
                              "--state", R"({"kind":"thermal","nbar":1})"},
                             out, err);
        CHECK(code == 2);
        CHECK(err.find("exactly one state source") != std::string::npos);
    }
    SUBCASE("vacuum state curve exits 2 naming the precondition") {
        const int code = run({"curve", "--state", R"({"kind":"fock","n":0})", "--format", "json"},
                             out, err);
        CHECK(code == 2);
        CHECK(err.find("zero-mean") != std::string::npos);
    }
}

TEST_CASE("cli curve without --out prints csv to stdout") {
    std::string out;
    std::string err;
    const int code =
        run({"curve", "--state", R"({"kind":"thermal","nbar":3})", "--points", "9"}, out, err);
    CHECK(code == 0);
    CHECK(out.substr(0, 15) == "R,K,dKdR,Qout\n0");
}

TEST_CASE("cli classify echoes a state that re-parses identically") {
    std::string out;
    std::string err;
    const std::string inline_state = R"({"kind":"superposition","terms":[[1,1.0],[5,3.0]]})";
    REQUIRE(run({"classify", "--state", inline_state}, out, err) == 0);
    const json doc = json::parse(out);
    REQUIRE(doc.contains("state"));
    const StateSpec reparsed = state_spec_from_json(doc["state"]);
    CHECK(to_json(reparsed) == doc["state"]);
    CHECK(to_json(reparsed) == to_json(state_spec_from_json(json::parse(inline_state))));
}

TEST_CASE("ZPS_MAX_NMAX overrides the truncation cap") {
    std::string out;
    std::string err;
    setenv("ZPS_MAX_NMAX", "16", 1);
    const int capped = run({"limits", "--state", R"({"kind":"thermal","nbar":50})"}, out, err);
    CHECK(capped == 2);
    CHECK(err.find("cap") != std::string::npos);
    setenv("ZPS_MAX_NMAX", "junk", 1);
    CHECK(run({"limits", "--state", R"({"kind":"thermal","nbar":1})"}, out, err) == 2);
    unsetenv("ZPS_MAX_NMAX");
    CHECK(run({"limits", "--state", R"({"kind":"thermal","nbar":50})"}, out, err) == 0);
}

TEST_CASE("cli state argument accepts a csv custom distribution") {
    const auto path = temp_file("zps_custom.csv");
    {
        std::ofstream csv(path);
        csv << "p_n\n0.04\n0\n0.48\n0\n0\n0\n0.48\n";
    }
    std::string out;
    std::string err;
    const int code = run({"classify", "--state", "@" + path.string()}, out, err);
    REQUIRE(code == 0);
    const json doc = json::parse(out);
    CHECK(doc["q_in"].get<double>() == doctest::Approx(0.16));
    CHECK(doc["predicted_transformable"] == false);
    CHECK(doc["observed_extrema"].size() == 2);
    std::filesystem::remove(path);
}
