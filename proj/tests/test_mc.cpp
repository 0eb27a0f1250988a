#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <utility>

#include "zps/detectors.hpp"
#include "zps/engine.hpp"
#include "zps/mc.hpp"

using namespace zps;

namespace {

ExperimentConfig thermal_config() {
    ExperimentConfig config;
    config.state = ThermalSpec{3.0};
    config.reflectance = 0.5;
    config.detectors = {1.0, 1e-3, 0.0, false};
    config.shots = 200'000;
    config.seed = 7;
    return config;
}

}  // namespace

TEST_CASE("fixed seed gives identical results") {
    const ExperimentConfig config = thermal_config();
    const EstimateResult a = run_experiment(config);
    const EstimateResult b = run_experiment(config);
    CHECK(a.k_estimate == b.k_estimate);
    CHECK(a.std_error == b.std_error);
    CHECK(a.herald_rate == b.herald_rate);
    CHECK(a.herald_no_click == b.herald_no_click);
    CHECK(a.output_clicks == b.output_clicks);
    CHECK(a.conditioned_clicks == b.conditioned_clicks);
    CHECK(a.prng == "mt19937_64+splitmix64");
}

TEST_CASE("partitioned runs are deterministic and account for every shot") {
    ExperimentConfig config = thermal_config();
    config.shots = 100'003;  // odd count exercises the uneven split
    config.partitions = 4;
    const EstimateResult a = run_experiment(config);
    const EstimateResult b = run_experiment(config);
    CHECK(a.k_estimate == b.k_estimate);
    CHECK(a.conditioned_clicks == b.conditioned_clicks);
    CHECK(a.shots == config.shots);
    CHECK(a.partitions == 4);
    CHECK(a.herald_no_click <= a.shots);
    CHECK(a.conditioned_clicks <= a.herald_no_click);
    CHECK(a.output_clicks <= a.shots);
}

TEST_CASE("coherent input estimates K = 1") {
    ExperimentConfig config;
    config.state = CoherentSpec{1.0};
    config.reflectance = 0.5;
    config.detectors = {0.8, 0.4, 0.01, false};
    config.shots = 500'000;
    config.seed = 1;
    const EstimateResult result = run_experiment(config);
    REQUIRE(result.defined);
    CHECK(std::abs(result.k_estimate - 1.0) <= 3.0 * result.std_error);
}

TEST_CASE("thermal input approaches the small-eta2 analytic value") {
    const EstimateResult result = run_experiment(thermal_config());
    REQUIRE(result.defined);
    // analytic K(eta1 R) = 0.4 up to an O(eta2) correction
    CHECK(std::abs(result.k_estimate - 0.4) <= 4.0 * result.std_error + 1e-3);
}

TEST_CASE("dark counts dominate a near-vacuum input") {
    ExperimentConfig config;
    config.state = CoherentSpec{0.01};
    config.reflectance = 0.5;
    config.detectors = {1.0, 0.5, 0.5, false};
    config.shots = 200'000;
    config.seed = 11;
    const EstimateResult result = run_experiment(config);
    REQUIRE(result.defined);
    CHECK(std::abs(result.k_estimate - 1.0) <= 4.0 * result.std_error);
}

TEST_CASE("herald rate matches the no-click sum") {
    ExperimentConfig config;
    config.state = CcsSpec{0.3, 1.0};
    config.reflectance = 0.6;
    config.detectors = {0.75, 0.2, 0.001, false};
    config.shots = 200'000;
    config.seed = 3;
    const EstimateResult result = run_experiment(config);
    const auto dist = build_state(config.state);
    const double expected = herald_success_prob(dist, config.reflectance, config.detectors.eta1);
    const double herald_se =
        std::sqrt(expected * (1.0 - expected) / double(config.shots));
    CHECK(std::abs(result.herald_rate - expected) <= 4.0 * herald_se);
}

TEST_CASE("convergence_check against the analytic detector model") {
    SUBCASE("agreement across a small battery") {
        int checked = 0;
        for (const auto& [spec, r] :
             std::initializer_list<std::pair<StateSpec, double>>{{ThermalSpec{3.0}, 0.5},
                                                                 {CoherentSpec{2.0}, 0.3},
                                                                 {CcsSpec{0.3, 1.0}, 0.6},
                                                                 {DsqSpec{1.0, 1.0}, 0.4}}) {
            ExperimentConfig config;
            config.state = spec;
            config.reflectance = r;
            config.detectors = {0.9, 0.25, 0.002, false};
            config.shots = 200'000;
            config.seed = 17 + checked;
            const auto dist = build_state(config.state);
            const double analytic = k_dark(dist, r, config.detectors);
            const auto outcome = convergence_check(config, analytic);
            INFO(outcome.reason);
            CHECK(outcome.converged);
            ++checked;
        }
        CHECK(checked == 4);
    }
    SUBCASE("a deliberately mismatched reference fails") {
        ExperimentConfig config = thermal_config();
        config.shots = 1'000'000;
        const auto dist = build_state(config.state);
        const double analytic_wrong = k_click(dist, 0.9, config.detectors).value;
        const auto outcome = convergence_check(config, analytic_wrong);
        CHECK(!outcome.converged);
        CHECK(!outcome.reason.empty());
    }
    SUBCASE("ten shots accept almost anything") {
        ExperimentConfig config = thermal_config();
        config.shots = 10;
        config.seed = 23;
        const EstimateResult result = run_experiment(config);
        if (result.defined) {
            // the interval is enormous at this shot count; the check is
            // non-informative rather than wrong
            CHECK(result.std_error > 0.1);
        }
    }
    SUBCASE("undefined estimates report a reason") {
        ExperimentConfig config;
        config.state = FockSpec{3};
        config.reflectance = 0.0;
        config.detectors = {1.0, 0.0, 0.0, false};  // output arm never fires
        config.shots = 100;
        const auto outcome = convergence_check(config, 1.0);
        CHECK(!outcome.converged);
        CHECK(!outcome.reason.empty());
    }
    CHECK_THROWS_AS(convergence_check(thermal_config(), std::nan("")), std::invalid_argument);
}

TEST_CASE("standard error scales as 1/sqrt(shots)") {
    ExperimentConfig config;
    config.state = ThermalSpec{2.0};
    config.reflectance = 0.4;
    config.detectors = {0.9, 0.3, 0.001, false};
    double mean_se[3] = {0.0, 0.0, 0.0};
    const std::uint64_t shot_scale[3] = {10'000, 100'000, 1'000'000};
    for (int level = 0; level < 3; ++level) {
        config.shots = shot_scale[level];
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            config.seed = seed;
            mean_se[level] += run_experiment(config).std_error;
        }
        mean_se[level] /= 30.0;
    }
    const double expected_ratio = std::sqrt(10.0);
    CHECK(std::abs(mean_se[0] / mean_se[1] - expected_ratio) < 0.2 * expected_ratio);
    CHECK(std::abs(mean_se[1] / mean_se[2] - expected_ratio) < 0.2 * expected_ratio);
}

TEST_CASE("config validation") {
    ExperimentConfig config = thermal_config();
    config.shots = 0;
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
    config = thermal_config();
    config.reflectance = 1.5;
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
    config = thermal_config();
    config.detectors.dark2 = 1.0;
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
    config = thermal_config();
    config.partitions = 0;
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
}
