#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "test_support.hpp"
#include "zps/states.hpp"
#include "zps/witness.hpp"

using namespace zps;
using zps::testing::counterexample_state;
using zps::testing::intro_state;
using zps::testing::tilted_state;

TEST_CASE("classical bounds") {
    SUBCASE("coherent saturates both without violating") {
        const auto check = check_classical_bounds(make_coherent(3.0), 0.99);
        CHECK(!check.slope_violation);
        CHECK(!check.magnitude_violation);
    }
    SUBCASE("thermal stays below both bounds") {
        const auto check = check_classical_bounds(make_thermal(3.0), 0.99);
        CHECK(!check.slope_violation);
        CHECK(!check.magnitude_violation);
    }
    SUBCASE("bright coherent state survives the near-R=1 cancellation") {
        // the dK/dR numerator cancels to rounding noise here; the deadbanded
        // sign must not read it as a violation even at r_stop = 0.999
        const auto check = check_classical_bounds(make_coherent(10.0), 0.999);
        CHECK(!check.slope_violation);
        CHECK(!check.magnitude_violation);
    }
    SUBCASE("intro state violates both") {
        const auto check = check_classical_bounds(intro_state(), 0.999);
        CHECK(check.slope_violation);
        CHECK(check.magnitude_violation);
        REQUIRE(check.slope_witness_r.has_value());
        REQUIRE(check.magnitude_witness_r.has_value());
        // slope turns positive just past the minimum, well before K exceeds 1
        CHECK(*check.slope_witness_r < *check.magnitude_witness_r);
    }
    SUBCASE("sub-Poissonian input guarantees a slope violation") {
        for (const auto& [name, dist] : zps::testing::state_battery()) {
            const auto m = moments(dist);
            if (!m.mandel_q || *m.mandel_q >= -1e-10) {
                continue;
            }
            INFO(name);
            CHECK(check_classical_bounds(dist, 0.99).slope_violation);
        }
    }
    SUBCASE("a magnitude violation implies an earlier slope violation") {
        for (const auto& [name, dist] : zps::testing::state_battery()) {
            INFO(name);
            const auto check = check_classical_bounds(dist, 0.999);
            if (check.magnitude_violation) {
                CHECK(check.slope_violation);
                CHECK(*check.slope_witness_r <= *check.magnitude_witness_r);
            }
        }
    }
    CHECK_THROWS_AS(check_classical_bounds(make_fock(0), 0.9), std::invalid_argument);
}

TEST_CASE("lee criterion") {
    CHECK(lee(intro_state()));
    CHECK(!lee(make_coherent(1.0)));
    CHECK(!lee(counterexample_state()));
    CHECK(lee(make_fock(3)));
}

TEST_CASE("klyshko criterion") {
    SUBCASE("coherent sits exactly on the boundary") {
        // 2 p_0 p_2 = p_1^2 for a Poissonian; the strict inequality fails
        CHECK(!klyshko(make_coherent(1.0)));
    }
    CHECK(klyshko(make_ccs(0.3, 1.0)));
    CHECK(!klyshko(make_thermal(2.0)));
    CHECK(klyshko(make_dsq(1.0, 1.0)));
    SUBCASE("alpha-independent for catalyzed coherent states") {
        for (double lambda : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
            const bool reference = klyshko(make_ccs(lambda, 0.5));
            for (double alpha : {1.0, 2.0, 4.0}) {
                CHECK(klyshko(make_ccs(lambda, alpha)) == reference);
            }
        }
    }
}

TEST_CASE("transformability prediction") {
    SUBCASE("intro state fires all three criteria") {
        const auto report = predict_transformable(intro_state());
        CHECK(report.q_in == doctest::Approx(1.0 / 3.0));
        CHECK(!report.initially_sub);
        CHECK(report.lee);
        CHECK(report.mean_ratio);
        CHECK(report.klyshko);
        CHECK(report.predicted_transformable);
        CHECK(report.limit_k.kind == LimitValue::Kind::divergent);
    }
    SUBCASE("thermal fires none") {
        const auto report = predict_transformable(make_thermal(3.0));
        CHECK(!report.lee);
        CHECK(!report.mean_ratio);
        CHECK(!report.klyshko);
        CHECK(!report.predicted_transformable);
    }
    SUBCASE("the 0-2-6 mixture is a false negative") {
        const auto report = predict_transformable(counterexample_state());
        CHECK(report.q_in == doctest::Approx(0.16));
        CHECK(!report.predicted_transformable);
    }
    SUBCASE("sub-Poissonian inputs use the reversed inequalities") {
        // p_0 = 0 forces both reversed inequalities false for the 1:9 state
        const auto report = predict_transformable(tilted_state());
        CHECK(report.initially_sub);
        CHECK(!report.mean_ratio);
        CHECK(!report.klyshko);
        CHECK(!report.predicted_transformable);
    }
    SUBCASE("Fock states never predict") {
        CHECK(!predict_transformable(make_fock(5)).predicted_transformable);
    }
    SUBCASE("Poissonian band makes no prediction") {
        CHECK(!predict_transformable(make_coherent(2.0)).predicted_transformable);
    }
    CHECK_THROWS_AS(predict_transformable(make_fock(0)), std::invalid_argument);
}

TEST_CASE("classify") {
    SUBCASE("1:9 state: sub in, two transformations, slope violation") {
        const auto report = classify(tilted_state(), 0.999);
        CHECK(report.initially_sub);
        REQUIRE(report.observed_extrema.size() == 2);
        CHECK(report.observed_extrema[0].kind == Extremum::Kind::maximum);
        CHECK(report.observed_extrema[1].kind == Extremum::Kind::minimum);
        CHECK(report.nonclassical_by_slope);
    }
    SUBCASE("displaced squeezed (1,1): super in, one minimum, klyshko") {
        const auto report = classify(make_dsq(1.0, 1.0), 0.999);
        CHECK(report.q_in > 0.0);
        CHECK(report.klyshko);
        CHECK(report.predicted_transformable);
        REQUIRE(report.observed_extrema.size() == 1);
        CHECK(report.observed_extrema[0].kind == Extremum::Kind::minimum);
    }
    SUBCASE("coherent: everything false and empty") {
        const auto report = classify(make_coherent(3.0), 0.99);
        CHECK(!report.predicted_transformable);
        CHECK(report.observed_extrema.empty());
        CHECK(!report.nonclassical_by_slope);
        CHECK(!report.nonclassical_by_magnitude);
    }
    SUBCASE("short scan domains skip the consistency enforcement") {
        const auto report = classify(intro_state(), 0.2);
        CHECK(report.predicted_transformable);
        CHECK(report.observed_extrema.empty());
    }
}

TEST_CASE("prediction soundness on random distributions") {
    std::mt19937_64 rng(20240817);
    std::uniform_int_distribution<int> support(2, 13);
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    std::uniform_real_distribution<double> keep(0.0, 1.0);
    int predicted_count = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> probs(std::size_t(support(rng)));
        for (double& p : probs) {
            p = keep(rng) < 0.25 ? 0.0 : weight(rng);
        }
        probs[0] = keep(rng) < 0.5 ? 0.0 : probs[0];
        double sum = 0.0;
        for (double p : probs) {
            sum += p;
        }
        if (sum <= 0.0 || moments(make_custom(probs)).mean <= 0.0) {
            continue;
        }
        const auto dist = make_custom(probs);
        const auto report = predict_transformable(dist);
        if (report.predicted_transformable) {
            ++predicted_count;
            CHECK(!find_extrema(dist, 0.999).empty());
        }
    }
    // the generator must actually exercise the predicted branch
    CHECK(predicted_count > 100);
}
