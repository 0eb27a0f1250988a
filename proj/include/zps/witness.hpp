#pragma once

#include <optional>
#include <vector>

#include "zps/distribution.hpp"
#include "zps/engine.hpp"

namespace zps {

/// Classical states obey dK/dR ≤ 0 and K ≤ 1 for all R; a violation of
/// either certifies nonclassicality of the input.
struct ClassicalBoundsCheck {
    bool slope_violation = false;  // dK/dR > 0 somewhere
    std::optional<double> slope_witness_r;
    bool magnitude_violation = false;  // K > 1 somewhere
    std::optional<double> magnitude_witness_r;
};

ClassicalBoundsCheck check_classical_bounds(const PhotonNumberDistribution& dist, double r_stop,
                                            const ExtremaOptions& opts = {});

/// Zero vacuum probability certifies nonclassicality. Exact zeros by default;
/// a small epsilon can absorb rounding in measured distributions.
bool lee(const PhotonNumberDistribution& dist, double p0_epsilon = 0.0);

/// Strict inequality 2 p_0 p_2 < p_1².
bool klyshko(const PhotonNumberDistribution& dist);

struct TransformabilityReport {
    double q_in = 0.0;
    bool initially_sub = false;
    bool lee = false;        // p_0 = 0 (only predictive for super-Poissonian inputs)
    bool mean_ratio = false; // p_0⟨n⟩ < p_1, inequality reversed for sub-Poissonian inputs
    bool klyshko = false;    // 2 p_0 p_2 < p_1², inequality reversed for sub-Poissonian inputs
    LimitValue limit_k;
    LimitValue limit_dkdr;
    bool predicted_transformable = false;
    std::vector<Extremum> observed_extrema;
    bool nonclassical_by_slope = false;
    bool nonclassical_by_magnitude = false;
};

/// Transformability prediction from (p_0, p_1, p_2, ⟨n⟩) alone. Inside the
/// Poissonian band |Q_in| < 1e-10 no directional prediction is made (the
/// criterion fields then report the super-Poissonian-direction inequalities,
/// with predicted_transformable = false).
TransformabilityReport predict_transformable(const PhotonNumberDistribution& dist);

/// Full report: prediction plus the numeric extrema scan on (0, r_stop].
/// When r_stop ≥ 0.99, prediction ⇒ observation is enforced: a predicted
/// state with an empty scan is re-scanned at 4x grid density and a logic
/// error is raised if the extremum is still missing (the prediction criteria
/// compare R = 0 against R → 1, so a short scan domain cannot refute them;
/// no enforcement below 0.99).
TransformabilityReport classify(const PhotonNumberDistribution& dist, double r_stop,
                                const ExtremaOptions& opts = {});

}  // namespace zps
