#pragma once

#include "zps/distribution.hpp"

namespace zps {

struct DetectorModel {
    double eta1 = 1.0;   // heralding-arm effective efficiency
    double eta2 = 1.0;   // output-arm effective efficiency
    double dark2 = 0.0;  // dark-count probability per trial at the output detector
    bool pnr = true;     // whether the output detector resolves photon number
};

/// P(no click at the heralding detector) = Σ p_n (1 - R·η₁)ⁿ. This is the
/// herald success probability of the conditioned source.
double herald_success_prob(const PhotonNumberDistribution& dist, double reflectance, double eta1);

/// P(click at the output detector) = 1 - Σ p_n (1 - T·η₂)ⁿ, T = 1-R.
double prob_click_out(const PhotonNumberDistribution& dist, double reflectance, double eta2);

/// Joint no-click probability P(NC₁ ∧ NC₂) = Σ p_n (1 - R·η₁ - T·η₂)ⁿ: per
/// photon, detection at either arm removes it from the no-click event. All
/// detector formulas below reduce to this trinomial kernel.
double prob_no_click_joint(const PhotonNumberDistribution& dist, double reflectance, double eta1,
                           double eta2);

/// Relative attenuation seen with an inefficient heralding detector:
/// K_exp(R) = K_ideal(R·η₁). Requires R·η₁ < 1.
double k_exp(const PhotonNumberDistribution& dist, double reflectance, double eta1);

struct KClickValue {
    double value = 0.0;
    /// Set when η₂ = 0 forced the analytic limit K_exp(R) instead of the
    /// 0/0 click ratio.
    bool eta2_limit = false;
};

/// Click-probability analogue of K for a non-photon-number-resolving output
/// detector: K_click = P(C₂|NC₁) / P(C₂). Approaches K_exp as η₂ → 0.
KClickValue k_click(const PhotonNumberDistribution& dist, double reflectance,
                    const DetectorModel& model);

/// K_click with output-detector dark counts, exact form:
/// (P(C₂|NC₁) + d·P(NC₂|NC₁)) / (P(C₂) + d·P(NC₂)).
double k_dark(const PhotonNumberDistribution& dist, double reflectance, const DetectorModel& model);

/// Low-rate approximation (P(C₂|NC₁) + d) / (P(C₂) + d), valid when a
/// simultaneous dark and true count is negligible. Subtracting d from both
/// numerator and denominator recovers K_click.
double k_dark_approx(const PhotonNumberDistribution& dist, double reflectance,
                     const DetectorModel& model);

}  // namespace zps
