#pragma once

#include <cstdint>
#include <string>

#include "zps/detectors.hpp"
#include "zps/states.hpp"

namespace zps {

/// A heralded-attenuation experiment: photon numbers drawn from the input
/// state, split at a beamsplitter of reflectance R, thinned by the detector
/// efficiencies, with dark counts at the output detector.
struct ExperimentConfig {
    StateSpec state;
    double reflectance = 0.0;
    DetectorModel detectors;
    std::uint64_t shots = 1;
    std::uint64_t seed = 0;
    /// Worker substreams; the result is deterministic for a fixed
    /// (seed, partitions) pair and independent of scheduling.
    std::uint32_t partitions = 1;
    Truncation truncation;
};

struct EstimateResult {
    double k_estimate = 0.0;
    double std_error = 0.0;
    double herald_rate = 0.0;
    std::uint64_t shots = 0;
    std::uint64_t herald_no_click = 0;    // shots with no click at the heralding detector
    std::uint64_t output_clicks = 0;      // shots with a click at the output detector
    std::uint64_t conditioned_clicks = 0; // shots with both: no herald click and an output click
    /// False when no unconditional output click occurred, leaving the ratio
    /// estimator undefined.
    bool defined = false;
    std::uint32_t partitions = 1;
    std::string prng = "mt19937_64+splitmix64";
};

/// Run the experiment. k_estimate is the conditional output-click rate over
/// the unconditional one; std_error comes from the delta method for this
/// ratio of correlated per-shot indicators (see mc.cpp for the formula).
EstimateResult run_experiment(const ExperimentConfig& config);

struct ConvergenceResult {
    bool converged = false;
    std::string reason;
};

/// True iff |k_estimate - analytic| ≤ 4·std_error. Note that below a few
/// thousand shots the interval is wide enough to accept almost anything.
ConvergenceResult convergence_check(const ExperimentConfig& config, double analytic);

}  // namespace zps
