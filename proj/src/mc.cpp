#include "zps/mc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace zps {
namespace {

/// SplitMix64 step; used only to derive decorrelated worker seeds.
std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits; avoids the
/// implementation-defined std::uniform_real_distribution so runs are
/// bit-exact across platforms.
double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

struct Counts {
    std::uint64_t shots = 0;
    std::uint64_t herald_no_click = 0;
    std::uint64_t output_clicks = 0;
    std::uint64_t conditioned_clicks = 0;

    Counts& operator+=(const Counts& other) {
        shots += other.shots;
        herald_no_click += other.herald_no_click;
        output_clicks += other.output_clicks;
        conditioned_clicks += other.conditioned_clicks;
        return *this;
    }
};

Counts run_partition(const std::vector<double>& cdf, const ExperimentConfig& config,
                     std::uint64_t worker_seed, std::uint64_t shots) {
    std::mt19937_64 rng(worker_seed);
    const double reflect = config.reflectance;
    const double eta1 = config.detectors.eta1;
    const double eta2 = config.detectors.eta2;
    const double dark = config.detectors.dark2;

    Counts counts;
    counts.shots = shots;
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        const double u = uniform01(rng);
        const std::size_t n =
            std::size_t(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        bool herald_click = false;
        bool output_click = false;
        for (std::size_t photon = 0; photon < n; ++photon) {
            if (uniform01(rng) < reflect) {
                herald_click |= uniform01(rng) < eta1;
            } else {
                output_click |= uniform01(rng) < eta2;
            }
        }
        output_click |= uniform01(rng) < dark;
        if (!herald_click) {
            ++counts.herald_no_click;
            if (output_click) {
                ++counts.conditioned_clicks;
            }
        }
        if (output_click) {
            ++counts.output_clicks;
        }
    }
    return counts;
}

}  // namespace

EstimateResult run_experiment(const ExperimentConfig& config) {
    if (config.shots < 1) {
        throw std::invalid_argument("experiment needs at least one shot");
    }
    if (config.partitions < 1) {
        throw std::invalid_argument("experiment needs at least one partition");
    }
    if (!(config.reflectance >= 0.0 && config.reflectance <= 1.0)) {
        throw std::invalid_argument("reflectance must lie in [0, 1]");
    }
    for (double eta : {config.detectors.eta1, config.detectors.eta2}) {
        if (!(eta >= 0.0 && eta <= 1.0)) {
            throw std::invalid_argument("detector efficiencies must lie in [0, 1]");
        }
    }
    if (!(config.detectors.dark2 >= 0.0 && config.detectors.dark2 < 1.0)) {
        throw std::invalid_argument("dark-count probability must lie in [0, 1)");
    }

    const PhotonNumberDistribution dist = build_state(config.state, config.truncation);
    std::vector<double> cdf(dist.probs().begin(), dist.probs().end());
    for (std::size_t n = 1; n < cdf.size(); ++n) {
        cdf[n] += cdf[n - 1];
    }
    cdf.back() = 1.0;

    // Even split of shots across workers; worker seeds from a SplitMix64
    // stream so the merge over counts is order-independent.
    std::uint64_t seed_state = config.seed;
    const std::uint32_t workers = config.partitions;
    std::vector<std::uint64_t> worker_seeds(workers);
    for (auto& s : worker_seeds) {
        s = splitmix64(seed_state);
    }
    std::vector<std::uint64_t> worker_shots(workers, config.shots / workers);
    for (std::uint64_t i = 0; i < config.shots % workers; ++i) {
        ++worker_shots[i];
    }

    std::vector<Counts> partials(workers);
    if (workers == 1) {
        partials[0] = run_partition(cdf, config, worker_seeds[0], worker_shots[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::uint32_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                partials[w] = run_partition(cdf, config, worker_seeds[w], worker_shots[w]);
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    Counts counts;
    for (const Counts& c : partials) {
        counts += c;
    }

    EstimateResult result;
    result.shots = counts.shots;
    result.herald_no_click = counts.herald_no_click;
    result.output_clicks = counts.output_clicks;
    result.conditioned_clicks = counts.conditioned_clicks;
    result.partitions = workers;
    result.herald_rate = double(counts.herald_no_click) / double(counts.shots);

    if (counts.output_clicks == 0 || counts.herald_no_click == 0) {
        result.defined = false;
        return result;
    }
    result.defined = true;

    const double s = double(counts.shots);
    const double a = double(counts.conditioned_clicks) / s;  // P(NC1 ∧ C2)
    const double h = double(counts.herald_no_click) / s;     // P(NC1)
    const double b = double(counts.output_clicks) / s;       // P(C2)
    result.k_estimate = a / (h * b);

    // Delta method for K = a/(h·b) with per-shot indicator covariances; the
    // events satisfy A ⊆ H, A ⊆ B and H ∩ B = A, which collapses the
    // covariance terms to
    //   Var(K)/K² = [ (1-a)/a - (1-h)/h - (1-b)/b + 2a/(h·b) - 2 ] / shots.
    // a is smoothed by half a count and the result floored so the reported
    // interval is never empty, even at zero conditioned clicks.
    const double a_s = std::max(a, 0.5 / s);
    const double rel_var =
        ((1.0 - a_s) / a_s - (1.0 - h) / h - (1.0 - b) / b + 2.0 * a_s / (h * b) - 2.0) / s;
    result.std_error = (a_s / (h * b)) * std::sqrt(std::max(rel_var, 1.0 / (s * s)));
    return result;
}

ConvergenceResult convergence_check(const ExperimentConfig& config, double analytic) {
    if (!std::isfinite(analytic)) {
        throw std::invalid_argument("analytic reference must be finite");
    }
    const EstimateResult result = run_experiment(config);
    if (!result.defined) {
        return {false, "estimate undefined: no unconditional output clicks"};
    }
    if (std::abs(result.k_estimate - analytic) <= 4.0 * result.std_error) {
        return {true, ""};
    }
    return {false, "estimate deviates from the analytic value by more than 4 standard errors"};
}

}  // namespace zps
