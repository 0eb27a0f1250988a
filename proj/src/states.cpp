#include "zps/states.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace zps {
namespace {

constexpr std::size_t kStopWindow = 8;

void require(bool ok, const char* message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

[[noreturn]] void throw_cap_exceeded(std::size_t cap) {
    throw std::length_error("photon-number truncation cap (" + std::to_string(cap) +
                            ") exceeded; state needs more Fock levels than allowed");
}

/// Stop rule for the adaptive upward accumulation of unnormalized terms u_n.
/// The series may contain exact interior zeros (parity of squeezed vacuum,
/// oscillation nodes of displaced squeezed states), so decisions are made on
/// a window of recent terms: stop once every (1+n²)-weighted term in the
/// window is far below tol·sum and the pairwise-geometric remainder estimate
/// is below tol·sum too. On success `tail_bound` holds the mass estimate.
bool can_stop(const std::vector<double>& u, double sum, double tol, std::size_t min_n,
              double& tail_bound) {
    const std::size_t n = u.size() - 1;
    if (n < min_n || n < kStopWindow + 2) {
        return false;
    }
    double weighted_max = 0.0;
    double ratio2_max = 0.0;
    bool ratio_defined = false;
    for (std::size_t k = n - kStopWindow + 1; k <= n; ++k) {
        weighted_max = std::max(weighted_max, (1.0 + double(k) * double(k)) * u[k]);
        if (u[k] > 0.0 && u[k - 2] > 0.0) {
            ratio2_max = std::max(ratio2_max, u[k] / u[k - 2]);
            ratio_defined = true;
        }
    }
    if (weighted_max > tol * 1e-4 * sum) {
        return false;
    }
    if (ratio_defined && ratio2_max >= 1.0) {
        return false;
    }
    const double rho2 = ratio_defined ? std::min(ratio2_max, 0.998) : 0.25;
    const double geom = rho2 / (1.0 - rho2);
    const double nn = double(n);
    const double mass_rem = 4.0 * (u[n] + u[n - 1]) * geom;
    const double weighted_rem =
        8.0 * ((1.0 + nn * nn) * u[n] + (1.0 + (nn - 1.0) * (nn - 1.0)) * u[n - 1]) * geom;
    if (weighted_rem > tol * sum) {
        return false;
    }
    tail_bound = std::min(mass_rem / sum, tol);
    return true;
}

PhotonNumberDistribution vacuum() {
    return PhotonNumberDistribution(std::vector<double>{1.0}, 0.0);
}

}  // namespace

PhotonNumberDistribution make_coherent(double mean_n, const Truncation& trunc) {
    require(mean_n >= 0.0 && std::isfinite(mean_n), "coherent state requires mean_n >= 0");
    require(trunc.tol > 0.0, "truncation tolerance must be positive");
    if (mean_n == 0.0) {
        return vacuum();
    }
    if (mean_n >= double(trunc.max_terms)) {
        throw_cap_exceeded(trunc.max_terms);
    }
    // Relative Poisson weights built outward from the mode; the downward pass
    // may underflow to zero far below the mode, which is harmless.
    const std::size_t mode = std::size_t(mean_n);
    std::vector<double> u(mode + 1);
    u[mode] = 1.0;
    for (std::size_t n = mode; n > 0; --n) {
        u[n - 1] = u[n] * double(n) / mean_n;
    }
    double sum = 0.0;
    for (double v : u) {
        sum += v;
    }
    const std::size_t min_n = std::size_t(2.0 * mean_n) + 40;
    double tail = 0.0;
    while (!can_stop(u, sum, trunc.tol, min_n, tail)) {
        const std::size_t n = u.size();
        if (n >= trunc.max_terms) {
            throw_cap_exceeded(trunc.max_terms);
        }
        u.push_back(u.back() * mean_n / double(n));
        sum += u.back();
    }
    return PhotonNumberDistribution(std::move(u), tail);
}

PhotonNumberDistribution make_fock(int n) {
    require(n >= 0, "Fock state requires n >= 0");
    require(n <= 1'000'000, "Fock index too large");
    std::vector<double> u(std::size_t(n) + 1, 0.0);
    u[std::size_t(n)] = 1.0;
    return PhotonNumberDistribution(std::move(u), 0.0);
}

PhotonNumberDistribution make_thermal(double nbar, const Truncation& trunc) {
    require(nbar >= 0.0 && std::isfinite(nbar), "thermal state requires nbar >= 0");
    require(trunc.tol > 0.0, "truncation tolerance must be positive");
    if (nbar == 0.0) {
        return vacuum();
    }
    const double q = nbar / (1.0 + nbar);
    std::vector<double> u{1.0};
    double sum = 1.0;
    const std::size_t min_n = std::size_t(2.0 * nbar) + 40;
    double tail = 0.0;
    while (!can_stop(u, sum, trunc.tol, min_n, tail)) {
        if (u.size() >= trunc.max_terms) {
            throw_cap_exceeded(trunc.max_terms);
        }
        u.push_back(u.back() * q);
        sum += u.back();
    }
    return PhotonNumberDistribution(std::move(u), tail);
}

PhotonNumberDistribution make_superposition(std::span<const SuperpositionTerm> terms) {
    require(!terms.empty(), "superposition requires at least one term");
    int max_n = 0;
    for (const auto& term : terms) {
        require(term.n >= 0, "superposition component index must be >= 0");
        require(term.n <= 1'000'000, "superposition component index too large");
        max_n = std::max(max_n, term.n);
    }
    std::vector<std::complex<double>> amps(std::size_t(max_n) + 1, 0.0);
    for (const auto& term : terms) {
        // amplitude may carry a sign, so std::polar (which requires a
        // non-negative magnitude) is not usable here
        amps[std::size_t(term.n)] +=
            term.amplitude * std::complex<double>(std::cos(term.phase), std::sin(term.phase));
    }
    std::vector<double> u(amps.size());
    double norm = 0.0;
    for (std::size_t n = 0; n < amps.size(); ++n) {
        u[n] = std::norm(amps[n]);
        norm += u[n];
    }
    if (norm <= 0.0) {
        throw std::invalid_argument("superposition amplitudes have zero norm");
    }
    return PhotonNumberDistribution(std::move(u), 0.0);
}

PhotonNumberDistribution make_ccs(double lambda, double alpha, const Truncation& trunc) {
    require(lambda >= 0.0 && lambda < 1.0, "catalyzed coherent state requires 0 <= lambda < 1");
    require(alpha >= 0.0 && std::isfinite(alpha), "catalyzed coherent state requires alpha >= 0");
    require(trunc.tol > 0.0, "truncation tolerance must be positive");
    if (ccs_normalization(lambda, alpha) <= 0.0) {
        // Cannot occur for valid inputs: the quadratic in alpha² has no
        // positive roots for lambda in [0,1).
        throw std::logic_error("catalyzed coherent state normalization is non-positive");
    }
    const double w = alpha * alpha * (1.0 - lambda);
    if (w == 0.0) {
        return vacuum();  // alpha = 0 heralds the vacuum
    }
    if (w >= double(trunc.max_terms)) {
        throw_cap_exceeded(trunc.max_terms);
    }
    auto factor = [lambda](std::size_t n) {
        const double f = lambda * double(n + 1) - 1.0;
        return f * f;
    };
    // Poisson(w) backbone outward from its mode, times the catalysis factor.
    const std::size_t mode = std::size_t(w);
    std::vector<double> backbone(mode + 1);
    backbone[mode] = 1.0;
    for (std::size_t n = mode; n > 0; --n) {
        backbone[n - 1] = backbone[n] * double(n) / w;
    }
    std::vector<double> u(mode + 1);
    double sum = 0.0;
    for (std::size_t n = 0; n <= mode; ++n) {
        u[n] = backbone[n] * factor(n);
        sum += u[n];
    }
    double b = backbone[mode];
    const std::size_t min_n = std::size_t(2.0 * w) + 40;
    double tail = 0.0;
    while (!can_stop(u, sum, trunc.tol, min_n, tail)) {
        const std::size_t n = u.size();
        if (n >= trunc.max_terms) {
            throw_cap_exceeded(trunc.max_terms);
        }
        b *= w / double(n);
        u.push_back(b * factor(n));
        sum += u.back();
    }
    return PhotonNumberDistribution(std::move(u), tail);
}

PhotonNumberDistribution make_dsq(double z, double r, const Truncation& trunc) {
    require(z >= 0.0 && std::isfinite(z), "displaced squeezed state requires z >= 0");
    require(r >= 0.0 && std::isfinite(r), "displaced squeezed state requires r >= 0");
    require(trunc.tol > 0.0, "truncation tolerance must be positive");
    if (r == 0.0) {
        return make_coherent(z * z, trunc);
    }
    const double mean = std::sinh(r) * std::sinh(r) + z * z;
    if (!(mean < double(trunc.max_terms))) {
        throw_cap_exceeded(trunc.max_terms);
    }
    const double lam = std::tanh(r) / 2.0;
    const double x = z * std::exp(r) / std::sqrt(std::sinh(2.0 * r));
    // Hermite-type recurrence on scaled amplitudes c_n = H_n(x)·sqrt(lam^n/n!);
    // p_n ∝ c_n². Iterates stay bounded for states that fit under the cap,
    // with a rescale guard for extreme displacements.
    std::vector<double> u;
    u.reserve(128);
    double c_prev = 1.0;
    double c_cur = 2.0 * x * std::sqrt(lam);
    u.push_back(c_prev * c_prev);
    u.push_back(c_cur * c_cur);
    double sum = u[0] + u[1];
    const std::size_t min_n = std::size_t(2.0 * mean) + 40;
    double tail = 0.0;
    while (!can_stop(u, sum, trunc.tol, min_n, tail)) {
        const std::size_t n = u.size() - 1;
        if (n + 1 >= trunc.max_terms) {
            throw_cap_exceeded(trunc.max_terms);
        }
        const double dn = double(n);
        const double c_next = 2.0 * x * std::sqrt(lam / (dn + 1.0)) * c_cur -
                              2.0 * lam * std::sqrt(dn / (dn + 1.0)) * c_prev;
        c_prev = c_cur;
        c_cur = c_next;
        u.push_back(c_cur * c_cur);
        sum += u.back();
        if (std::abs(c_cur) > 1e150) {
            constexpr double scale = 1e-150;
            c_prev *= scale;
            c_cur *= scale;
            sum = 0.0;
            for (double& v : u) {
                v *= scale * scale;
                sum += v;
            }
        }
    }
    return PhotonNumberDistribution(std::move(u), tail);
}

PhotonNumberDistribution make_custom(std::span<const double> probs) {
    require(!probs.empty(), "custom distribution requires at least one entry");
    return PhotonNumberDistribution(std::vector<double>(probs.begin(), probs.end()), 0.0);
}

double lambda_from_gain(double gain) {
    require(gain >= 1.0 && std::isfinite(gain), "OPA gain must satisfy g >= 1");
    return 1.0 - 1.0 / (gain * gain);
}

double ccs_normalization(double lambda, double alpha) {
    const double mu = alpha * alpha;
    return (1.0 - lambda) - mu * lambda * (2.0 - 3.0 * lambda) +
           mu * mu * lambda * lambda * (1.0 - lambda);
}

PhotonNumberDistribution build_state(const StateSpec& spec, const Truncation& trunc) {
    return std::visit(
        [&trunc](const auto& s) -> PhotonNumberDistribution {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CoherentSpec>) {
                return make_coherent(s.mean_n, trunc);
            } else if constexpr (std::is_same_v<T, FockSpec>) {
                return make_fock(s.n);
            } else if constexpr (std::is_same_v<T, ThermalSpec>) {
                return make_thermal(s.nbar, trunc);
            } else if constexpr (std::is_same_v<T, SuperpositionSpec>) {
                return make_superposition(s.terms);
            } else if constexpr (std::is_same_v<T, DsqSpec>) {
                return make_dsq(s.z, s.r, trunc);
            } else if constexpr (std::is_same_v<T, CcsSpec>) {
                return make_ccs(s.lambda, s.alpha, trunc);
            } else {
                return make_custom(s.probs);
            }
        },
        spec);
}

}  // namespace zps
