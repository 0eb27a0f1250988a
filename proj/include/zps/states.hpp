#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "zps/distribution.hpp"

namespace zps {

/// Adaptive truncation control for the state constructors. n_max is grown
/// until the estimated truncated mass (and its n²-weighted counterpart, so
/// that low-order moments stay accurate) drops below `tol`; exceeding
/// `max_terms` raises std::length_error.
struct Truncation {
    double tol = 1e-12;
    std::size_t max_terms = 4096;
};

struct CoherentSpec {
    double mean_n = 0.0;
};

struct FockSpec {
    int n = 0;
};

struct ThermalSpec {
    double nbar = 0.0;
};

/// One |n⟩ component of a pure superposition. Only |amplitude|² reaches any
/// downstream quantity, so the phase merely participates in coherent sums of
/// duplicate-n terms.
struct SuperpositionTerm {
    int n = 0;
    double amplitude = 0.0;
    double phase = 0.0;
};

struct SuperpositionSpec {
    std::vector<SuperpositionTerm> terms;
};

/// Displaced squeezed state, two-parameter gauge: equal quadrature variances,
/// opposite quadrature means (displacement magnitude z, squeezing r).
struct DsqSpec {
    double z = 0.0;
    double r = 0.0;
};

/// Catalyzed coherent state: coherent amplitude alpha mixed with a single
/// photon at a beamsplitter of reflectance lambda, heralded on one photon in
/// the auxiliary output.
struct CcsSpec {
    double lambda = 0.0;
    double alpha = 0.0;
};

struct CustomSpec {
    std::vector<double> probs;
};

using StateSpec =
    std::variant<CoherentSpec, FockSpec, ThermalSpec, SuperpositionSpec, DsqSpec, CcsSpec, CustomSpec>;

/// Poissonian distribution with the given mean.
PhotonNumberDistribution make_coherent(double mean_n, const Truncation& trunc = {});

/// Point mass at |n⟩.
PhotonNumberDistribution make_fock(int n);

/// Geometric (thermal) distribution with mean nbar.
PhotonNumberDistribution make_thermal(double nbar, const Truncation& trunc = {});

/// Normalized diagonal of a pure Fock superposition. Duplicate n entries are
/// summed coherently (amplitude·e^{i·phase}).
PhotonNumberDistribution make_superposition(std::span<const SuperpositionTerm> terms);

/// Catalyzed coherent state distribution
///   p_n ∝ e^{-w} (α²)ⁿ (1-Λ)^{n-1} (Λ(n+1) - 1)² / n!,  w = α²(1-Λ),
/// normalized by ccs_normalization(). Requires 0 ≤ Λ < 1, α ≥ 0.
PhotonNumberDistribution make_ccs(double lambda, double alpha, const Truncation& trunc = {});

/// Displaced squeezed state distribution in the equal-variance gauge:
///   p_n ∝ (tanh r / 2)ⁿ / n! · H_n(z eʳ/√(sinh 2r))²,
/// evaluated through a scaled three-term recurrence. r = 0 degenerates to a
/// coherent state of mean z². Mean photon number is sinh²r + z².
PhotonNumberDistribution make_dsq(double z, double r, const Truncation& trunc = {});

/// Normalized copy of an explicit probability list; tail_bound = 0.
PhotonNumberDistribution make_custom(std::span<const double> probs);

/// Catalysis parameter equivalent to an optical parametric amplifier of gain
/// g ≥ 1: Λ = 1 - 1/g².
double lambda_from_gain(double gain);

/// Analytic normalization sum of the unnormalized CCS terms:
///   N = (1-Λ) - α²Λ(2-3Λ) + α⁴Λ²(1-Λ).
/// Strictly positive for 0 ≤ Λ < 1, α ≥ 0.
double ccs_normalization(double lambda, double alpha);

/// Dispatch a StateSpec to the matching constructor.
PhotonNumberDistribution build_state(const StateSpec& spec, const Truncation& trunc = {});

}  // namespace zps
