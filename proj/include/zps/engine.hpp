#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "zps/distribution.hpp"

namespace zps {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
    /// variance/mean - 1; absent for the vacuum, where it is undefined.
    std::optional<double> mandel_q;
};

/// Exact moments of the truncated distribution.
Moments moments(const PhotonNumberDistribution& dist);

/// Zero-photon subtraction at beamsplitter reflectance R: the conditional
/// reweighting p_n → p_n Tⁿ / Σ p_k Tᵏ with T = 1-R. R = 1 is allowed only
/// when p_0 > 0 (otherwise the conditioning is degenerate).
PhotonNumberDistribution apply_zps(const PhotonNumberDistribution& dist, double reflectance);

/// Mean photon number of the heralded output, Σ p_n n Tⁿ / Σ p_n Tⁿ.
double n_out(const PhotonNumberDistribution& dist, double reflectance);

/// Relative attenuation K(R) = ⟨n⟩_out / ((1-R)·⟨n⟩_in). Equals 1 at R = 0 by
/// construction; requires 0 ≤ R < 1 and a non-vacuum input.
double k_of_r(const PhotonNumberDistribution& dist, double reflectance);

/// Mandel Q of the heralded output state (computed from the reweighted
/// distribution, independently of dk_dr).
double q_out(const PhotonNumberDistribution& dist, double reflectance);

/// Analytic dK/dR, evaluated directly from the weighted sums
///   dK/dR = (M·Z + M² - V·Z) / (T² Z² ⟨n⟩_in),
/// where Z, M, V are the T-weighted sums of p_n, n·p_n, n²·p_n. Satisfies
/// Q_out(R) = -(1-R)·(dK/dR)/K(R) and Q_in = -dK/dR at R = 0.
double dk_dr(const PhotonNumberDistribution& dist, double reflectance);

/// Sign of dK/dR with a relative deadband against catastrophic cancellation:
/// the numerator above vanishes identically for Poissonian states, where
/// rounding noise must not read as a slope. Returns -1, 0 or +1.
int dk_dr_sign(const PhotonNumberDistribution& dist, double reflectance);

/// Normalized equal-time correlation g⁽ᵏ⁾(0) = ⟨n(n-1)…(n-k+1)⟩ / ⟨n⟩ᵏ for
/// order k ≥ 2.
double g_n_zero(const PhotonNumberDistribution& dist, int order);

/// Value of K(R) or dK/dR in the R → 1 limit. Both are determined by
/// (p_0, p_1, p_2) and the input mean alone; for p_0 = 0 they diverge.
struct LimitValue {
    enum class Kind { finite, divergent, indeterminate };
    Kind kind = Kind::finite;
    double value = 0.0;  // meaningful only when kind == finite

    bool is_finite() const noexcept { return kind == Kind::finite; }
};

/// lim_{R→1} K(R) = p_1 / (p_0 ⟨n⟩_in); divergent when p_0 = 0 and p_1 > 0,
/// indeterminate when p_0 = p_1 = 0.
LimitValue k_limit_r1(const PhotonNumberDistribution& dist);

/// lim_{R→1} dK/dR = (p_1² - 2 p_0 p_2) / (p_0² ⟨n⟩_in); divergent when p_0 = 0.
LimitValue dkdr_limit_r1(const PhotonNumberDistribution& dist);

struct Extremum {
    enum class Kind { minimum, maximum };
    double r_star = 0.0;
    Kind kind = Kind::minimum;
    double k_value = 0.0;
};

struct ExtremaOptions {
    /// Coarse grid density for locating sign changes of dK/dR. Closely spaced
    /// extrema must not be merged, so this is configurable.
    std::size_t grid_points = 512;
    /// Bisection is run until the bracketing interval is narrower than this.
    double refine_tol = 1e-8;
};

/// All local extrema of K on (0, r_stop): sign changes of dK/dR located on a
/// coarse grid and refined by bisection. A change from negative to positive
/// slope is a minimum, the reverse a maximum. Empty when K is monotonic.
std::vector<Extremum> find_extrema(const PhotonNumberDistribution& dist, double r_stop,
                                   const ExtremaOptions& opts = {});

struct AttenuationCurve {
    std::vector<double> r_grid;
    std::vector<double> k_values;
    std::vector<double> dkdr_values;
    std::vector<double> q_out_values;
    std::vector<Extremum> extrema;
};

/// K, dK/dR and Q_out sampled on a uniform grid over [0, r_stop], with
/// extrema annotated.
AttenuationCurve sample_curve(const PhotonNumberDistribution& dist, double r_stop,
                              std::size_t n_points, const ExtremaOptions& opts = {});

/// Closed-form K(R) of the displaced squeezed state (equal-variance gauge).
/// Singular at r = 0 (coth r); callers should use the coherent limit K = 1
/// or the generic pipeline there.
double closed_form_k_dsq(double z, double r, double reflectance);

/// Closed-form K(R) of the catalyzed coherent state: a ratio of two
/// quadratics in (1-R), normalized so K(0) = 1. Requires alpha > 0 (the
/// alpha = 0 state is the vacuum, for which K is undefined).
double closed_form_k_ccs(double lambda, double alpha, double reflectance);

}  // namespace zps
