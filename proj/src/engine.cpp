#include "zps/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace zps {
namespace {

/// T-weighted power sums over the distribution: Z = Σ p_n Tⁿ, M = Σ n p_n Tⁿ,
/// V = Σ n² p_n Tⁿ, accumulated in increasing n (terms decay for T < 1).
struct WeightedSums {
    double z = 0.0;
    double m = 0.0;
    double v = 0.0;
};

WeightedSums weighted_sums(const PhotonNumberDistribution& dist, double transmittance) {
    WeightedSums s;
    double tn = 1.0;
    const auto probs = dist.probs();
    for (std::size_t n = 0; n < probs.size(); ++n) {
        const double w = probs[n] * tn;
        const double dn = double(n);
        s.z += w;
        s.m += dn * w;
        s.v += dn * dn * w;
        tn *= transmittance;
    }
    return s;
}

void check_reflectance_open(double reflectance) {
    if (!(reflectance >= 0.0 && reflectance < 1.0)) {
        throw std::invalid_argument("reflectance must lie in [0, 1)");
    }
}

double input_mean(const PhotonNumberDistribution& dist) {
    const double mean = moments(dist).mean;
    if (mean <= 0.0) {
        throw std::invalid_argument("operation undefined for a zero-mean (vacuum) state");
    }
    return mean;
}

}  // namespace

Moments moments(const PhotonNumberDistribution& dist) {
    Moments out;
    double m2 = 0.0;
    const auto probs = dist.probs();
    for (std::size_t n = 0; n < probs.size(); ++n) {
        const double dn = double(n);
        out.mean += dn * probs[n];
        m2 += dn * dn * probs[n];
    }
    out.variance = m2 - out.mean * out.mean;
    if (out.mean > 0.0) {
        out.mandel_q = out.variance / out.mean - 1.0;
    }
    return out;
}

PhotonNumberDistribution apply_zps(const PhotonNumberDistribution& dist, double reflectance) {
    if (!(reflectance >= 0.0 && reflectance <= 1.0)) {
        throw std::invalid_argument("reflectance must lie in [0, 1]");
    }
    if (reflectance == 1.0 && dist[0] <= 0.0) {
        throw std::invalid_argument(
            "conditioning is degenerate at R = 1 for a state with no vacuum component");
    }
    const double transmittance = 1.0 - reflectance;
    std::vector<double> reweighted(dist.probs().begin(), dist.probs().end());
    double tn = 1.0;
    for (double& p : reweighted) {
        p *= tn;
        tn *= transmittance;
    }
    return PhotonNumberDistribution(std::move(reweighted), dist.tail_bound());
}

double n_out(const PhotonNumberDistribution& dist, double reflectance) {
    if (!(reflectance >= 0.0 && reflectance <= 1.0)) {
        throw std::invalid_argument("reflectance must lie in [0, 1]");
    }
    if (reflectance == 1.0) {
        if (dist[0] <= 0.0) {
            throw std::invalid_argument(
                "conditioning is degenerate at R = 1 for a state with no vacuum component");
        }
        return 0.0;
    }
    const WeightedSums s = weighted_sums(dist, 1.0 - reflectance);
    return s.m / s.z;
}

double k_of_r(const PhotonNumberDistribution& dist, double reflectance) {
    check_reflectance_open(reflectance);
    const double mean = input_mean(dist);
    const WeightedSums s = weighted_sums(dist, 1.0 - reflectance);
    return s.m / ((1.0 - reflectance) * s.z * mean);
}

double q_out(const PhotonNumberDistribution& dist, double reflectance) {
    check_reflectance_open(reflectance);
    const Moments out = moments(apply_zps(dist, reflectance));
    if (!out.mandel_q) {
        throw std::invalid_argument("Mandel Q undefined for a zero-mean output state");
    }
    return *out.mandel_q;
}

double dk_dr(const PhotonNumberDistribution& dist, double reflectance) {
    check_reflectance_open(reflectance);
    const double mean = input_mean(dist);
    const double transmittance = 1.0 - reflectance;
    const WeightedSums s = weighted_sums(dist, transmittance);
    return (s.m * s.z + s.m * s.m - s.v * s.z) /
           (transmittance * transmittance * s.z * s.z * mean);
}

int dk_dr_sign(const PhotonNumberDistribution& dist, double reflectance) {
    const WeightedSums s = weighted_sums(dist, 1.0 - reflectance);
    const double numerator = s.m * s.z + s.m * s.m - s.v * s.z;
    const double scale = s.m * s.z + s.m * s.m + s.v * s.z;
    if (std::abs(numerator) <= 1e-12 * scale) {
        return 0;
    }
    return numerator > 0.0 ? 1 : -1;
}

double g_n_zero(const PhotonNumberDistribution& dist, int order) {
    if (order < 2) {
        throw std::invalid_argument("correlation order must be >= 2");
    }
    const double mean = input_mean(dist);
    double factorial_moment = 0.0;
    const auto probs = dist.probs();
    for (std::size_t n = 0; n < probs.size(); ++n) {
        double falling = 1.0;
        for (int j = 0; j < order; ++j) {
            falling *= double(n) - double(j);
        }
        if (falling > 0.0) {
            factorial_moment += probs[n] * falling;
        }
    }
    return factorial_moment / std::pow(mean, order);
}

LimitValue k_limit_r1(const PhotonNumberDistribution& dist) {
    const double mean = input_mean(dist);
    if (dist[0] > 0.0) {
        return {LimitValue::Kind::finite, dist[1] / (dist[0] * mean)};
    }
    if (dist[1] > 0.0) {
        return {LimitValue::Kind::divergent, 0.0};
    }
    return {LimitValue::Kind::indeterminate, 0.0};
}

LimitValue dkdr_limit_r1(const PhotonNumberDistribution& dist) {
    const double mean = input_mean(dist);
    if (dist[0] > 0.0) {
        const double p0 = dist[0];
        return {LimitValue::Kind::finite,
                (dist[1] * dist[1] - 2.0 * p0 * dist[2]) / (p0 * p0 * mean)};
    }
    return {LimitValue::Kind::divergent, 0.0};
}

std::vector<Extremum> find_extrema(const PhotonNumberDistribution& dist, double r_stop,
                                   const ExtremaOptions& opts) {
    if (!(r_stop > 0.0 && r_stop < 1.0)) {
        throw std::invalid_argument("r_stop must lie in (0, 1)");
    }
    if (opts.grid_points < 2) {
        throw std::invalid_argument("extrema grid needs at least two points");
    }
    input_mean(dist);

    std::vector<Extremum> extrema;
    double last_r = 0.0;
    int last_sign = 0;
    for (std::size_t i = 1; i <= opts.grid_points; ++i) {
        const double r = r_stop * double(i) / double(opts.grid_points);
        const int sign = dk_dr_sign(dist, r);
        if (sign == 0) {
            continue;
        }
        if (last_sign != 0 && sign != last_sign) {
            // Bisect the bracket [last_r, r] on the slope sign. A zero sign at
            // the midpoint means the flat numeric zone around the root was
            // reached, which is itself a converged answer.
            double lo = last_r;
            double hi = r;
            while (hi - lo > opts.refine_tol) {
                const double mid = 0.5 * (lo + hi);
                const int mid_sign = dk_dr_sign(dist, mid);
                if (mid_sign == 0) {
                    lo = hi = mid;
                    break;
                }
                (mid_sign == last_sign ? lo : hi) = mid;
            }
            const double r_star = 0.5 * (lo + hi);
            const Extremum::Kind kind =
                sign > 0 ? Extremum::Kind::minimum : Extremum::Kind::maximum;
            extrema.push_back({r_star, kind, k_of_r(dist, r_star)});
        }
        last_sign = sign;
        last_r = r;
    }
    return extrema;
}

AttenuationCurve sample_curve(const PhotonNumberDistribution& dist, double r_stop,
                              std::size_t n_points, const ExtremaOptions& opts) {
    if (!(r_stop > 0.0 && r_stop < 1.0)) {
        throw std::invalid_argument("r_stop must lie in (0, 1)");
    }
    if (n_points < 2) {
        throw std::invalid_argument("curve needs at least two points");
    }
    AttenuationCurve curve;
    curve.r_grid.reserve(n_points);
    curve.k_values.reserve(n_points);
    curve.dkdr_values.reserve(n_points);
    curve.q_out_values.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double r = r_stop * double(i) / double(n_points - 1);
        curve.r_grid.push_back(r);
        curve.k_values.push_back(k_of_r(dist, r));
        curve.dkdr_values.push_back(dk_dr(dist, r));
        curve.q_out_values.push_back(q_out(dist, r));
    }
    curve.extrema = find_extrema(dist, r_stop, opts);
    return curve;
}

double closed_form_k_dsq(double z, double r, double reflectance) {
    if (!(r > 0.0)) {
        throw std::invalid_argument("closed-form K is singular at r = 0; use the coherent limit");
    }
    if (z < 0.0) {
        throw std::invalid_argument("displacement magnitude must be >= 0");
    }
    check_reflectance_open(reflectance);
    const double t = 1.0 - reflectance;
    const double coth_r = 1.0 / std::tanh(r);
    const double coth_2r = 1.0 / std::tanh(2.0 * r);
    const double prefactor = 1.0 / (std::sinh(r) * std::sinh(r) + z * z);
    const double first = 1.0 / (2.0 * (coth_r - t));
    const double second =
        (0.5 - 2.0 * z * z * (coth_2r + 1.0) / (1.0 + t * std::tanh(r))) / (coth_r + t);
    return prefactor * (first - second);
}

double closed_form_k_ccs(double lambda, double alpha, double reflectance) {
    if (!(lambda >= 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("catalysis parameter must satisfy 0 <= lambda < 1");
    }
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("closed-form K requires alpha > 0 (zero-mean state otherwise)");
    }
    check_reflectance_open(reflectance);
    const double w = alpha * alpha * (1.0 - lambda);
    const double t1 = 1.0 - lambda;
    auto quadratics = [lambda, w, t1](double t, double& numer, double& denom) {
        const double wt = w * t;
        const double l2w2t2 = lambda * lambda * wt * wt;
        numer = (2.0 * lambda - 1.0) * (2.0 * lambda - 1.0) + wt * lambda * (5.0 * lambda - 2.0) +
                l2w2t2;
        denom = t1 * t1 + wt * lambda * (3.0 * lambda - 2.0) + l2w2t2;
    };
    double numer_t = 0.0;
    double denom_t = 0.0;
    double numer_1 = 0.0;
    double denom_1 = 0.0;
    quadratics(1.0 - reflectance, numer_t, denom_t);
    quadratics(1.0, numer_1, denom_1);
    return (numer_t / denom_t) * (denom_1 / numer_1);
}

}  // namespace zps
